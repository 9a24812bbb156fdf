#include "dynrb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dynrb {

double Mesh::total_volume() const {
    return std::accumulate(element_volumes.begin(), element_volumes.end(), 0.0);
}

std::array<int, 8> Mesh::element_dofs(int e) const {
    const auto& conn = element_connectivity[e];
    std::array<int, 8> dofs;
    for (int k = 0; k < 4; ++k) {
        dofs[2 * k] = dof_id(conn[k], 0);
        dofs[2 * k + 1] = dof_id(conn[k], 1);
    }
    return dofs;
}

int Mesh::nearest_node(double x, double y) const {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::max();
    for (int n = 0; n < n_nodes(); ++n) {
        const double ddx = node_coords[n][0] - x;
        const double ddy = node_coords[n][1] - y;
        const double d2 = ddx * ddx + ddy * ddy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = n;
        }
    }
    return best;
}

Mesh build_structured_mesh(int nx, int ny, double lx, double ly, double thickness) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: element counts must be >= 1");
    if (lx <= 0.0 || ly <= 0.0 || thickness <= 0.0)
        throw std::invalid_argument("mesh: dimensions must be positive");

    Mesh m;
    m.nx = nx;
    m.ny = ny;
    m.lx = lx;
    m.ly = ly;
    m.thickness = thickness;

    const double hx = lx / nx;
    const double hy = ly / ny;
    m.node_coords.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.node_coords.push_back({i * hx, j * hy});

    m.element_connectivity.reserve(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int n0 = m.node_id(i, j);
            const int n1 = m.node_id(i + 1, j);
            const int n2 = m.node_id(i + 1, j + 1);
            const int n3 = m.node_id(i, j + 1);
            m.element_connectivity.push_back({n0, n1, n2, n3});
        }
    }
    m.element_volumes.assign(m.n_elements(), hx * hy * thickness);
    return m;
}

void fix_edge(Mesh& mesh, Edge edge) {
    auto add_node = [&](int node) {
        mesh.fixed_dofs.push_back(Mesh::dof_id(node, 0));
        mesh.fixed_dofs.push_back(Mesh::dof_id(node, 1));
    };
    switch (edge) {
        case Edge::Left:
            for (int j = 0; j <= mesh.ny; ++j) add_node(mesh.node_id(0, j));
            break;
        case Edge::Right:
            for (int j = 0; j <= mesh.ny; ++j) add_node(mesh.node_id(mesh.nx, j));
            break;
        case Edge::Bottom:
            for (int i = 0; i <= mesh.nx; ++i) add_node(mesh.node_id(i, 0));
            break;
        case Edge::Top:
            for (int i = 0; i <= mesh.nx; ++i) add_node(mesh.node_id(i, mesh.ny));
            break;
    }
    std::sort(mesh.fixed_dofs.begin(), mesh.fixed_dofs.end());
    mesh.fixed_dofs.erase(std::unique(mesh.fixed_dofs.begin(), mesh.fixed_dofs.end()),
                          mesh.fixed_dofs.end());
}

void fix_dof(Mesh& mesh, int node, int comp) {
    mesh.fixed_dofs.push_back(Mesh::dof_id(node, comp));
    std::sort(mesh.fixed_dofs.begin(), mesh.fixed_dofs.end());
    mesh.fixed_dofs.erase(std::unique(mesh.fixed_dofs.begin(), mesh.fixed_dofs.end()),
                          mesh.fixed_dofs.end());
}

} // namespace dynrb

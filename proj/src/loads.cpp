#include "dynrb/loads.hpp"

#include <cmath>
#include <stdexcept>

#include "dynrb/assembly.hpp"
#include "dynrb/hht.hpp"

namespace dynrb {

double LoadCase::ground_accel(double t) const { return amplitude * std::sin(omega * t); }

void LoadCase::validate(const Mesh& mesh) const {
    switch (kind) {
        case Kind::PointTransient:
        case Kind::RotatingConstant:
            if (node < 0 || node >= mesh.n_nodes())
                throw std::invalid_argument("load: node out of range");
            break;
        case Kind::GroundAcceleration:
            break;
    }
    if (direction != 0 && direction != 1)
        throw std::invalid_argument("load: direction must be 0 (x) or 1 (y)");
    if (kind == Kind::PointTransient && half_sine_duration <= 0.0)
        throw std::invalid_argument("load: half_sine_duration must be positive");
    for (const auto& pm : lumped_masses) {
        if (pm.node < 0 || pm.node >= mesh.n_nodes())
            throw std::invalid_argument("load: lumped mass node out of range");
        if (pm.mass < 0.0) throw std::invalid_argument("load: lumped mass must be >= 0");
    }
}

Vec mass_influence(const SystemMatrices& sys, int direction) {
    Vec mi = Vec::Zero(sys.n_free);
    ElemVec iota_e = ElemVec::Zero();
    for (int k = 0; k < 4; ++k) iota_e[2 * k + direction] = 1.0;
    const ElemVec col = sys.Me0 * iota_e;
    for (int e = 0; e < sys.mesh->n_elements(); ++e) {
        const auto& dofs = sys.elem_free_dofs[e];
        for (int r = 0; r < 8; ++r)
            if (dofs[r] >= 0) mi[dofs[r]] += sys.Vbar[e] * col[r];
    }
    return mi;
}

std::vector<Vec> sample_loads(const SystemMatrices& sys, const LoadCase& load,
                              const TimeGrid& grid) {
    load.validate(*sys.mesh);
    std::vector<Vec> f(grid.n_steps + 1, Vec::Zero(sys.n_free));
    switch (load.kind) {
        case LoadCase::Kind::PointTransient: {
            const int fd = sys.free_of_full[Mesh::dof_id(load.node, load.direction)];
            if (fd < 0) throw std::invalid_argument("load: target dof is constrained");
            for (int i = 0; i <= grid.n_steps; ++i) {
                const double t = i * grid.dt;
                if (t <= load.half_sine_duration)
                    f[i][fd] = load.amplitude * std::sin(M_PI * t / load.half_sine_duration);
            }
            break;
        }
        case LoadCase::Kind::RotatingConstant: {
            const int fx = sys.free_of_full[Mesh::dof_id(load.node, 0)];
            const int fy = sys.free_of_full[Mesh::dof_id(load.node, 1)];
            if (fx < 0 || fy < 0)
                throw std::invalid_argument("load: target dofs are constrained");
            for (int i = 0; i <= grid.n_steps; ++i) {
                const double t = i * grid.dt;
                f[i][fx] = load.amplitude * std::cos(load.omega * t);
                f[i][fy] = load.amplitude * std::sin(load.omega * t);
            }
            break;
        }
        case LoadCase::Kind::GroundAcceleration: {
            Vec mi = mass_influence(sys, load.direction);
            for (const auto& pm : load.lumped_masses) {
                const int fd = sys.free_of_full[Mesh::dof_id(pm.node, load.direction)];
                if (fd >= 0) mi[fd] += pm.mass;
            }
            for (int i = 0; i <= grid.n_steps; ++i)
                f[i] = -load.ground_accel(i * grid.dt) * mi;
            break;
        }
    }
    return f;
}

} // namespace dynrb

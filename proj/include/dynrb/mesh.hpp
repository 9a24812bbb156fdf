#pragma once

#include <array>
#include <vector>

#include "dynrb/types.hpp"

namespace dynrb {

/// Structured grid of 4-node quadrilaterals, row-major node numbering along x,
/// dofs (u_x, u_y) interleaved per node.
struct Mesh {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double thickness = 0.0;
    std::vector<std::array<double, 2>> node_coords;
    std::vector<std::array<int, 4>> element_connectivity; // counter-clockwise
    std::vector<int> fixed_dofs;                          // sorted global dof ids
    std::vector<double> element_volumes;

    int n_nodes() const { return static_cast<int>(node_coords.size()); }
    int n_elements() const { return static_cast<int>(element_connectivity.size()); }
    int n_dofs() const { return 2 * n_nodes(); }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double total_volume() const;

    int node_id(int i, int j) const { return j * (nx + 1) + i; }
    static int dof_id(int node, int comp) { return 2 * node + comp; }

    /// The 8 global dof ids of an element, node-interleaved, CCW node order.
    std::array<int, 8> element_dofs(int e) const;

    /// Nearest node to a physical point.
    int nearest_node(double x, double y) const;
};

enum class Edge { Left, Right, Bottom, Top };

Mesh build_structured_mesh(int nx, int ny, double lx, double ly, double thickness);

/// Constrain both dofs of every node on an edge.
void fix_edge(Mesh& mesh, Edge edge);

/// Constrain a single dof (node id, component 0=x / 1=y).
void fix_dof(Mesh& mesh, int node, int comp);

} // namespace dynrb

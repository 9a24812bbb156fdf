#pragma once

#include <vector>

#include "dynrb/types.hpp"

namespace dynrb {

struct Mesh;
struct SystemMatrices;
struct TimeGrid;

struct PointMass {
    int node = -1;
    double mass = 0.0; // kg
};

struct LoadCase {
    enum class Kind { PointTransient, RotatingConstant, GroundAcceleration };

    Kind kind = Kind::PointTransient;
    int node = -1;       // loaded node (point / rotating kinds)
    int direction = 1;   // 0 = x, 1 = y; force direction or excited ground direction
    double amplitude = 0.0;          // N for forces, m/s^2 for ground acceleration
    double half_sine_duration = 0.0; // s, point transient only
    double omega = 0.0;              // rad/s, rotating load or ground sinusoid
    std::vector<PointMass> lumped_masses;

    /// Ground excitation enters through the mass matrix, so the sampled
    /// forces change with the design.
    bool design_dependent() const { return kind == Kind::GroundAcceleration; }

    double ground_accel(double t) const;
    void validate(const Mesh& mesh) const;
};

/// Row restriction of M * iota to free dofs, iota being 1 on every dof of the
/// given direction (fixed nodes included, so base coupling is kept).
Vec mass_influence(const SystemMatrices& sys, int direction);

/// Per-step free-dof force vectors, i = 0..n_steps.
std::vector<Vec> sample_loads(const SystemMatrices& sys, const LoadCase& load,
                              const TimeGrid& grid);

} // namespace dynrb

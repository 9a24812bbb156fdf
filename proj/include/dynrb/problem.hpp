#pragma once

#include <optional>

#include "dynrb/assembly.hpp"
#include "dynrb/hht.hpp"
#include "dynrb/loads.hpp"
#include "dynrb/material.hpp"
#include "dynrb/mesh.hpp"
#include "dynrb/objectives.hpp"

namespace dynrb {

/// Everything that defines one dynamic design problem: discretization,
/// material law, loading, objective and time integration settings.
struct ProblemDef {
    Mesh mesh;
    MaterialParams material;
    LoadCase load;
    Objective::Kind objective_kind = Objective::Kind::MeanDynamicCompliance;
    int target_node = -1; // squared-displacement kind
    int target_comp = 1;
    TimeGrid grid;
    HHTParams hht = HHTParams::from_alpha(0.05);
    std::optional<double> filter_radius; // density filter, off by default

    Objective make_objective(const SystemMatrices& sys) const;
    const DensityFilter& filter() const;

    /// Design densities -> physical densities (identity without a filter).
    Vec physical_density(const Vec& b) const;

  private:
    mutable DensityFilter filter_cache_;
};

/// One full-order primal evaluation: assembly, effective operators, forward
/// trajectory, objective value and its per-step state partials.
struct ForwardSolution {
    SystemMatrices sys;
    EffectiveOperators eff;
    Trajectory traj;
    Objective obj;
    std::vector<Vec> partials;
    double objective_value = 0.0;
};

ForwardSolution solve_forward(const ProblemDef& problem, const Vec& design);

/// Benchmark factories (dimensions in m, SI units throughout).
ProblemDef make_cantilever_benchmark(int nx, int ny);
ProblemDef make_support_benchmark(int nx, int ny);
ProblemDef make_building_benchmark(int nx, int ny);

} // namespace dynrb

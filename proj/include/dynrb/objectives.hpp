#pragma once

#include <vector>

#include "dynrb/assembly.hpp"
#include "dynrb/hht.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

struct Objective {
    enum class Kind { MeanDynamicCompliance, MeanStrainEnergy, SquaredTargetDisplacement };

    Kind kind = Kind::MeanDynamicCompliance;
    int target_dof = -1; // free-dof index, squared-displacement kind only

    void validate(const SystemMatrices& sys) const;
};

/// Time-mean objective value over steps 0..n_steps, normalized by n_steps.
double eval(const Objective& obj, const Trajectory& traj, const SystemMatrices& sys,
            const TimeGrid& grid);

/// Per-step derivatives with respect to the displacement vectors.
std::vector<Vec> state_partials(const Objective& obj, const Trajectory& traj,
                                const SystemMatrices& sys, const TimeGrid& grid);

/// Explicit per-element design derivative with the trajectory held fixed:
/// nonzero only for the strain-energy kind, through the stiffness scale.
Vec design_partial_explicit(const Objective& obj, const Trajectory& traj,
                            const SystemMatrices& sys, const TimeGrid& grid);

} // namespace dynrb

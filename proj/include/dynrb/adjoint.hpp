#pragma once

#include <vector>

#include "dynrb/assembly.hpp"
#include "dynrb/hht.hpp"
#include "dynrb/loads.hpp"
#include "dynrb/objectives.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

/// Backward multipliers of the time-stepping recursion. vartheta multiplies
/// the balance equations, varsigma the displacement updates, tau the velocity
/// updates. Indices run 0..n_steps.
struct AdjointTrajectory {
    std::vector<Vec> vartheta;
    std::vector<Vec> varsigma;
    std::vector<Vec> tau;
    int solve_count = 0;
};

/// Backward sweep with the factorizations from the forward pass: one terminal
/// solve, interior solves down to step 1, and a mass-matrix solve for step 0.
AdjointTrajectory solve_adjoint_full(const SystemMatrices& sys, const EffectiveOperators& eff,
                                     const std::vector<Vec>& partials, const TimeGrid& grid,
                                     const HHTParams& hht);

/// Per-step design derivative of the step residuals for one element,
/// restricted to its 8 local dofs. Entry i corresponds to the equation that
/// determines the step-i acceleration (the initial balance for i = 0).
std::vector<ElemVec> partial_residual_design(int e, const Trajectory& traj,
                                             const SystemMatrices& sys,
                                             const MaterialParams& material,
                                             const LoadCase& load, const TimeGrid& grid,
                                             const HHTParams& hht);

/// Design gradient: explicit objective term plus the multiplier-weighted
/// residual derivatives accumulated element-locally over all steps.
/// `vartheta` may be the full adjoint or a lifted reduced one.
Vec assemble_gradient(const std::vector<Vec>& vartheta, const Trajectory& traj,
                      const SystemMatrices& sys, const MaterialParams& material,
                      const Objective& obj, const LoadCase& load, const TimeGrid& grid,
                      const HHTParams& hht);

} // namespace dynrb

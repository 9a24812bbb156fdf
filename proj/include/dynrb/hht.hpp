#pragma once

#include <memory>
#include <vector>

#include "dynrb/assembly.hpp"
#include "dynrb/loads.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

struct TimeGrid {
    int n_steps = 0;
    double dt = 0.0;

    double total_time() const { return n_steps * dt; }
    static TimeGrid from_total(int n_steps, double total_time);
    void validate() const;
};

/// Alpha-method parameters; beta and delta follow from alpha in the
/// unconditionally stable second-order family.
struct HHTParams {
    double alpha = 0.05;
    double beta = 0.0;
    double delta = 0.0;

    static HHTParams from_alpha(double alpha);
    void validate() const;
};

/// Constant step operators of the recursion, factorized once. The backward
/// (adjoint) sweep reuses the same factorizations.
struct EffectiveOperators {
    SpMat Mhat1; // M + (1-a) delta dt C + (1-a) beta dt^2 K
    SpMat Mhat0; // (1-a)(1-delta) dt C + (1-a)(1/2-beta) dt^2 K
    SpMat Chat0; // C + (1-a) dt K
    std::unique_ptr<Eigen::SimplicialLLT<SpMat>> Mhat1_solver;
    std::unique_ptr<Eigen::SimplicialLLT<SpMat>> M_solver;
};

EffectiveOperators effective_operators(const SystemMatrices& sys, const TimeGrid& grid,
                                       const HHTParams& hht);

/// a0 = M^{-1} (f0 - C v0 - K d0); standalone variant factors M itself.
Vec initial_acceleration(const SystemMatrices& sys, const Vec& f0, const Vec& d0, const Vec& v0);

struct Trajectory {
    std::vector<Vec> d, v, a, f; // n_steps+1 entries each, free-dof length
};

/// March the blended-balance recursion with one constant-matrix solve per step.
Trajectory hht_solve(const SystemMatrices& sys, const EffectiveOperators& eff,
                     std::vector<Vec> loads, const TimeGrid& grid, const HHTParams& hht,
                     const Vec& d0, const Vec& v0);

/// Convenience: sample the load case and start from rest.
Trajectory hht_solve(const SystemMatrices& sys, const EffectiveOperators& eff,
                     const LoadCase& load, const TimeGrid& grid, const HHTParams& hht);

} // namespace dynrb

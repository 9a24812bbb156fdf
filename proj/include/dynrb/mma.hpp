#pragma once

#include <functional>

#include "dynrb/types.hpp"

namespace dynrb {

struct MmaOptions {
    double move_limit = 0.2;
    double asymptote_init = 0.5;
    double asymptote_shrink = 0.7;
    double asymptote_grow = 1.2;
    double constraint_tol = 1e-6;
    int max_bisect = 200;
};

/// Single-constraint method-of-moving-asymptotes update on box [0,1]^n.
/// The dual multiplier is bisected on the true constraint value, so an
/// accepted step satisfies g <= tol exactly as evaluated, not merely in the
/// separable approximation. Requires an elementwise non-negative constraint
/// gradient (monotone constraint), which volume constraints provide.
class MmaUpdater {
  public:
    explicit MmaUpdater(MmaOptions opts = {}) : opts_(opts) {}

    Vec update(const Vec& x, const Vec& objective_grad,
               const std::function<double(const Vec&)>& constraint_value,
               const Vec& constraint_grad);

    const MmaOptions& options() const { return opts_; }

  private:
    MmaOptions opts_;
    Vec low_, upp_, x_prev1_, x_prev2_;
    int iter_ = 0;
};

/// One-shot variant with fresh asymptotes.
Vec update_density(const Vec& b, const Vec& objective_grad,
                   const std::function<double(const Vec&)>& constraint_value,
                   const Vec& constraint_grad, const MmaOptions& opts = {});

} // namespace dynrb

#include "dynrb/mma.hpp"

#include <cmath>
#include <stdexcept>

namespace dynrb {

namespace {
constexpr double kRaa0 = 1e-5;
constexpr double kAsymptoteMin = 0.01; // times the unit variable range
constexpr double kAsymptoteMax = 10.0;
} // namespace

Vec MmaUpdater::update(const Vec& x, const Vec& objective_grad,
                       const std::function<double(const Vec&)>& constraint_value,
                       const Vec& constraint_grad) {
    const Eigen::Index n = x.size();
    if (objective_grad.size() != n || constraint_grad.size() != n)
        throw std::invalid_argument("mma: gradient dimension mismatch");
    if (constraint_grad.minCoeff() < 0.0)
        throw std::invalid_argument("mma: constraint gradient must be non-negative");
    ++iter_;

    if (iter_ < 3) {
        low_ = x.array() - opts_.asymptote_init;
        upp_ = x.array() + opts_.asymptote_init;
    } else {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double osc = (x[j] - x_prev1_[j]) * (x_prev1_[j] - x_prev2_[j]);
            const double gamma = osc > 0.0   ? opts_.asymptote_grow
                                 : osc < 0.0 ? opts_.asymptote_shrink
                                             : 1.0;
            low_[j] = x[j] - gamma * (x_prev1_[j] - low_[j]);
            upp_[j] = x[j] + gamma * (upp_[j] - x_prev1_[j]);
            low_[j] = std::max(std::min(low_[j], x[j] - kAsymptoteMin), x[j] - kAsymptoteMax);
            upp_[j] = std::min(std::max(upp_[j], x[j] + kAsymptoteMin), x[j] + kAsymptoteMax);
        }
    }
    x_prev2_ = iter_ >= 2 ? x_prev1_ : x;
    x_prev1_ = x;

    Vec alpha(n), beta(n), p0(n), q0(n), p1(n), q1(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        alpha[j] = std::max({0.0, low_[j] + 0.1 * (x[j] - low_[j]), x[j] - opts_.move_limit});
        beta[j] = std::min({1.0, upp_[j] - 0.1 * (upp_[j] - x[j]), x[j] + opts_.move_limit});
        const double du = upp_[j] - x[j];
        const double dl = x[j] - low_[j];
        const double fp = std::max(objective_grad[j], 0.0);
        const double fm = std::max(-objective_grad[j], 0.0);
        p0[j] = du * du * (fp + 0.001 * fm + kRaa0);
        q0[j] = dl * dl * (fm + 0.001 * fp + kRaa0);
        p1[j] = du * du * constraint_grad[j];
        q1[j] = 0.0;
    }

    auto primal = [&](double mu) {
        Vec xs(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double sp = std::sqrt(p0[j] + mu * p1[j]);
            const double sq = std::sqrt(q0[j] + mu * q1[j]);
            xs[j] = (low_[j] * sp + upp_[j] * sq) / (sp + sq);
            xs[j] = std::clamp(xs[j], alpha[j], beta[j]);
        }
        return xs;
    };

    Vec x0 = primal(0.0);
    if (constraint_value(x0) <= 0.0) return x0;

    double mu_lo = 0.0, mu_hi = 1.0;
    Vec x_hi = primal(mu_hi);
    int used = 0;
    while (constraint_value(x_hi) > 0.0) {
        mu_lo = mu_hi;
        mu_hi *= 10.0;
        x_hi = primal(mu_hi);
        if (++used > 40) {
            // Move limits block full restoration; take the most feasible point.
            return x_hi;
        }
    }

    for (int it = 0; it < opts_.max_bisect; ++it) {
        const double mu = 0.5 * (mu_lo + mu_hi);
        const Vec xm = primal(mu);
        const double g = constraint_value(xm);
        if (std::abs(g) <= opts_.constraint_tol) return xm;
        (g > 0.0 ? mu_lo : mu_hi) = mu;
    }
    // The constraint is piecewise-smooth and monotone in mu; hitting the cap
    // means the bracket collapsed without meeting the tolerance.
    const Vec xm = primal(mu_hi);
    if (constraint_value(xm) <= opts_.constraint_tol) return xm;
    throw std::runtime_error("mma: dual bisection failed to converge");
}

Vec update_density(const Vec& b, const Vec& objective_grad,
                   const std::function<double(const Vec&)>& constraint_value,
                   const Vec& constraint_grad, const MmaOptions& opts) {
    MmaUpdater updater(opts);
    return updater.update(b, objective_grad, constraint_value, constraint_grad);
}

} // namespace dynrb

#include "dynrb/hht.hpp"

#include <cmath>
#include <stdexcept>

namespace dynrb {

TimeGrid TimeGrid::from_total(int n_steps, double total_time) {
    if (n_steps < 1) throw std::invalid_argument("time grid: n_steps must be >= 1");
    if (total_time <= 0.0) throw std::invalid_argument("time grid: total time must be positive");
    return {n_steps, total_time / n_steps};
}

void TimeGrid::validate() const {
    if (n_steps < 1 || dt <= 0.0) throw std::invalid_argument("time grid: invalid");
}

HHTParams HHTParams::from_alpha(double alpha) {
    HHTParams p;
    p.alpha = alpha;
    p.beta = (1.0 + alpha) * (1.0 + alpha) / 4.0;
    p.delta = (1.0 + 2.0 * alpha) / 2.0;
    p.validate();
    return p;
}

void HHTParams::validate() const {
    if (alpha < 0.0 || alpha > 1.0 / 3.0)
        throw std::invalid_argument("hht: alpha must be in [0, 1/3]");
    if (std::abs(beta - (1.0 + alpha) * (1.0 + alpha) / 4.0) > 1e-12 ||
        std::abs(delta - (1.0 + 2.0 * alpha) / 2.0) > 1e-12)
        throw std::invalid_argument("hht: beta/delta inconsistent with alpha");
}

EffectiveOperators effective_operators(const SystemMatrices& sys, const TimeGrid& grid,
                                       const HHTParams& hht) {
    grid.validate();
    hht.validate();
    const double a = hht.alpha, b = hht.beta, dl = hht.delta, dt = grid.dt;

    EffectiveOperators eff;
    eff.Mhat1 = sys.M + ((1.0 - a) * dl * dt) * sys.C + ((1.0 - a) * b * dt * dt) * sys.K;
    eff.Mhat0 =
        ((1.0 - a) * (1.0 - dl) * dt) * sys.C + ((1.0 - a) * (0.5 - b) * dt * dt) * sys.K;
    eff.Chat0 = sys.C + ((1.0 - a) * dt) * sys.K;

    eff.Mhat1_solver = std::make_unique<Eigen::SimplicialLLT<SpMat>>();
    eff.Mhat1_solver->compute(eff.Mhat1);
    if (eff.Mhat1_solver->info() != Eigen::Success)
        throw std::runtime_error("hht: effective matrix factorization failed");
    eff.M_solver = std::make_unique<Eigen::SimplicialLLT<SpMat>>();
    eff.M_solver->compute(sys.M);
    if (eff.M_solver->info() != Eigen::Success)
        throw std::runtime_error("hht: mass matrix factorization failed");
    return eff;
}

Vec initial_acceleration(const SystemMatrices& sys, const Vec& f0, const Vec& d0,
                         const Vec& v0) {
    Eigen::SimplicialLLT<SpMat> llt(sys.M);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("initial_acceleration: singular mass matrix");
    return llt.solve(f0 - sys.C * v0 - sys.K * d0);
}

Trajectory hht_solve(const SystemMatrices& sys, const EffectiveOperators& eff,
                     std::vector<Vec> loads, const TimeGrid& grid, const HHTParams& hht,
                     const Vec& d0, const Vec& v0) {
    grid.validate();
    hht.validate();
    const int nt = grid.n_steps;
    if (static_cast<int>(loads.size()) != nt + 1)
        throw std::invalid_argument("hht_solve: need n_steps+1 load vectors");
    if (d0.size() != sys.n_free || v0.size() != sys.n_free)
        throw std::invalid_argument("hht_solve: initial condition dimension mismatch");

    const double a = hht.alpha, b = hht.beta, dl = hht.delta, dt = grid.dt;

    Trajectory traj;
    traj.f = std::move(loads);
    traj.d.reserve(nt + 1);
    traj.v.reserve(nt + 1);
    traj.a.reserve(nt + 1);
    traj.d.push_back(d0);
    traj.v.push_back(v0);
    traj.a.push_back(eff.M_solver->solve(traj.f[0] - sys.C * v0 - sys.K * d0));

    for (int i = 1; i <= nt; ++i) {
        const Vec rhs = (1.0 - a) * traj.f[i] + a * traj.f[i - 1] - eff.Mhat0 * traj.a[i - 1] -
                        eff.Chat0 * traj.v[i - 1] - sys.K * traj.d[i - 1];
        Vec ai = eff.Mhat1_solver->solve(rhs);
        if (!ai.allFinite()) throw std::runtime_error("hht_solve: non-finite state");
        traj.v.push_back(traj.v[i - 1] + ((1.0 - dl) * traj.a[i - 1] + dl * ai) * dt);
        traj.d.push_back(traj.d[i - 1] + traj.v[i - 1] * dt +
                         ((0.5 - b) * traj.a[i - 1] + b * ai) * dt * dt);
        traj.a.push_back(std::move(ai));
    }
    return traj;
}

Trajectory hht_solve(const SystemMatrices& sys, const EffectiveOperators& eff,
                     const LoadCase& load, const TimeGrid& grid, const HHTParams& hht) {
    return hht_solve(sys, eff, sample_loads(sys, load, grid), grid, hht,
                     Vec::Zero(sys.n_free), Vec::Zero(sys.n_free));
}

} // namespace dynrb

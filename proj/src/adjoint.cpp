#include "dynrb/adjoint.hpp"

#include <stdexcept>

namespace dynrb {

AdjointTrajectory solve_adjoint_full(const SystemMatrices& sys, const EffectiveOperators& eff,
                                     const std::vector<Vec>& partials, const TimeGrid& grid,
                                     const HHTParams& hht) {
    const int nt = grid.n_steps;
    if (static_cast<int>(partials.size()) != nt + 1)
        throw std::invalid_argument("adjoint: need n_steps+1 state partials");
    const double b = hht.beta, dl = hht.delta, dt = grid.dt;
    const double dt2 = dt * dt;

    AdjointTrajectory adj;
    adj.vartheta.assign(nt + 1, Vec());
    adj.varsigma.assign(nt + 1, Vec());
    adj.tau.assign(nt + 1, Vec());

    adj.varsigma[nt] = partials[nt];
    adj.tau[nt] = Vec::Zero(sys.n_free);
    adj.vartheta[nt] =
        eff.Mhat1_solver->solve((-b * dt2) * adj.varsigma[nt] - (dl * dt) * adj.tau[nt]);
    ++adj.solve_count;

    for (int i = nt; i >= 2; --i) {
        adj.varsigma[i - 1] = partials[i - 1] + sys.K * adj.vartheta[i] + adj.varsigma[i];
        adj.tau[i - 1] = eff.Chat0 * adj.vartheta[i] + dt * adj.varsigma[i] + adj.tau[i];
        const Vec rhs = -(eff.Mhat0 * adj.vartheta[i]) -
                        dt2 * (b * adj.varsigma[i - 1] + (0.5 - b) * adj.varsigma[i]) -
                        dt * (dl * adj.tau[i - 1] + (1.0 - dl) * adj.tau[i]);
        adj.vartheta[i - 1] = eff.Mhat1_solver->solve(rhs);
        ++adj.solve_count;
    }

    adj.vartheta[0] = eff.M_solver->solve(-(eff.Mhat0 * adj.vartheta[1]) -
                                          dt2 * (0.5 - b) * adj.varsigma[1] -
                                          dt * (1.0 - dl) * adj.tau[1]);
    ++adj.solve_count;

    // Step-0 running vectors are not used by any solve; kept for completeness.
    adj.varsigma[0] = partials[0] + sys.K * adj.vartheta[1] + adj.varsigma[1];
    adj.tau[0] = eff.Chat0 * adj.vartheta[1] + dt * adj.varsigma[1] + adj.tau[1];
    return adj;
}

namespace {

ElemVec direction_indicator(int direction) {
    ElemVec iota = ElemVec::Zero();
    for (int k = 0; k < 4; ++k) iota[2 * k + direction] = 1.0;
    return iota;
}

} // namespace

std::vector<ElemVec> partial_residual_design(int e, const Trajectory& traj,
                                             const SystemMatrices& sys,
                                             const MaterialParams& material,
                                             const LoadCase& load, const TimeGrid& grid,
                                             const HHTParams& hht) {
    const int nt = grid.n_steps;
    const double al = hht.alpha, dt = grid.dt;
    const double aM = material.alpha_M, aK = material.alpha_K;
    const bool ground = load.design_dependent();
    const ElemVec mass_col = ground ? ElemVec(sys.Me0 * direction_indicator(load.direction))
                                    : ElemVec(ElemVec::Zero());

    std::vector<ElemVec> out;
    out.reserve(nt + 1);

    ElemVec d_prev = sys.gather(e, traj.d[0]);
    ElemVec v_prev = sys.gather(e, traj.v[0]);
    ElemVec a_prev = sys.gather(e, traj.a[0]);

    // Initial balance: dM a0 + dC v0 + dK d0 - df0.
    ElemVec r0 = sys.dVbar[e] * (sys.Me0 * (a_prev + aM * v_prev)) +
                 sys.dEbar[e] * (sys.Ke0 * (d_prev + aK * v_prev));
    if (ground) r0 += sys.dVbar[e] * load.ground_accel(0.0) * mass_col;
    out.push_back(r0);

    for (int i = 1; i <= nt; ++i) {
        const ElemVec d_cur = sys.gather(e, traj.d[i]);
        const ElemVec v_cur = sys.gather(e, traj.v[i]);
        const ElemVec a_cur = sys.gather(e, traj.a[i]);
        const ElemVec v_blend = (1.0 - al) * v_cur + al * v_prev;
        const ElemVec d_blend = (1.0 - al) * d_cur + al * d_prev;

        ElemVec r = sys.dVbar[e] * (sys.Me0 * (a_cur + aM * v_blend)) +
                    sys.dEbar[e] * (sys.Ke0 * (d_blend + aK * v_blend));
        if (ground) {
            const double ag_blend = (1.0 - al) * load.ground_accel(i * dt) +
                                    al * load.ground_accel((i - 1) * dt);
            r += sys.dVbar[e] * ag_blend * mass_col;
        }
        out.push_back(r);
        d_prev = d_cur;
        v_prev = v_cur;
        a_prev = a_cur;
    }
    return out;
}

Vec assemble_gradient(const std::vector<Vec>& vartheta, const Trajectory& traj,
                      const SystemMatrices& sys, const MaterialParams& material,
                      const Objective& obj, const LoadCase& load, const TimeGrid& grid,
                      const HHTParams& hht) {
    const int nt = grid.n_steps;
    if (static_cast<int>(vartheta.size()) != nt + 1 ||
        static_cast<int>(traj.d.size()) != nt + 1)
        throw std::invalid_argument("gradient: trajectory/adjoint length mismatch");

    const int ne = sys.mesh->n_elements();
    Vec grad = design_partial_explicit(obj, traj, sys, grid);

    const bool ground = load.design_dependent();
    const bool compliance_coupling =
        ground && obj.kind == Objective::Kind::MeanDynamicCompliance;
    const ElemVec mass_col = ground ? ElemVec(sys.Me0 * direction_indicator(load.direction))
                                    : ElemVec(ElemVec::Zero());
    const double dt = grid.dt;

    for (int e = 0; e < ne; ++e) {
        const auto residual_derivs =
            partial_residual_design(e, traj, sys, material, load, grid, hht);
        double acc = 0.0;
        for (int i = 0; i <= nt; ++i)
            acc += sys.gather(e, vartheta[i]).dot(residual_derivs[i]);
        grad[e] += acc;

        // The sampled forces of a ground-excited system carry the mass matrix,
        // so the compliance objective picks up an explicit design term.
        if (compliance_coupling) {
            double coupling = 0.0;
            for (int i = 0; i <= nt; ++i)
                coupling -= load.ground_accel(i * dt) * mass_col.dot(sys.gather(e, traj.d[i]));
            grad[e] += sys.dVbar[e] * coupling / nt;
        }
    }
    return grad;
}

} // namespace dynrb

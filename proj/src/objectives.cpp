#include "dynrb/objectives.hpp"

#include <stdexcept>

namespace dynrb {

void Objective::validate(const SystemMatrices& sys) const {
    if (kind == Kind::SquaredTargetDisplacement) {
        if (target_dof < 0 || target_dof >= sys.n_free)
            throw std::invalid_argument("objective: target dof out of range");
    }
}

double eval(const Objective& obj, const Trajectory& traj, const SystemMatrices& sys,
            const TimeGrid& grid) {
    obj.validate(sys);
    const int nt = grid.n_steps;
    if (static_cast<int>(traj.d.size()) != nt + 1)
        throw std::invalid_argument("objective: trajectory/grid mismatch");

    double sum = 0.0;
    switch (obj.kind) {
        case Objective::Kind::MeanDynamicCompliance:
            for (int i = 0; i <= nt; ++i) sum += traj.f[i].dot(traj.d[i]);
            return sum / nt;
        case Objective::Kind::MeanStrainEnergy:
            for (int i = 0; i <= nt; ++i) sum += traj.d[i].dot(sys.K * traj.d[i]);
            return sum / (2.0 * nt);
        case Objective::Kind::SquaredTargetDisplacement:
            for (int i = 0; i <= nt; ++i) {
                const double u = traj.d[i][obj.target_dof];
                sum += u * u;
            }
            return sum / nt;
    }
    throw std::logic_error("objective: unknown kind");
}

std::vector<Vec> state_partials(const Objective& obj, const Trajectory& traj,
                                const SystemMatrices& sys, const TimeGrid& grid) {
    obj.validate(sys);
    const int nt = grid.n_steps;
    std::vector<Vec> partials(nt + 1);
    for (int i = 0; i <= nt; ++i) {
        switch (obj.kind) {
            case Objective::Kind::MeanDynamicCompliance:
                partials[i] = traj.f[i] / nt;
                break;
            case Objective::Kind::MeanStrainEnergy:
                partials[i] = (sys.K * traj.d[i]) / nt;
                break;
            case Objective::Kind::SquaredTargetDisplacement:
                partials[i] = Vec::Zero(sys.n_free);
                partials[i][obj.target_dof] = 2.0 * traj.d[i][obj.target_dof] / nt;
                break;
        }
    }
    return partials;
}

Vec design_partial_explicit(const Objective& obj, const Trajectory& traj,
                            const SystemMatrices& sys, const TimeGrid& grid) {
    obj.validate(sys);
    const int ne = sys.mesh->n_elements();
    Vec out = Vec::Zero(ne);
    if (obj.kind != Objective::Kind::MeanStrainEnergy) return out;

    const int nt = grid.n_steps;
    for (int e = 0; e < ne; ++e) {
        double acc = 0.0;
        for (int i = 0; i <= nt; ++i) {
            const ElemVec de = sys.gather(e, traj.d[i]);
            acc += de.dot(sys.Ke0 * de);
        }
        out[e] = sys.dEbar[e] * acc / (2.0 * nt);
    }
    return out;
}

} // namespace dynrb

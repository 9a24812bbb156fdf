#include "dynrb/optimize.hpp"

#include <chrono>
#include <cmath>

#include "dynrb/adjoint.hpp"

namespace dynrb {

void OptConfig::validate() const {
    if (volume_fraction <= 0.0 || volume_fraction >= 1.0)
        throw std::invalid_argument("optimize: volume fraction must be in (0,1)");
    if (max_iterations < 0)
        throw std::invalid_argument("optimize: max_iterations must be >= 0");
    if (move_limit <= 0.0 || move_limit > 1.0)
        throw std::invalid_argument("optimize: move limit must be in (0,1]");
    if (eps1 <= 0.0 || eps1 >= 1.0)
        throw std::invalid_argument("optimize: eps1 must be in (0,1)");
    if (eps2 < 0.0 || eps2 >= 1.0)
        throw std::invalid_argument("optimize: eps2 must be in [0,1)");
    if (tol_change < 0.0)
        throw std::invalid_argument("optimize: tol_change must be >= 0");
}

ModelKind adaptive_model_select(const Vec& b, const Vec* b_prev, double eps1, double eps2) {
    if (!b_prev) return ModelKind::Full;
    if (b_prev->size() != b.size())
        throw std::invalid_argument("model select: design length mismatch");
    const Eigen::Index n = b.size();
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(b[i] - (*b_prev)[i]) >= eps1) ++count;
    return static_cast<double>(count) <= static_cast<double>(n) * eps2 ? ModelKind::Reduced
                                                                       : ModelKind::Full;
}

double projected_volume_fraction(const ProblemDef& problem, const Vec& physical_density) {
    const Mesh& mesh = problem.mesh;
    double vol = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const double vbar = interp_values(physical_density[e], problem.material).Vbar;
        vol += mesh.element_volumes[e] * vbar;
    }
    return vol / mesh.total_volume();
}

Vec feasible_uniform_design(const ProblemDef& problem, double volume_fraction) {
    const int ne = problem.mesh.n_elements();
    auto frac_at = [&](double u) {
        return projected_volume_fraction(problem,
                                         problem.physical_density(Vec::Constant(ne, u)));
    };
    if (frac_at(volume_fraction) <= volume_fraction)
        return Vec::Constant(ne, volume_fraction);
    // The projection inflates this uniform fill; back it off until feasible.
    double lo = 0.0, hi = volume_fraction;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (frac_at(mid) <= volume_fraction ? lo : hi) = mid;
    }
    return Vec::Constant(ne, lo);
}

OptResult optimize(const ProblemDef& problem, const OptConfig& config,
                   const OfflineArtifacts* offline) {
    config.validate();

    ReducedBasis basis;
    if (config.rom_enabled) {
        if (!offline || offline->basis.dim() < 1)
            throw std::invalid_argument("optimize: rom enabled but no offline basis");
        basis = offline->basis;
        if (config.rom_fixed_dim >= 1 && config.rom_fixed_dim < basis.dim())
            basis.V = basis.V.leftCols(config.rom_fixed_dim).eval();
    }

    const Mesh& mesh = problem.mesh;
    const int ne = mesh.n_elements();
    const double total_volume = mesh.total_volume();

    auto volume_constraint = [&](const Vec& b) {
        return projected_volume_fraction(problem, problem.physical_density(b)) /
                   config.volume_fraction -
               1.0;
    };

    OptResult result;
    Vec b = feasible_uniform_design(problem, config.volume_fraction);
    result.final_design = b;
    if (config.max_iterations == 0) return result;

    MmaOptions mma_opts = config.mma;
    mma_opts.move_limit = config.move_limit;
    MmaUpdater mma(mma_opts);

    std::optional<Vec> b_prev;
    for (int k = 1; k <= config.max_iterations; ++k) {
        ForwardSolution fs = solve_forward(problem, b);
        if (!std::isfinite(fs.objective_value))
            throw OptimizeAbort("optimize: non-finite objective at iteration " +
                                    std::to_string(k),
                                b);

        const ModelKind model =
            config.rom_enabled
                ? adaptive_model_select(b, b_prev ? &*b_prev : nullptr, config.eps1,
                                        config.eps2)
                : ModelKind::Full;

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Vec> vartheta;
        if (model == ModelKind::Full) {
            vartheta = solve_adjoint_full(fs.sys, fs.eff, fs.partials, problem.grid,
                                          problem.hht)
                           .vartheta;
        } else {
            // Reprojection is part of the reduced branch and is timed with it.
            const auto red = project_operators(fs.sys, fs.eff, basis);
            vartheta = solve_adjoint_reduced(red, fs.partials, problem.grid, problem.hht)
                           .lifted;
        }
        const double adjoint_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        Vec grad = assemble_gradient(vartheta, fs.traj, fs.sys, problem.material, fs.obj,
                                     problem.load, problem.grid, problem.hht);
        Vec dg(ne);
        const Vec phys = problem.physical_density(b);
        for (int e = 0; e < ne; ++e) {
            dg[e] = mesh.element_volumes[e] *
                    interp_derivatives(phys[e], problem.material).dVbar_db /
                    (config.volume_fraction * total_volume);
        }
        if (problem.filter_radius) {
            grad = problem.filter().chain(grad);
            dg = problem.filter().chain(dg);
        }

        const Vec b_next = mma.update(b, grad, volume_constraint, dg);
        const double max_change = (b_next - b).cwiseAbs().maxCoeff();

        result.history.push_back({k, fs.objective_value,
                                  projected_volume_fraction(problem, phys), max_change,
                                  model, adjoint_seconds, grad.norm()});
        result.iterates.push_back(b);

        b_prev = b;
        b = b_next;
        if (max_change < config.tol_change) {
            result.converged = true;
            break;
        }
    }
    result.final_design = b;
    return result;
}

std::vector<Vec> harvest_density_samples(const ProblemDef& problem, OptConfig config,
                                         int count, int harvest_iterations) {
    if (count < 1) throw std::invalid_argument("harvest: count must be >= 1");
    config.rom_enabled = false;
    config.max_iterations = harvest_iterations;
    config.tol_change = 0.0; // keep iterating; the sample spread is the point
    OptResult run = optimize(problem, config);

    std::vector<Vec> pool = std::move(run.iterates);
    pool.push_back(run.final_design);
    const int n = static_cast<int>(pool.size());
    if (count >= n) return pool;

    std::vector<Vec> samples;
    samples.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int idx = (count == 1) ? n - 1
                                     : static_cast<int>(std::lround(
                                           static_cast<double>(i) * (n - 1) / (count - 1)));
        samples.push_back(pool[idx]);
    }
    return samples;
}

} // namespace dynrb

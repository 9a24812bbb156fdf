#include "dynrb/rom.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dynrb/error_model.hpp"

namespace dynrb {

PodResult pod(const Mat& snapshots, int n_basis) {
    if (snapshots.size() == 0) throw std::invalid_argument("pod: empty snapshot matrix");
    if (n_basis < 1 || n_basis > std::min(snapshots.rows(), snapshots.cols()))
        throw std::invalid_argument("pod: n_basis out of range");
    if (snapshots.norm() == 0.0) throw std::invalid_argument("pod: zero snapshot matrix");

    Eigen::BDCSVD<Mat> svd(snapshots, Eigen::ComputeThinU);
    PodResult result;
    result.basis = svd.matrixU().leftCols(n_basis);
    result.singular_values = svd.singularValues().head(n_basis);

    const double cutoff = svd.singularValues()[0] *
                          std::max(snapshots.rows(), snapshots.cols()) *
                          std::numeric_limits<double>::epsilon();
    result.padded = result.singular_values[n_basis - 1] <= cutoff;
    return result;
}

ReducedOperators project_operators(const SystemMatrices& sys, const EffectiveOperators& eff,
                                   const ReducedBasis& basis) {
    if (basis.V.rows() != sys.n_free)
        throw std::invalid_argument("project: basis/system dimension mismatch");
    ReducedOperators red;
    red.basis = basis.V;
    red.Mhat1_r = basis.V.transpose() * (eff.Mhat1 * basis.V);
    red.Mhat0_r = basis.V.transpose() * (eff.Mhat0 * basis.V);
    red.M_r = basis.V.transpose() * (sys.M * basis.V);
    red.K_r = sys.K * basis.V;
    red.Chat0_r = eff.Chat0 * basis.V;
    red.Mhat1_r_llt.compute(red.Mhat1_r);
    red.M_r_llt.compute(red.M_r);
    if (red.Mhat1_r_llt.info() != Eigen::Success || red.M_r_llt.info() != Eigen::Success)
        throw std::runtime_error("project: degenerate basis, projected operator not SPD");
    return red;
}

ReducedAdjoint solve_adjoint_reduced(const ReducedOperators& red,
                                     const std::vector<Vec>& partials, const TimeGrid& grid,
                                     const HHTParams& hht) {
    const int nt = grid.n_steps;
    if (static_cast<int>(partials.size()) != nt + 1)
        throw std::invalid_argument("reduced adjoint: need n_steps+1 state partials");
    const double b = hht.beta, dl = hht.delta, dt = grid.dt;
    const double dt2 = dt * dt;
    const Eigen::Index n_full = red.basis.rows();

    ReducedAdjoint out;
    out.coords.assign(nt + 1, Vec());
    Vec sig = partials[nt];
    Vec tau = Vec::Zero(n_full);
    out.coords[nt] = red.Mhat1_r_llt.solve(
        Vec(red.basis.transpose() * Vec((-b * dt2) * sig - (dl * dt) * tau)));

    for (int i = nt; i >= 2; --i) {
        const Vec sig_next = partials[i - 1] + red.K_r * out.coords[i] + sig;
        const Vec tau_next = red.Chat0_r * out.coords[i] + dt * sig + tau;
        const Vec forcing = dt2 * (b * sig_next + (0.5 - b) * sig) +
                            dt * (dl * tau_next + (1.0 - dl) * tau);
        out.coords[i - 1] = red.Mhat1_r_llt.solve(
            Vec(-(red.Mhat0_r * out.coords[i]) - red.basis.transpose() * forcing));
        sig = sig_next;
        tau = tau_next;
    }

    const Vec forcing0 = dt2 * (0.5 - b) * sig + dt * (1.0 - dl) * tau;
    out.coords[0] = red.M_r_llt.solve(
        Vec(-(red.Mhat0_r * out.coords[1]) - red.basis.transpose() * forcing0));

    out.lifted.reserve(nt + 1);
    for (int i = 0; i <= nt; ++i) out.lifted.push_back(red.basis * out.coords[i]);
    return out;
}

ResidualHistory compute_residuals(const SystemMatrices& sys, const EffectiveOperators& eff,
                                  const std::vector<Vec>& lifted,
                                  const std::vector<Vec>& partials, const TimeGrid& grid,
                                  const HHTParams& hht) {
    const int nt = grid.n_steps;
    if (static_cast<int>(lifted.size()) != nt + 1 ||
        static_cast<int>(partials.size()) != nt + 1)
        throw std::invalid_argument("residuals: length mismatch");
    const double b = hht.beta, dl = hht.delta, dt = grid.dt;
    const double dt2 = dt * dt;

    ResidualHistory hist;
    hist.R.assign(nt + 1, Vec());
    Vec sig = partials[nt];
    Vec tau = Vec::Zero(sys.n_free);
    hist.R[nt] = eff.Mhat1 * lifted[nt] + (b * dt2) * sig + (dl * dt) * tau;

    for (int i = nt; i >= 2; --i) {
        const Vec sig_next = partials[i - 1] + sys.K * lifted[i] + sig;
        const Vec tau_next = eff.Chat0 * lifted[i] + dt * sig + tau;
        hist.R[i - 1] = eff.Mhat1 * lifted[i - 1] + eff.Mhat0 * lifted[i] +
                        dt2 * (b * sig_next + (0.5 - b) * sig) +
                        dt * (dl * tau_next + (1.0 - dl) * tau);
        sig = sig_next;
        tau = tau_next;
    }

    hist.R[0] = sys.M * lifted[0] + eff.Mhat0 * lifted[1] + dt2 * (0.5 - b) * sig +
                dt * (1.0 - dl) * tau;

    hist.norms.resize(nt + 1);
    for (int i = 0; i <= nt; ++i) hist.norms[i] = hist.R[i].norm();
    return hist;
}

double summed_error(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("summed_error: length mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).norm();
    return sum;
}

namespace {

Mat steps_to_matrix(const std::vector<Vec>& steps) {
    Mat m(steps.front().size(), static_cast<Eigen::Index>(steps.size()));
    for (size_t i = 0; i < steps.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = steps[i];
    return m;
}

/// Orthonormalize v against the columns of basis (two Gram-Schmidt passes);
/// empty result means v is already spanned.
bool append_orthonormal(Mat& basis, Vec v, double drop_tol = 1e-10) {
    const double scale = v.norm();
    if (scale == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass)
        if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
    if (v.norm() < drop_tol * scale || v.norm() < drop_tol) return false;
    basis.conservativeResize(v.size(), basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / v.norm();
    return true;
}

} // namespace

GreedyResult greedy_offline(const ProblemDef& problem, const std::vector<Vec>& samples,
                            const GreedyConfig& config) {
    if (samples.empty()) throw std::invalid_argument("greedy: empty sample set");
    if (config.max_basis < 1) throw std::invalid_argument("greedy: max_basis must be >= 1");
    if (config.oracle == ErrorOracle::Fnn && !config.error_model)
        throw std::invalid_argument("greedy: Fnn oracle needs a trained error model");
    if (config.oracle == ErrorOracle::GainBaseline && !config.gain_table)
        throw std::invalid_argument("greedy: gain-baseline oracle needs a gain table");

    const int n = static_cast<int>(samples.size());
    std::vector<ForwardSolution> fsols;
    fsols.reserve(n);
    for (const Vec& b : samples) fsols.push_back(solve_forward(problem, b));

    GreedyResult result;
    std::mt19937_64 rng(config.seed);
    const int first = static_cast<int>(rng() % static_cast<std::uint64_t>(n));

    auto full_vartheta = [&](int s) {
        return solve_adjoint_full(fsols[s].sys, fsols[s].eff, fsols[s].partials, problem.grid,
                                  problem.hht)
            .vartheta;
    };

    Mat basis;
    if (!append_orthonormal(basis, pod(steps_to_matrix(full_vartheta(first)), 1).basis.col(0)))
        throw std::runtime_error("greedy: degenerate first snapshot");
    result.enriched_samples.push_back(first);

    std::vector<char> exhausted(n, 0);
    while (true) {
        // Sweep: reduced solve and an error measure for every sample.
        std::vector<double> errors(n, 0.0);
        std::vector<std::vector<Vec>> true_adjoints(n);
        std::vector<Vec> residual_norms(n);
        for (int s = 0; s < n; ++s) {
            const ReducedBasis rb{basis};
            const auto red = project_operators(fsols[s].sys, fsols[s].eff, rb);
            const auto sol = solve_adjoint_reduced(red, fsols[s].partials, problem.grid,
                                                   problem.hht);
            const auto res = compute_residuals(fsols[s].sys, fsols[s].eff, sol.lifted,
                                               fsols[s].partials, problem.grid, problem.hht);
            residual_norms[s] = res.norms;
            switch (config.oracle) {
                case ErrorOracle::True: {
                    true_adjoints[s] = full_vartheta(s);
                    const Vec err = true_error_norms(true_adjoints[s], sol.lifted);
                    result.pairs.push_back(
                        {res.norms, err, s, static_cast<int>(basis.cols())});
                    errors[s] = err.sum();
                    break;
                }
                case ErrorOracle::Fnn:
                    errors[s] = fnn_predict(*config.error_model, res.norms).sum();
                    break;
                case ErrorOracle::GainBaseline:
                    errors[s] =
                        gain_baseline_estimate(*config.gain_table, samples[s], res.norms)
                            .sum();
                    break;
            }
        }

        const int worst = static_cast<int>(
            std::max_element(errors.begin(), errors.end()) - errors.begin());
        result.iterations.push_back(
            {static_cast<int>(basis.cols()), errors[worst], worst});

        if (errors[worst] <= config.tol) {
            result.converged = true;
            break;
        }
        if (static_cast<int>(basis.cols()) >= config.max_basis) {
            result.converged = false;
            break;
        }

        // Enrich with the first snapshot mode of the worst sample; fall back to
        // the next-worst when the mode is already spanned.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return errors[a] > errors[b]; });
        bool enriched = false;
        for (int cand : order) {
            if (exhausted[cand]) continue;
            if (true_adjoints[cand].empty()) {
                true_adjoints[cand] = full_vartheta(cand);
                // A paid-for full solve doubles as a training pair.
                const ReducedBasis rb{basis};
                const auto red = project_operators(fsols[cand].sys, fsols[cand].eff, rb);
                const auto sol = solve_adjoint_reduced(red, fsols[cand].partials,
                                                       problem.grid, problem.hht);
                result.pairs.push_back({residual_norms[cand],
                                        true_error_norms(true_adjoints[cand], sol.lifted),
                                        cand, static_cast<int>(basis.cols())});
            }
            const Vec mode = pod(steps_to_matrix(true_adjoints[cand]), 1).basis.col(0);
            if (append_orthonormal(basis, mode)) {
                result.enriched_samples.push_back(cand);
                enriched = true;
                break;
            }
            exhausted[cand] = 1;
        }
        if (!enriched) {
            // Every candidate mode lies in the current span.
            result.converged = result.iterations.back().max_error <= config.tol;
            break;
        }
    }

    result.basis.V = std::move(basis);
    return result;
}

void write_matrix_rbm1(const std::string& path, const Mat& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const char magic[4] = {'R', 'B', 'M', '1'};
    out.write(magic, 4);
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

Mat read_matrix_rbm1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RBM1", 4) != 0)
        throw std::runtime_error(path + ": not an RBM1 matrix file");
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in || rows == 0 || cols == 0 || rows > (1ull << 32) || cols > (1ull << 32))
        throw std::runtime_error(path + ": corrupt RBM1 header");
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw std::runtime_error(path + ": truncated RBM1 payload");
    return m;
}

} // namespace dynrb

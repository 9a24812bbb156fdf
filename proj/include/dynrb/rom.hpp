#pragma once

#include <cstdint>
#include <vector>

#include "dynrb/adjoint.hpp"
#include "dynrb/problem.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

struct FeedforwardNet;
struct GainTable;

struct PodResult {
    Mat basis; // leading left singular vectors, orthonormal columns
    Vec singular_values;
    bool padded = false; // requested more vectors than the numerical rank
};

/// Leading modes of a snapshot matrix by singular value decomposition.
PodResult pod(const Mat& snapshots, int n_basis);

struct ReducedBasis {
    Mat V; // n_free x n_r, orthonormal columns
    int dim() const { return static_cast<int>(V.cols()); }
};

/// Galerkin-projected operator set. The projected step matrix and mass matrix
/// are dense n_r x n_r and factorized once; the stiffness and damping-side
/// products stay tall since the running vectors remain full-dimensional.
struct ReducedOperators {
    Mat basis;   // copy of the projection basis
    Mat Mhat1_r; // r^T Mhat1 r
    Mat Mhat0_r; // r^T Mhat0 r
    Mat M_r;     // r^T M r
    Mat K_r;     // K r
    Mat Chat0_r; // Chat0 r
    Eigen::LLT<Mat> Mhat1_r_llt;
    Eigen::LLT<Mat> M_r_llt;
};

ReducedOperators project_operators(const SystemMatrices& sys, const EffectiveOperators& eff,
                                   const ReducedBasis& basis);

struct ReducedAdjoint {
    std::vector<Vec> coords; // generalized coordinates, n_r per step
    std::vector<Vec> lifted; // basis * coords, n_free per step
};

/// Backward sweep in the reduced space; right-hand sides are projected while
/// the running vectors are kept full-dimensional.
ReducedAdjoint solve_adjoint_reduced(const ReducedOperators& red,
                                     const std::vector<Vec>& partials, const TimeGrid& grid,
                                     const HHTParams& hht);

struct ResidualHistory {
    std::vector<Vec> R; // defect of the full-order recursion at the lifted solution
    Vec norms;          // per-step 2-norms, length n_steps+1
};

ResidualHistory compute_residuals(const SystemMatrices& sys, const EffectiveOperators& eff,
                                  const std::vector<Vec>& lifted,
                                  const std::vector<Vec>& partials, const TimeGrid& grid,
                                  const HHTParams& hht);

/// Summed per-step error norms between two step sequences.
double summed_error(const std::vector<Vec>& a, const std::vector<Vec>& b);

enum class ErrorOracle { True, Fnn, GainBaseline };

struct GreedyConfig {
    double tol = 1e-3; // on the summed per-step error norms
    int max_basis = 30;
    ErrorOracle oracle = ErrorOracle::True;
    std::uint64_t seed = 42;
    const FeedforwardNet* error_model = nullptr; // required for ErrorOracle::Fnn
    const GainTable* gain_table = nullptr;       // required for ErrorOracle::GainBaseline
};

/// Residual-norm / true-error-norm sequences harvested whenever the greedy
/// loop pays for a full adjoint solve.
struct TrainingPair {
    Vec residual_norms;
    Vec error_norms;
    int sample_index = -1;
    int basis_size = 0;
};

struct GreedyIteration {
    int basis_size = 0;
    double max_error = 0.0;
    int worst_sample = -1;
};

struct GreedyResult {
    ReducedBasis basis;
    std::vector<TrainingPair> pairs;
    std::vector<GreedyIteration> iterations;
    std::vector<int> enriched_samples;
    bool converged = false;
};

/// Offline basis construction: enrich with the first snapshot mode of the
/// worst-approximated sample until the error measure drops below tol.
GreedyResult greedy_offline(const ProblemDef& problem, const std::vector<Vec>& samples,
                            const GreedyConfig& config);

/// Little-endian binary matrix file: magic "RBM1", u64 rows, u64 cols, then
/// column-major float64 payload.
void write_matrix_rbm1(const std::string& path, const Mat& m);
Mat read_matrix_rbm1(const std::string& path);

} // namespace dynrb

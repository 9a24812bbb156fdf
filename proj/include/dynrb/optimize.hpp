#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dynrb/error_model.hpp"
#include "dynrb/mma.hpp"
#include "dynrb/problem.hpp"
#include "dynrb/rom.hpp"

namespace dynrb {

enum class ModelKind { Full, Reduced };

struct OptConfig {
    double volume_fraction = 0.5;
    int max_iterations = 100;
    double move_limit = 0.2;
    double tol_change = 0.01; // on the max elementwise design change
    double eps1 = 0.1;        // per-element change threshold of the trigger
    double eps2 = 0.005;      // allowed fraction of changed elements
    bool rom_enabled = false;
    int rom_fixed_dim = -1; // truncate the offline basis when >= 1
    ErrorOracle estimator = ErrorOracle::True; // offline greedy error measure
    MmaOptions mma;

    void validate() const;
};

struct OfflineArtifacts {
    ReducedBasis basis;
    std::optional<FeedforwardNet> error_model;
    std::optional<GainTable> gain_table;
};

struct OptIterationRecord {
    int iteration = 0; // 1-based
    double objective = 0.0;
    double volume_fraction = 0.0; // projected volume / total volume
    double max_change = 0.0;      // |b_next - b|_inf
    ModelKind model = ModelKind::Full;
    double adjoint_seconds = 0.0;
    double gradient_norm = 0.0;
};

struct OptResult {
    std::vector<OptIterationRecord> history;
    std::vector<Vec> iterates; // design evaluated at each iteration
    Vec final_design;
    bool converged = false;
};

/// Thrown when an iterate produces a non-finite objective; carries the
/// offending design so callers can persist it.
struct OptimizeAbort : std::runtime_error {
    Vec iterate;
    OptimizeAbort(const std::string& what, Vec b)
        : std::runtime_error(what), iterate(std::move(b)) {}
};

/// Reduced model iff the count of elements changing by at least eps1 stays
/// within a fraction eps2 of the design; no previous design means full.
ModelKind adaptive_model_select(const Vec& b, const Vec* b_prev, double eps1, double eps2);

/// Projected material fraction sum(v_e Vbar_e) / sum(v_e).
double projected_volume_fraction(const ProblemDef& problem, const Vec& physical_density);

/// Largest uniform density with a feasible projected volume.
Vec feasible_uniform_design(const ProblemDef& problem, double volume_fraction);

OptResult optimize(const ProblemDef& problem, const OptConfig& config,
                   const OfflineArtifacts* offline = nullptr);

/// Density fields harvested from a full-order optimization run, evenly
/// subsampled down to `count` (used to seed the offline phase).
std::vector<Vec> harvest_density_samples(const ProblemDef& problem, OptConfig config,
                                         int count, int harvest_iterations);

} // namespace dynrb

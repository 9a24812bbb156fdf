#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynrb/config.hpp"

namespace dynrb {

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

/// Forward transient analysis at the uniform starting design; writes
/// trajectory.csv, displacement_snapshots.rbm1 and summary.json.
void cmd_forward(const RunConfig& config, const CliOverrides& cli);

/// Adjoint-vs-central-difference gradient check on random elements; writes
/// gradcheck.csv and gradcheck.json. Returns the verdict at threshold 1e-4.
bool cmd_gradcheck(const RunConfig& config, int n_probes, double fd_step,
                   const CliOverrides& cli);

/// Offline phase: harvest the sample set, run the greedy basis construction,
/// train and persist the error model, the gain table and the basis.
void cmd_offline(const RunConfig& config, const CliOverrides& cli);

/// Online phase: full optimization run; with rom enabled the offline
/// artifacts are loaded from the output directory.
void cmd_optimize(const RunConfig& config, const CliOverrides& cli);

/// Render SVG plots from artifact directories.
void cmd_report(const std::vector<std::string>& artifact_dirs, const std::string& out_dir);

/// Canonical description of a problem, hashed into artifact sidecars so an
/// offline basis is not reused against a different problem.
std::string problem_signature(const ProblemDef& problem);

} // namespace dynrb

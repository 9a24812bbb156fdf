#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dynrb/error_model.hpp"
#include "dynrb/optimize.hpp"
#include "dynrb/problem.hpp"

namespace dynrb {

/// Invalid or malformed configuration; mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RomConfig {
    int sample_count = 12;       // size of the offline parameter set
    int harvest_iterations = 30; // full-order iterations the samples come from
    double tol = 1e-3;
    int max_basis = 30;
    ErrorOracle estimator = ErrorOracle::True;
    std::uint64_t seed = 42;
    int fnn_hidden = 32;
    double fnn_learning_rate = 0.1;
    int fnn_epochs = 4000;
    double fnn_holdout_fraction = 0.2;
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool vtk = true;
};

struct RunConfig {
    ProblemDef problem;
    RomConfig rom;
    OptConfig optimizer;
    OutputConfig output;
    std::uint64_t seed = 42;
};

/// Parse and validate a config file. Unknown keys are rejected with their
/// full key path; all physical quantities are SI.
RunConfig load_config_file(const std::string& path);
RunConfig parse_config_json(const std::string& text);

} // namespace dynrb

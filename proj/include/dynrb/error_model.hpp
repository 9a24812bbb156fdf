#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynrb/types.hpp"

namespace dynrb {

/// Per-feature standardization with a floored standard deviation.
struct Normalization {
    Vec mean;
    Vec stdev;

    Vec apply(const Vec& x) const;
    Vec invert(const Vec& y) const;
    static Normalization fit(const std::vector<Vec>& rows, double floor = 1e-12);
    static Normalization identity(int n);
};

/// Small dense feedforward regressor: saturating tanh hidden layers, linear
/// output, trained by full-batch steepest descent on the squared error.
struct FeedforwardNet {
    std::vector<int> layer_sizes;
    std::vector<Mat> weights; // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Vec> biases;
    Normalization in_norm, out_norm;

    int parameter_count() const;
};

FeedforwardNet make_fnn(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Raw network map (no normalization, no clamping).
Vec fnn_forward(const FeedforwardNet& net, const Vec& x);

/// Normalized prediction path: standardize, map, de-standardize, clamp at 0.
Vec fnn_predict(const FeedforwardNet& net, const Vec& x);

/// Mean squared error over pairs plus its gradient in the raw (normalized)
/// space. Exposed so the backpropagation can be checked independently.
double fnn_loss_and_gradient(const FeedforwardNet& net, const std::vector<Vec>& inputs,
                             const std::vector<Vec>& targets, std::vector<Mat>& grad_w,
                             std::vector<Vec>& grad_b);

struct ErrorTrainingSet {
    std::vector<Vec> inputs;  // residual-norm sequences
    std::vector<Vec> targets; // true-error-norm sequences
};

struct TrainOptions {
    double learning_rate = 0.1;
    int epochs = 4000;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 1;
};

struct TrainReport {
    std::vector<double> loss_history; // training MSE per epoch, normalized space
    double holdout_rmse = 0.0;        // denormalized
    double holdout_r2 = 0.0;          // NaN when the holdout targets are constant
    int n_train = 0;
    int n_holdout = 0;
};

TrainReport fnn_train(FeedforwardNet& net, const ErrorTrainingSet& data,
                      const TrainOptions& opts);

/// Per-step Euclidean norms of full - lifted.
Vec true_error_norms(const std::vector<Vec>& full, const std::vector<Vec>& lifted);

/// Stored worst-case error/residual ratios per offline parameter point.
struct GainTable {
    std::vector<Vec> params;
    std::vector<double> lambdas;
};

/// max over steps of error/residual with 0/0 -> 0.
double gain_lambda(const Vec& error_norms, const Vec& residual_norms);

/// Nearest stored parameter by Euclidean distance; ties -> lowest index.
int nearest_param(const GainTable& table, const Vec& b);

Vec gain_baseline_estimate(const GainTable& table, const Vec& b,
                           const Vec& residual_norms);

struct RegressionMetrics {
    double rmse = 0.0;
    double r2 = 0.0; // NaN when the true sequence is constant
};

RegressionMetrics regression_metrics(const Vec& truth, const Vec& pred);

void save_fnn_json(const std::string& path, const FeedforwardNet& net,
                   const TrainReport* report = nullptr);
FeedforwardNet load_fnn_json(const std::string& path);

void save_gain_table_json(const std::string& path, const GainTable& table);
GainTable load_gain_table_json(const std::string& path);

} // namespace dynrb

#include "dynrb/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace dynrb {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw, identical across standard library implementations
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Vec Normalization::apply(const Vec& x) const {
    return (x - mean).cwiseQuotient(stdev);
}

Vec Normalization::invert(const Vec& y) const {
    return y.cwiseProduct(stdev) + mean;
}

Normalization Normalization::fit(const std::vector<Vec>& rows, double floor) {
    if (rows.empty()) throw std::invalid_argument("normalization: empty data");
    const Eigen::Index n = rows.front().size();
    Normalization nz;
    nz.mean = Vec::Zero(n);
    for (const Vec& r : rows) nz.mean += r;
    nz.mean /= static_cast<double>(rows.size());
    Vec var = Vec::Zero(n);
    for (const Vec& r : rows) var += (r - nz.mean).cwiseAbs2();
    var /= static_cast<double>(rows.size());
    nz.stdev = var.cwiseSqrt().cwiseMax(floor);
    return nz;
}

Normalization Normalization::identity(int n) {
    return {Vec::Zero(n), Vec::Ones(n)};
}

int FeedforwardNet::parameter_count() const {
    int count = 0;
    for (size_t l = 0; l < weights.size(); ++l)
        count += static_cast<int>(weights[l].size() + biases[l].size());
    return count;
}

FeedforwardNet make_fnn(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("fnn: need at least input and output layers");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("fnn: layer sizes must be positive");

    FeedforwardNet net;
    net.layer_sizes = layer_sizes;
    std::mt19937_64 rng(seed);
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double scale = std::sqrt(1.0 / fan_in);
        Mat w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = (2.0 * uniform01(rng) - 1.0) * scale;
        net.weights.push_back(std::move(w));
        net.biases.push_back(Vec::Zero(fan_out));
    }
    net.in_norm = Normalization::identity(layer_sizes.front());
    net.out_norm = Normalization::identity(layer_sizes.back());
    return net;
}

Vec fnn_forward(const FeedforwardNet& net, const Vec& x) {
    if (x.size() != net.layer_sizes.front())
        throw std::invalid_argument("fnn: input dimension mismatch");
    Vec h = x;
    const size_t n_layers = net.weights.size();
    for (size_t l = 0; l < n_layers; ++l) {
        h = net.weights[l] * h + net.biases[l];
        if (l + 1 < n_layers) h = h.array().tanh().matrix();
    }
    return h;
}

Vec fnn_predict(const FeedforwardNet& net, const Vec& x) {
    Vec y = net.out_norm.invert(fnn_forward(net, net.in_norm.apply(x)));
    return y.cwiseMax(0.0);
}

double fnn_loss_and_gradient(const FeedforwardNet& net, const std::vector<Vec>& inputs,
                             const std::vector<Vec>& targets, std::vector<Mat>& grad_w,
                             std::vector<Vec>& grad_b) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw std::invalid_argument("fnn: bad training batch");
    const size_t n_layers = net.weights.size();
    grad_w.assign(n_layers, Mat());
    grad_b.assign(n_layers, Vec());
    for (size_t l = 0; l < n_layers; ++l) {
        grad_w[l] = Mat::Zero(net.weights[l].rows(), net.weights[l].cols());
        grad_b[l] = Vec::Zero(net.biases[l].size());
    }

    const double inv_count =
        1.0 / (static_cast<double>(inputs.size()) * net.layer_sizes.back());
    double loss = 0.0;
    std::vector<Vec> act(n_layers + 1);
    for (size_t s = 0; s < inputs.size(); ++s) {
        act[0] = inputs[s];
        for (size_t l = 0; l < n_layers; ++l) {
            Vec z = net.weights[l] * act[l] + net.biases[l];
            act[l + 1] = (l + 1 < n_layers) ? Vec(z.array().tanh().matrix()) : z;
        }
        const Vec err = act[n_layers] - targets[s];
        loss += err.squaredNorm() * inv_count;

        Vec delta = 2.0 * inv_count * err;
        for (size_t l = n_layers; l-- > 0;) {
            grad_w[l] += delta * act[l].transpose();
            grad_b[l] += delta;
            if (l > 0) {
                Vec back = net.weights[l].transpose() * delta;
                delta = back.cwiseProduct(
                    (1.0 - act[l].array().square()).matrix());
            }
        }
    }
    return loss;
}

TrainReport fnn_train(FeedforwardNet& net, const ErrorTrainingSet& data,
                      const TrainOptions& opts) {
    if (data.inputs.size() < 2 || data.inputs.size() != data.targets.size())
        throw std::invalid_argument("fnn_train: need at least two training pairs");
    if (opts.learning_rate <= 0.0)
        throw std::invalid_argument("fnn_train: learning rate must be positive");
    for (const Vec& x : data.inputs)
        if (x.size() != net.layer_sizes.front())
            throw std::invalid_argument("fnn_train: input dimension mismatch");
    for (const Vec& y : data.targets)
        if (y.size() != net.layer_sizes.back())
            throw std::invalid_argument("fnn_train: target dimension mismatch");

    const int n = static_cast<int>(data.inputs.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(opts.seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }
    int n_holdout = static_cast<int>(std::lround(opts.holdout_fraction * n));
    n_holdout = std::clamp(n_holdout, 0, n - 2);
    const int n_train = n - n_holdout;

    std::vector<Vec> train_in, train_out, hold_in, hold_out;
    for (int i = 0; i < n; ++i) {
        if (i < n_train) {
            train_in.push_back(data.inputs[order[i]]);
            train_out.push_back(data.targets[order[i]]);
        } else {
            hold_in.push_back(data.inputs[order[i]]);
            hold_out.push_back(data.targets[order[i]]);
        }
    }

    net.in_norm = Normalization::fit(train_in);
    net.out_norm = Normalization::fit(train_out);
    std::vector<Vec> xs, ys;
    for (int i = 0; i < n_train; ++i) {
        xs.push_back(net.in_norm.apply(train_in[i]));
        ys.push_back(net.out_norm.apply(train_out[i]));
    }

    TrainReport report;
    report.n_train = n_train;
    report.n_holdout = n_holdout;
    report.loss_history.reserve(opts.epochs);
    std::vector<Mat> gw;
    std::vector<Vec> gb;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        const double loss = fnn_loss_and_gradient(net, xs, ys, gw, gb);
        if (!std::isfinite(loss))
            throw std::runtime_error("fnn_train: non-finite loss at epoch " +
                                     std::to_string(epoch) +
                                     "; reduce the learning rate");
        report.loss_history.push_back(loss);
        for (size_t l = 0; l < net.weights.size(); ++l) {
            net.weights[l] -= opts.learning_rate * gw[l];
            net.biases[l] -= opts.learning_rate * gb[l];
        }
    }

    if (n_holdout > 0) {
        Vec truth(n_holdout * net.layer_sizes.back());
        Vec pred(truth.size());
        Eigen::Index at = 0;
        for (int i = 0; i < n_holdout; ++i) {
            const Vec p = fnn_predict(net, hold_in[i]);
            truth.segment(at, p.size()) = hold_out[i];
            pred.segment(at, p.size()) = p;
            at += p.size();
        }
        const auto metrics = regression_metrics(truth, pred);
        report.holdout_rmse = metrics.rmse;
        report.holdout_r2 = metrics.r2;
    } else {
        report.holdout_rmse = std::numeric_limits<double>::quiet_NaN();
        report.holdout_r2 = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

Vec true_error_norms(const std::vector<Vec>& full, const std::vector<Vec>& lifted) {
    if (full.size() != lifted.size())
        throw std::invalid_argument("true_error_norms: length mismatch");
    Vec norms(full.size());
    for (size_t i = 0; i < full.size(); ++i) norms[i] = (full[i] - lifted[i]).norm();
    return norms;
}

double gain_lambda(const Vec& error_norms, const Vec& residual_norms) {
    if (error_norms.size() != residual_norms.size())
        throw std::invalid_argument("gain_lambda: length mismatch");
    double lambda = 0.0;
    for (Eigen::Index i = 0; i < error_norms.size(); ++i) {
        // 0/0 counts as 0; a vanishing residual cannot bound anything anyway.
        if (residual_norms[i] > 0.0)
            lambda = std::max(lambda, error_norms[i] / residual_norms[i]);
    }
    return lambda;
}

int nearest_param(const GainTable& table, const Vec& b) {
    if (table.params.empty()) throw std::invalid_argument("gain table: empty");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < table.params.size(); ++i) {
        const double d = (table.params[i] - b).norm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

Vec gain_baseline_estimate(const GainTable& table, const Vec& b,
                           const Vec& residual_norms) {
    const double lambda = table.lambdas[nearest_param(table, b)];
    return lambda * residual_norms;
}

RegressionMetrics regression_metrics(const Vec& truth, const Vec& pred) {
    if (truth.size() != pred.size() || truth.size() < 2)
        throw std::invalid_argument("metrics: need equal lengths >= 2");
    RegressionMetrics m;
    const Vec res = truth - pred;
    m.rmse = std::sqrt(res.squaredNorm() / truth.size());
    const double mean = truth.mean();
    const double ss_tot = (truth.array() - mean).square().sum();
    m.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot
                        : std::numeric_limits<double>::quiet_NaN();
    return m;
}

namespace {

nlohmann::json vec_to_json(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vec vec_from_json(const nlohmann::json& arr) {
    Vec v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

} // namespace

void save_fnn_json(const std::string& path, const FeedforwardNet& net,
                   const TrainReport* report) {
    nlohmann::json j;
    j["layer_sizes"] = net.layer_sizes;
    j["weights"] = nlohmann::json::array();
    j["biases"] = nlohmann::json::array();
    for (size_t l = 0; l < net.weights.size(); ++l) {
        const Mat& w = net.weights[l];
        nlohmann::json flat = nlohmann::json::array();
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) flat.push_back(w(r, c));
        j["weights"].push_back(flat);
        j["biases"].push_back(vec_to_json(net.biases[l]));
    }
    j["input_mean"] = vec_to_json(net.in_norm.mean);
    j["input_std"] = vec_to_json(net.in_norm.stdev);
    j["output_mean"] = vec_to_json(net.out_norm.mean);
    j["output_std"] = vec_to_json(net.out_norm.stdev);
    if (report) {
        j["training"] = {{"epochs", report->loss_history.size()},
                         {"final_loss",
                          report->loss_history.empty() ? 0.0 : report->loss_history.back()},
                         {"holdout_rmse", report->holdout_rmse},
                         {"holdout_r2", report->holdout_r2},
                         {"n_train", report->n_train},
                         {"n_holdout", report->n_holdout}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

FeedforwardNet load_fnn_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    FeedforwardNet net;
    net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    const auto& ws = j.at("weights");
    const auto& bs = j.at("biases");
    for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        Mat w(net.layer_sizes[l + 1], net.layer_sizes[l]);
        const auto& flat = ws.at(l);
        size_t k = 0;
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = flat.at(k++);
        net.weights.push_back(std::move(w));
        net.biases.push_back(vec_from_json(bs.at(l)));
    }
    net.in_norm = {vec_from_json(j.at("input_mean")), vec_from_json(j.at("input_std"))};
    net.out_norm = {vec_from_json(j.at("output_mean")), vec_from_json(j.at("output_std"))};
    return net;
}

void save_gain_table_json(const std::string& path, const GainTable& table) {
    nlohmann::json j;
    j["lambdas"] = table.lambdas;
    j["params"] = nlohmann::json::array();
    for (const Vec& p : table.params) j["params"].push_back(vec_to_json(p));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

GainTable load_gain_table_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    GainTable table;
    table.lambdas = j.at("lambdas").get<std::vector<double>>();
    for (const auto& p : j.at("params")) table.params.push_back(vec_from_json(p));
    return table;
}

} // namespace dynrb

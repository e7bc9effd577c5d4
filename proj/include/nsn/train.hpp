#pragma once

// Losses, Adam, the mini-batch training loop, evaluation and gradient checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsn/data.hpp"
#include "nsn/model.hpp"
#include "nsn/oracle.hpp"

namespace nsn {

struct LossResult {
    double loss = 0.0;
    std::vector<double> dlogits;
};

/// -log softmax(logits)[label], stabilized by subtracting the max logit.
inline LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t label) {
    if (logits.empty()) throw std::invalid_argument("empty logits");
    if (label >= logits.size()) throw std::invalid_argument("label out of range");
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - peak);
    LossResult r;
    r.loss = std::log(sum) - (logits[label] - peak);
    r.dlogits.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) r.dlogits[k] = std::exp(logits[k] - peak) / sum;
    r.dlogits[label] -= 1.0;
    return r;
}

struct LogisticResult {
    double loss = 0.0;
    double dlogit = 0.0;
};

/// softplus(z) - y z with dloss/dz = sigmoid(z) - y.
inline LogisticResult logistic_loss(double logit, std::size_t label) {
    if (label > 1) throw std::invalid_argument("binary label must be 0 or 1");
    const double y = static_cast<double>(label);
    const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
    const double sigmoid = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                                        : std::exp(logit) / (1.0 + std::exp(logit));
    return {softplus - y * logit, sigmoid - y};
}

/// Logistic loss for a single-logit head, softmax cross-entropy otherwise.
inline LossResult classification_loss(std::span<const double> logits, std::size_t label) {
    if (logits.size() == 1) {
        const auto r = logistic_loss(logits[0], label);
        return {r.loss, {r.dlogit}};
    }
    return softmax_cross_entropy(logits, label);
}

struct AdamHyper {
    double lr = 1e-3;
    double b1 = 0.9;
    double b2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                      const AdamHyper& hyper) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw std::invalid_argument("adam_step: parameter, gradient and state sizes differ");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(hyper.b1, t);
    const double c2 = 1.0 - std::pow(hyper.b2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = hyper.b1 * state.m[i] + (1.0 - hyper.b1) * grads[i];
        state.v[i] = hyper.b2 * state.v[i] + (1.0 - hyper.b2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
}

struct EpochRecord {
    std::size_t epoch = 0; ///< 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    std::vector<LayerParams> layers;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
    std::vector<LayerParams> initial_layers; ///< snapshot before the first update
    std::vector<EpochRecord> epochs;

    friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainSchedule {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    AdamHyper adam;
    std::uint64_t seed = 0;
};

struct Evaluation {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

inline void check_compatible(const Network& net, const Dataset& ds, const std::string& what) {
    if (ds.empty()) throw DataError(what + " set is empty");
    if (ds.length != net.config().series_length)
        throw DataError(what + " series length " + std::to_string(ds.length) + " does not match model length " +
                        std::to_string(net.config().series_length));
    if (ds.num_classes != net.config().num_classes)
        throw DataError(what + " has " + std::to_string(ds.num_classes) + " classes, model expects " +
                        std::to_string(net.config().num_classes));
    ds.validate();
}

inline Evaluation evaluate(const Network& net, const Dataset& ds) {
    if (ds.empty()) throw DataError("cannot evaluate on an empty dataset");
    std::size_t hits = 0;
    double loss = 0.0;
    for (const auto& s : ds.samples) {
        const auto logits = forward(net, s.values).logits;
        loss += classification_loss(logits, s.label).loss;
        if (predict_from_logits(logits) == s.label) ++hits;
    }
    const double n = static_cast<double>(ds.size());
    return {static_cast<double>(hits) / n, loss / n};
}

struct TrainResult {
    Network net;
    TrainHistory history;
};

/// Mini-batch Adam on the mean batch loss. Shuffling is the only source of
/// randomness and is driven by schedule.seed. Per-epoch train loss/accuracy
/// are averaged over the forward passes made during that epoch.
inline TrainResult train(Network net, const Dataset& train_set, const Dataset& val_set,
                         const TrainSchedule& schedule,
                         const std::function<void(const EpochRecord&)>& on_epoch = {}) {
    check_compatible(net, train_set, "training");
    check_compatible(net, val_set, "validation");
    if (schedule.batch_size == 0) throw std::invalid_argument("batch size must be positive");

    TrainHistory history;
    history.initial_layers.assign(net.layers().begin(), net.layers().end());

    std::vector<double> params = pack_parameters(net);
    AdamState adam(params.size());
    std::mt19937_64 rng(schedule.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= schedule.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t start = 0; start < order.size(); start += schedule.batch_size) {
            const std::size_t stop = std::min(order.size(), start + schedule.batch_size);
            std::vector<double> grad(params.size(), 0.0);
            for (std::size_t k = start; k < stop; ++k) {
                const auto& s = train_set.samples[order[k]];
                auto fwd = forward(net, s.values);
                const auto loss = classification_loss(fwd.logits, s.label);
                loss_sum += loss.loss;
                if (predict_from_logits(fwd.logits) == s.label) ++hits;
                const auto g = pack_gradient(net, backward(net, std::move(fwd.cache), loss.dlogits));
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (auto& gi : grad) gi *= inv;
            adam_step(params, grad, adam, schedule.adam);
            unpack_parameters(net, params);
        }
        const auto val = evaluate(net, val_set);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train_set.size());
        rec.train_acc = static_cast<double>(hits) / static_cast<double>(train_set.size());
        rec.val_loss = val.mean_loss;
        rec.val_acc = val.accuracy;
        rec.layers.assign(net.layers().begin(), net.layers().end());
        if (on_epoch) on_epoch(rec);
        history.epochs.push_back(std::move(rec));
    }
    return {std::move(net), std::move(history)};
}

inline double sample_loss(const Network& net, const LabeledSeries& sample) {
    return classification_loss(forward(net, sample.values).logits, sample.label).loss;
}

struct GradCheckOptions {
    double epsilon = 1e-6;
    /// Denominator floor of the relative error as a fraction of max(1, |L|).
    /// Central differences cannot resolve gradients far below ~1e-10 |L|, so
    /// coordinates whose true gradient is ~0 are judged on absolute error.
    double scale_floor = 1e-3;
    /// Test hook: negates every d_beta2 before comparison.
    bool flip_beta2_sign = false;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    std::string worst_name;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t coordinates = 0;
};

inline double relative_error(double analytic, double numeric, double floor) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares backward() against central differences of the sample loss over
/// every trainable coordinate; reports the worst one.
inline GradCheckReport grad_check(const Network& net, const LabeledSeries& sample,
                                  const GradCheckOptions& opts = {}) {
    auto fwd = forward(net, sample.values);
    const auto loss = classification_loss(fwd.logits, sample.label);
    const double floor = opts.scale_floor * std::max(1.0, std::abs(loss.loss));
    Gradient g = backward(net, std::move(fwd.cache), loss.dlogits);
    if (opts.flip_beta2_sign)
        for (auto& lg : g.layers) lg.beta2 = -lg.beta2;
    const auto analytic = pack_gradient(net, g);

    Network probe = net;
    const auto params = pack_parameters(net);
    const auto numeric = fd_gradient(
        [&](std::span<const double> p) {
            unpack_parameters(probe, p);
            return sample_loss(probe, sample);
        },
        params, opts.epsilon);

    GradCheckReport report;
    report.coordinates = params.size();
    const auto names = parameter_names(net);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double err = relative_error(analytic[i], numeric[i], floor);
        if (i == 0 || err > report.max_rel_error) {
            report.max_rel_error = err;
            report.worst_index = i;
            report.worst_name = names[i];
            report.worst_analytic = analytic[i];
            report.worst_numeric = numeric[i];
        }
    }
    return report;
}

} // namespace nsn

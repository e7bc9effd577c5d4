#pragma once

// The full classifier: encode -> M layers -> |E| -> max pool -> linear head.
// BASELINE skips everything before the head and feeds the normalized series.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsn/encoder.hpp"
#include "nsn/field.hpp"
#include "nsn/layer.hpp"

namespace nsn {

enum class AblationMode { Full, DOnly, NOnly, Baseline };

inline std::string_view to_string(AblationMode mode) {
    switch (mode) {
    case AblationMode::Full: return "FULL";
    case AblationMode::DOnly: return "D_ONLY";
    case AblationMode::NOnly: return "N_ONLY";
    case AblationMode::Baseline: return "BASELINE";
    }
    return "?";
}

inline AblationMode parse_mode(std::string_view name) {
    if (name == "FULL") return AblationMode::Full;
    if (name == "D_ONLY") return AblationMode::DOnly;
    if (name == "N_ONLY") return AblationMode::NOnly;
    if (name == "BASELINE") return AblationMode::Baseline;
    throw std::invalid_argument("unknown ablation mode '" + std::string(name) + "'");
}

/// Which of (alpha, beta2, gamma) are trainable in a mode.
struct TrainableMask {
    bool alpha = true;
    bool beta2 = true;
    bool gamma = true;

    std::size_t count() const noexcept { return std::size_t{alpha} + beta2 + gamma; }
};

inline TrainableMask trainable_mask(AblationMode mode) {
    switch (mode) {
    case AblationMode::Full: return {true, true, true};
    case AblationMode::DOnly: return {true, true, false};
    case AblationMode::NOnly: return {false, false, true};
    case AblationMode::Baseline: return {false, false, false};
    }
    return {};
}

struct ModelConfig {
    std::size_t series_length = 0; ///< raw series length L
    std::size_t num_classes = 2;   ///< C
    std::size_t num_layers = 6;    ///< M, forced to 0 in BASELINE
    double delta_z = 1.0;
    PulseConfig pulse;
    AblationMode mode = AblationMode::Full;
    Normalization normalization = Normalization::MinMax;
    bool bias = false;
    double init_scale = 0.0; ///< 0: zero classifier init; otherwise U(-s, s)

    void validate() const {
        if (series_length == 0) throw std::invalid_argument("series length must be positive");
        if (num_classes < 2) throw std::invalid_argument("need at least two classes");
        if (mode != AblationMode::Baseline) {
            PropagationConfig{delta_z, num_layers}.validate();
            pulse.validate();
        }
        if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be >= 0");
    }

    /// A single logit for binary tasks, one per class otherwise.
    std::size_t num_logits() const noexcept { return num_classes == 2 ? 1 : num_classes; }
    std::size_t layer_count() const noexcept { return mode == AblationMode::Baseline ? 0 : num_layers; }
    std::size_t field_length() const noexcept { return pulse.pad_factor * series_length; }
};

class Network {
public:
    explicit Network(ModelConfig cfg, std::uint64_t init_seed = 0) : cfg_(std::move(cfg)) {
        cfg_.validate();
        layers_.assign(cfg_.layer_count(), LayerParams{});
        weights_.assign(cfg_.num_logits() * cfg_.series_length, 0.0);
        if (cfg_.bias) bias_.assign(cfg_.num_logits(), 0.0);
        if (cfg_.init_scale > 0.0) {
            std::mt19937_64 rng(init_seed);
            std::uniform_real_distribution<double> dist(-cfg_.init_scale, cfg_.init_scale);
            for (auto& w : weights_) w = dist(rng);
        }
        if (cfg_.layer_count() > 0) grid_ = angular_frequencies(cfg_.field_length());
    }

    const ModelConfig& config() const noexcept { return cfg_; }
    AblationMode mode() const noexcept { return cfg_.mode; }
    std::size_t num_logits() const noexcept { return cfg_.num_logits(); }
    std::size_t feature_length() const noexcept { return cfg_.series_length; }
    PropagationConfig propagation() const noexcept { return {cfg_.delta_z, cfg_.num_layers}; }
    const FrequencyGrid& grid() const noexcept { return grid_; }

    std::span<const LayerParams> layers() const noexcept { return layers_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> bias() const noexcept { return bias_; }

    double weight(std::size_t logit, std::size_t feature) const {
        return weights_[logit * cfg_.series_length + feature];
    }

    /// Sets a layer; frozen coordinates of the current mode are forced to 0.
    void set_layer(std::size_t i, LayerParams p) { layers_.at(i) = masked(p); }

    void set_weights(std::span<const double> w) {
        if (w.size() != weights_.size()) throw std::invalid_argument("classifier weight count mismatch");
        weights_.assign(w.begin(), w.end());
    }

    void set_bias(std::span<const double> b) {
        if (b.size() != bias_.size()) throw std::invalid_argument("classifier bias count mismatch");
        bias_.assign(b.begin(), b.end());
    }

    LayerParams masked(LayerParams p) const noexcept {
        const auto m = trainable_mask(cfg_.mode);
        if (!m.alpha) p.alpha = 0.0;
        if (!m.beta2) p.beta2 = 0.0;
        if (!m.gamma) p.gamma = 0.0;
        return p;
    }

    friend bool operator==(const Network& a, const Network& b) {
        return a.layers_ == b.layers_ && a.weights_ == b.weights_ && a.bias_ == b.bias_;
    }

private:
    ModelConfig cfg_;
    std::vector<LayerParams> layers_;
    std::vector<double> weights_; // row-major, num_logits x L
    std::vector<double> bias_;
    FrequencyGrid grid_;
};

/// Intermediates of one forward pass. Pass it (moved) to backward() once.
struct ForwardCache {
    std::vector<LayerCache> layers;
    ComplexField output;
    std::vector<std::size_t> argmax;
    std::vector<double> features; ///< classifier input
};

struct ForwardResult {
    std::vector<double> logits;
    ForwardCache cache;
};

struct Gradient {
    std::vector<LayerGrads> layers;
    std::vector<double> weights;
    std::vector<double> bias;
};

struct ParamCount {
    std::size_t embedding = 0;
    std::size_t classifier = 0;

    friend bool operator==(const ParamCount&, const ParamCount&) = default;
};

inline ParamCount param_count(const Network& net) {
    return {trainable_mask(net.mode()).count() * net.config().layer_count(),
            net.weights().size() + net.bias().size()};
}

/// Classifier input for a series: the pooled output amplitude, or the
/// normalized series itself in BASELINE.
inline ForwardResult forward(const Network& net, std::span<const double> x) {
    const auto& cfg = net.config();
    if (x.size() != cfg.series_length)
        throw std::invalid_argument("series length " + std::to_string(x.size()) + " does not match model length " +
                                    std::to_string(cfg.series_length));

    ForwardResult r;
    auto& cache = r.cache;
    std::vector<double> xn = normalize(x, cfg.normalization);
    if (cfg.mode == AblationMode::Baseline) {
        cache.features = std::move(xn);
    } else {
        ComplexField field = modulate(xn, cfg.pulse);
        const auto prop = net.propagation();
        cache.layers.reserve(net.layers().size());
        for (const auto& p : net.layers()) {
            auto [next, layer_cache] = layer_forward(field, net.masked(p), prop, net.grid());
            cache.layers.push_back(std::move(layer_cache));
            field = std::move(next);
        }
        auto pooled = max_pool(amplitude(field), cfg.pulse.pad_factor);
        cache.output = std::move(field);
        cache.features = std::move(pooled.values);
        cache.argmax = std::move(pooled.argmax);
    }

    const std::size_t len = cfg.series_length;
    r.logits.assign(net.num_logits(), 0.0);
    for (std::size_t j = 0; j < r.logits.size(); ++j) {
        double acc = net.bias().empty() ? 0.0 : net.bias()[j];
        for (std::size_t i = 0; i < len; ++i) acc += net.weight(j, i) * cache.features[i];
        r.logits[j] = acc;
    }
    return r;
}

/// Full gradient given dL/dlogits. Frozen coordinates come back as exact zeros.
inline Gradient backward(const Network& net, ForwardCache&& cache, std::span<const double> dlogits) {
    if (dlogits.size() != net.num_logits()) throw std::invalid_argument("dlogits length mismatch");
    const std::size_t len = net.feature_length();
    Gradient g;
    g.weights.assign(net.weights().size(), 0.0);
    for (std::size_t j = 0; j < dlogits.size(); ++j)
        for (std::size_t i = 0; i < len; ++i) g.weights[j * len + i] = dlogits[j] * cache.features[i];
    if (!net.bias().empty()) g.bias.assign(dlogits.begin(), dlogits.end());

    const auto layers = net.layers();
    g.layers.assign(layers.size(), LayerGrads{});
    if (layers.empty()) return g;

    std::vector<double> d_features(len, 0.0);
    for (std::size_t j = 0; j < dlogits.size(); ++j)
        for (std::size_t i = 0; i < len; ++i) d_features[i] += net.weight(j, i) * dlogits[j];

    const auto d_amp = max_pool_backward(cache.argmax, d_features, cache.output.size());
    ComplexField adjoint = amplitude_backward(cache.output, d_amp);
    const auto prop = net.propagation();
    const auto mask = trainable_mask(net.mode());
    for (std::size_t k = layers.size(); k-- > 0;) {
        auto step = layer_backward(cache.layers[k], net.masked(layers[k]), prop, net.grid(), adjoint);
        g.layers[k] = {mask.alpha ? step.grads.alpha : 0.0, mask.beta2 ? step.grads.beta2 : 0.0,
                       mask.gamma ? step.grads.gamma : 0.0};
        adjoint = std::move(step.adjoint_in);
    }
    cache = ForwardCache{};
    return g;
}

/// Binary: class 1 iff the logit is strictly positive. Multiclass: argmax,
/// ties to the lowest index.
inline std::size_t predict_from_logits(std::span<const double> logits) {
    if (logits.size() == 1) return logits[0] > 0.0 ? 1 : 0;
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

inline std::size_t predict(const Network& net, std::span<const double> x) {
    return predict_from_logits(forward(net, x).logits);
}

// Flattened view over trainable coordinates: per layer the unfrozen subset of
// (alpha, beta2, gamma) in that order, then classifier weights, then bias.

inline std::vector<double> pack_parameters(const Network& net) {
    const auto mask = trainable_mask(net.mode());
    std::vector<double> out;
    for (const auto& p : net.layers()) {
        if (mask.alpha) out.push_back(p.alpha);
        if (mask.beta2) out.push_back(p.beta2);
        if (mask.gamma) out.push_back(p.gamma);
    }
    out.insert(out.end(), net.weights().begin(), net.weights().end());
    out.insert(out.end(), net.bias().begin(), net.bias().end());
    return out;
}

inline void unpack_parameters(Network& net, std::span<const double> flat) {
    const auto mask = trainable_mask(net.mode());
    const auto pc = param_count(net);
    if (flat.size() != pc.embedding + pc.classifier) throw std::invalid_argument("parameter vector length mismatch");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        LayerParams p = net.layers()[i];
        if (mask.alpha) p.alpha = flat[pos++];
        if (mask.beta2) p.beta2 = flat[pos++];
        if (mask.gamma) p.gamma = flat[pos++];
        net.set_layer(i, p);
    }
    net.set_weights(flat.subspan(pos, net.weights().size()));
    pos += net.weights().size();
    net.set_bias(flat.subspan(pos));
}

inline std::vector<double> pack_gradient(const Network& net, const Gradient& g) {
    const auto mask = trainable_mask(net.mode());
    std::vector<double> out;
    for (const auto& lg : g.layers) {
        if (mask.alpha) out.push_back(lg.alpha);
        if (mask.beta2) out.push_back(lg.beta2);
        if (mask.gamma) out.push_back(lg.gamma);
    }
    out.insert(out.end(), g.weights.begin(), g.weights.end());
    out.insert(out.end(), g.bias.begin(), g.bias.end());
    return out;
}

inline std::vector<std::string> parameter_names(const Network& net) {
    const auto mask = trainable_mask(net.mode());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto idx = std::to_string(i);
        if (mask.alpha) out.push_back("layer[" + idx + "].alpha");
        if (mask.beta2) out.push_back("layer[" + idx + "].beta2");
        if (mask.gamma) out.push_back("layer[" + idx + "].gamma");
    }
    const std::size_t len = net.feature_length();
    for (std::size_t k = 0; k < net.weights().size(); ++k)
        out.push_back("W[" + std::to_string(k / len) + "][" + std::to_string(k % len) + "]");
    for (std::size_t k = 0; k < net.bias().size(); ++k) out.push_back("b[" + std::to_string(k) + "]");
    return out;
}

} // namespace nsn

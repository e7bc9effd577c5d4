#pragma once

// Input encoding (scale, super-Gaussian envelope, zero padding) and the
// readout used in front of the classifier (amplitude, max pooling).

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsn/field.hpp"

namespace nsn {

enum class Normalization { MinMax, ZScore };

struct PulseConfig {
    std::size_t pad_factor = 2;
    unsigned order = 3;  ///< super-Gaussian order m
    double width = 0.5;  ///< T0, half-width as a fraction of half the data window

    void validate() const {
        if (pad_factor < 1) throw std::invalid_argument("pad_factor must be >= 1");
        if (order < 1) throw std::invalid_argument("super-Gaussian order must be >= 1");
        if (!(width > 0.0 && width <= 1.0)) throw std::invalid_argument("pulse width must lie in (0, 1]");
    }
};

/// Min-max scaling to [0, 1]; a constant series maps to 0.5 everywhere.
inline std::vector<double> normalize(std::span<const double> x,
                                     Normalization kind = Normalization::MinMax) {
    if (x.empty()) throw std::invalid_argument("cannot normalize an empty series");
    std::vector<double> out(x.size());
    if (kind == Normalization::ZScore) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = sd > 0.0 ? (x[i] - mean) / sd : 0.0;
        return out;
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double range = *hi - *lo;
    if (range == 0.0) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *lo) / range;
    return out;
}

/// Envelope g[t] = exp(-1/2 ((t - c) / (T0 L / 2))^(2m)) over a window of length L.
inline std::vector<double> super_gaussian(std::size_t length, const PulseConfig& cfg) {
    std::vector<double> g(length);
    const double center = 0.5 * static_cast<double>(length - 1);
    const double half_width = cfg.width * 0.5 * static_cast<double>(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double u = (static_cast<double>(t) - center) / half_width;
        g[t] = std::exp(-0.5 * std::pow(u * u, static_cast<double>(cfg.order)));
    }
    return g;
}

/// Index of the first data sample inside the padded field.
inline std::size_t window_offset(std::size_t length, std::size_t pad_factor) {
    return (pad_factor * length - length) / 2;
}

/// Amplitude-modulates the series onto a super-Gaussian pulse centered in a
/// zero-padded field of length pad_factor * L. The result is purely real.
inline ComplexField modulate(std::span<const double> x_norm, const PulseConfig& cfg) {
    if (x_norm.empty()) throw std::invalid_argument("cannot modulate an empty series");
    cfg.validate();
    const std::size_t len = x_norm.size();
    const auto envelope = super_gaussian(len, cfg);
    ComplexField field(cfg.pad_factor * len);
    const std::size_t offset = window_offset(len, cfg.pad_factor);
    for (std::size_t t = 0; t < len; ++t) field[offset + t] = Complex(envelope[t] * x_norm[t], 0.0);
    return field;
}

inline std::vector<double> amplitude(const ComplexField& field) {
    std::vector<double> out(field.size());
    for (std::size_t t = 0; t < field.size(); ++t) out[t] = std::abs(field[t]);
    return out;
}

/// Maps dL/d|E| to dL/d(conj E). The modulus is not differentiable at zero;
/// zero samples receive a zero adjoint.
inline ComplexField amplitude_backward(const ComplexField& field, std::span<const double> d_amp) {
    if (d_amp.size() != field.size()) throw std::invalid_argument("amplitude adjoint length mismatch");
    ComplexField adj(field.size());
    for (std::size_t t = 0; t < field.size(); ++t) {
        const double r = std::abs(field[t]);
        if (r > 0.0) adj[t] = field[t] * (0.5 * d_amp[t] / r);
    }
    return adj;
}

struct Pooled {
    std::vector<double> values;
    std::vector<std::size_t> argmax; ///< source index of each pooled value
};

/// Non-overlapping max pooling with stride == kernel. Ties go to the lowest index.
inline Pooled max_pool(std::span<const double> v, std::size_t kernel) {
    if (kernel == 0) throw std::invalid_argument("pool kernel must be positive");
    if (v.size() % kernel != 0)
        throw std::invalid_argument("pool kernel " + std::to_string(kernel) +
                                    " does not divide length " + std::to_string(v.size()));
    Pooled out;
    const std::size_t m = v.size() / kernel;
    out.values.resize(m);
    out.argmax.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t best = j * kernel;
        for (std::size_t i = best + 1; i < (j + 1) * kernel; ++i)
            if (v[i] > v[best]) best = i;
        out.values[j] = v[best];
        out.argmax[j] = best;
    }
    return out;
}

inline std::vector<double> max_pool_backward(std::span<const std::size_t> argmax,
                                             std::span<const double> d_pooled, std::size_t length) {
    std::vector<double> d(length, 0.0);
    for (std::size_t j = 0; j < argmax.size(); ++j) d[argmax[j]] += d_pooled[j];
    return d;
}

} // namespace nsn

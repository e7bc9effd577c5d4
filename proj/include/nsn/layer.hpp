#pragma once

// One Nonlinear Schrodinger layer: a spectral dispersion/attenuation step D
// followed by a pointwise self-phase-modulation step N, plus the reverse pass.
//
// Adjoint convention: every adjoint field carries dL/d(conj E) for a real
// scalar loss L, so dL = 2 Re sum_t conj(g[t]) dE[t]. Parameter gradients are
// ordinary real derivatives.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "nsn/field.hpp"

namespace nsn {

/// Trainable coefficients of one layer. Signs are unconstrained.
struct LayerParams {
    double alpha = 0.0; ///< attenuation
    double beta2 = 0.0; ///< group-velocity dispersion
    double gamma = 0.0; ///< Kerr nonlinearity

    bool finite() const noexcept {
        return std::isfinite(alpha) && std::isfinite(beta2) && std::isfinite(gamma);
    }

    friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct PropagationConfig {
    double delta_z = 1.0;
    std::size_t num_layers = 6;

    void validate() const {
        if (!(delta_z > 0.0) || !std::isfinite(delta_z))
            throw std::invalid_argument("delta_z must be positive and finite");
        if (num_layers == 0) throw std::invalid_argument("num_layers must be at least 1");
    }
};

/// Fields kept from a forward pass for the matching backward pass.
struct LayerCache {
    ComplexField input;
    ComplexField dispersed; ///< after D, before N
};

struct LayerGrads {
    double alpha = 0.0;
    double beta2 = 0.0;
    double gamma = 0.0;
};

struct LayerAdjoint {
    ComplexField adjoint_in;
    LayerGrads grads;
};

namespace detail {

inline void require_same_length(const ComplexField& field, const FrequencyGrid& grid) {
    if (field.size() != grid.size())
        throw std::invalid_argument("field length " + std::to_string(field.size()) +
                                    " does not match frequency grid length " +
                                    std::to_string(grid.size()));
}

inline Complex dispersion_factor(double alpha, double beta2, double delta_z, double omega) {
    return std::exp(Complex(-0.5 * alpha * delta_z, -0.5 * beta2 * omega * omega * delta_z));
}

} // namespace detail

/// F^-1{ F{E} * exp(-alpha dz / 2 - i beta2 omega^2 dz / 2) }
inline ComplexField dispersion_step(const ComplexField& field, double alpha, double beta2,
                                    double delta_z, const FrequencyGrid& grid) {
    detail::require_same_length(field, grid);
    ComplexField spectrum = dft(field);
    for (std::size_t k = 0; k < spectrum.size(); ++k)
        spectrum[k] *= detail::dispersion_factor(alpha, beta2, delta_z, grid[k]);
    return idft(spectrum);
}

/// E * exp(i gamma |E|^2 dz). Leaves |E| unchanged.
inline ComplexField nonlinear_step(const ComplexField& field, double gamma, double delta_z) {
    ComplexField out(field.size());
    for (std::size_t t = 0; t < field.size(); ++t) {
        const double phase = gamma * std::norm(field[t]) * delta_z;
        out[t] = field[t] * std::polar(1.0, phase);
    }
    return out;
}

inline std::pair<ComplexField, LayerCache> layer_forward(const ComplexField& field,
                                                         const LayerParams& p,
                                                         const PropagationConfig& cfg,
                                                         const FrequencyGrid& grid) {
    if (!p.finite()) throw std::domain_error("layer parameters must be finite");
    ComplexField dispersed = dispersion_step(field, p.alpha, p.beta2, cfg.delta_z, grid);
    ComplexField out = nonlinear_step(dispersed, p.gamma, cfg.delta_z);
    return {std::move(out), LayerCache{field, std::move(dispersed)}};
}

/// Reverse pass through one layer given dL/d(conj E_out).
inline LayerAdjoint layer_backward(const LayerCache& cache, const LayerParams& p,
                                   const PropagationConfig& cfg, const FrequencyGrid& grid,
                                   const ComplexField& adjoint_out) {
    const ComplexField& a = cache.dispersed;
    const std::size_t n = a.size();
    if (adjoint_out.size() != n || cache.input.size() != n)
        throw std::invalid_argument("adjoint length does not match the cached layer fields");
    detail::require_same_length(a, grid);
    const double dz = cfg.delta_z;

    // N: b = a exp(i phi), phi = gamma dz |a|^2.
    //   dL/dgamma = -2 dz sum |a|^2 Im(conj(g_b) b)
    //   g_a = g_b exp(-i phi) - 2 gamma dz Im(conj(g_b) b) a
    LayerGrads grads;
    ComplexField adj_a(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double power = std::norm(a[t]);
        const Complex rot = std::polar(1.0, p.gamma * power * dz);
        const Complex b = a[t] * rot;
        const double coupling = std::imag(std::conj(adjoint_out[t]) * b);
        grads.gamma += -2.0 * dz * power * coupling;
        adj_a[t] = adjoint_out[t] * std::conj(rot) - 2.0 * p.gamma * dz * coupling * a[t];
    }

    // D: spectral multiplier H; its adjoint is conj(H). Parameter terms use
    // sum_t conj(g[t]) (F^-1 X)[t] = (1/n) sum_k conj(G[k]) X[k].
    const ComplexField adj_spec = dft(adj_a);
    const ComplexField out_spec = dft(a);
    ComplexField back_spec(n);
    double re_acc = 0.0;
    double beta_acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Complex overlap = std::conj(adj_spec[k]) * out_spec[k];
        re_acc += overlap.real();
        beta_acc += grid[k] * grid[k] * overlap.imag();
        back_spec[k] = std::conj(detail::dispersion_factor(p.alpha, p.beta2, dz, grid[k])) * adj_spec[k];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    grads.alpha = -dz * inv_n * re_acc;
    grads.beta2 = dz * inv_n * beta_acc;

    return {idft(back_spec), grads};
}

} // namespace nsn

#pragma once

// Independent checks used by the test suites and the gradcheck command.

#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsn/field.hpp"
#include "nsn/layer.hpp"

namespace nsn {

/// Integrates each layer's distance delta_z as `substeps` alternating D/N
/// steps of length delta_z / substeps. substeps == 1 is the production layer.
inline ComplexField fine_step_propagate(const ComplexField& input, std::span<const LayerParams> layers,
                                        double delta_z, std::size_t substeps) {
    if (substeps == 0) throw std::invalid_argument("substeps must be >= 1");
    if (input.empty()) throw std::invalid_argument("empty field");
    const FrequencyGrid grid = angular_frequencies(input.size());
    const double h = delta_z / static_cast<double>(substeps);
    ComplexField field = input;
    for (const auto& p : layers) {
        for (std::size_t k = 0; k < substeps; ++k) {
            field = dispersion_step(field, p.alpha, p.beta2, h, grid);
            field = nonlinear_step(field, p.gamma, h);
        }
    }
    return field;
}

/// Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) per coordinate.
template <typename Fn>
    requires std::invocable<Fn&, std::span<const double>>
std::vector<double> fd_gradient(Fn&& f, std::span<const double> params, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + epsilon;
        const double up = f(std::span<const double>(p));
        p[i] = saved - epsilon;
        const double down = f(std::span<const double>(p));
        p[i] = saved;
        grad[i] = (up - down) / (2.0 * epsilon);
    }
    return grad;
}

} // namespace nsn

#pragma once

// Complex 1-D fields, the DFT pair used by the dispersion operator, and the
// matching angular-frequency grid.
//
// Conventions: unit sample spacing, unnormalized forward transform
// X[k] = sum_t x[t] exp(-2 pi i k t / n), inverse carries the 1/n factor.

#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <fftw3.h>

namespace nsn {

using Complex = std::complex<double>;

/// Samples E(t) of a propagating field at one depth of the layer cascade.
class ComplexField {
public:
    ComplexField() = default;
    explicit ComplexField(std::size_t n) : samples_(n) {}
    explicit ComplexField(std::vector<Complex> samples) : samples_(std::move(samples)) {}

    static ComplexField from_real(std::span<const double> values) {
        ComplexField f(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) f.samples_[i] = Complex(values[i], 0.0);
        return f;
    }

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }

    Complex& operator[](std::size_t i) { return samples_[i]; }
    const Complex& operator[](std::size_t i) const { return samples_[i]; }

    Complex* data() noexcept { return samples_.data(); }
    const Complex* data() const noexcept { return samples_.data(); }

    auto begin() noexcept { return samples_.begin(); }
    auto end() noexcept { return samples_.end(); }
    auto begin() const noexcept { return samples_.begin(); }
    auto end() const noexcept { return samples_.end(); }

    std::span<const Complex> samples() const noexcept { return samples_; }
    std::span<Complex> samples() noexcept { return samples_; }

    bool all_finite() const noexcept {
        for (const auto& z : samples_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    friend bool operator==(const ComplexField&, const ComplexField&) = default;

private:
    std::vector<Complex> samples_;
};

/// Angular frequencies (radians per sample) in DFT bin order.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {}

    std::size_t size() const noexcept { return omega_.size(); }
    double operator[](std::size_t k) const { return omega_[k]; }
    std::span<const double> values() const noexcept { return omega_; }

private:
    std::vector<double> omega_;
};

namespace detail {

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe, execution with the new-array interface
// is. Plans are made once per length with FFTW_ESTIMATE (deterministic) and
// FFTW_UNALIGNED so results do not depend on buffer alignment.
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    const FftPlans& plans(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) return it->second;

        fftw_complex* in = fftw_alloc_complex(n);
        fftw_complex* out = fftw_alloc_complex(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        const int len = static_cast<int>(n);
        FftPlans p;
        p.forward = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
        p.backward = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
        fftw_free(in);
        fftw_free(out);
        if (p.forward == nullptr || p.backward == nullptr)
            throw std::runtime_error("FFTW failed to create a plan");
        return plans_.emplace(n, p).first->second;
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

    ~FftPlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }

private:
    FftPlanCache() = default;

    std::mutex mutex_;
    std::unordered_map<std::size_t, FftPlans> plans_;
};

inline void execute_plan(fftw_plan plan, const ComplexField& in, ComplexField& out) {
    // Out-of-place complex transforms leave the input untouched.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, src, dst);
}

} // namespace detail

/// Unnormalized forward DFT.
inline ComplexField dft(const ComplexField& field) {
    if (field.empty()) throw std::invalid_argument("empty field");
    ComplexField out(field.size());
    detail::execute_plan(detail::FftPlanCache::instance().plans(field.size()).forward, field, out);
    return out;
}

/// Inverse DFT including the 1/n factor.
inline ComplexField idft(const ComplexField& spectrum) {
    if (spectrum.empty()) throw std::invalid_argument("empty field");
    ComplexField out(spectrum.size());
    detail::execute_plan(detail::FftPlanCache::instance().plans(spectrum.size()).backward, spectrum, out);
    const double scale = 1.0 / static_cast<double>(spectrum.size());
    for (auto& z : out) z *= scale;
    return out;
}

/// omega[k] = 2 pi k / n for k <= n/2, and 2 pi (k - n) / n above that.
/// The Nyquist bin of an even-length grid is +pi.
inline FrequencyGrid angular_frequencies(std::size_t n) {
    if (n == 0) throw std::invalid_argument("frequency grid needs at least one sample");
    std::vector<double> omega(n);
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double bin = (2 * k <= n) ? static_cast<double>(k) : static_cast<double>(k) - dn;
        omega[k] = 2.0 * std::numbers::pi * bin / dn;
    }
    return FrequencyGrid(std::move(omega));
}

inline double l2_norm_sq(const ComplexField& field) noexcept {
    double acc = 0.0;
    for (const auto& z : field) acc += std::norm(z);
    return acc;
}

} // namespace nsn

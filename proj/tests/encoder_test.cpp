#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "nsn/encoder.hpp"
#include "test_support.hpp"

namespace nsn {
namespace {

using testing::random_series;

TEST(Normalize, MinMaxExamples) {
    EXPECT_EQ(normalize(std::vector<double>{1, 3}), (std::vector<double>{0, 1}));
    EXPECT_EQ(normalize(std::vector<double>{5, 5, 5}), (std::vector<double>{0.5, 0.5, 0.5}));
    EXPECT_EQ(normalize(std::vector<double>{-2, 0, 2}), (std::vector<double>{0, 0.5, 1}));
}

TEST(Normalize, EmptySeriesThrows) {
    EXPECT_THROW(normalize(std::vector<double>{}), std::invalid_argument);
}

TEST(Normalize, ZScoreHasZeroMeanUnitVariance) {
    const auto z = normalize(std::vector<double>{1, 2, 3, 4}, Normalization::ZScore);
    double mean = 0.0, var = 0.0;
    for (double v : z) mean += v / 4.0;
    for (double v : z) var += (v - mean) * (v - mean) / 4.0;
    EXPECT_NEAR(mean, 0.0, 1e-15);
    EXPECT_NEAR(var, 1.0, 1e-14);
}

TEST(Modulate, PaddingLayoutIsSymmetric) {
    const auto f = modulate(std::vector<double>{1, 1, 1, 1}, PulseConfig{});
    ASSERT_EQ(f.size(), 8u);
    for (std::size_t t : {0u, 1u, 6u, 7u}) EXPECT_EQ(f[t], Complex(0.0, 0.0)) << t;
    for (std::size_t t = 2; t < 6; ++t) EXPECT_GT(f[t].real(), 0.0) << t;
}

TEST(Modulate, FlatTopLimit) {
    PulseConfig cfg;
    cfg.width = 1.0;
    cfg.order = 5000;
    const std::size_t len = 64;
    const auto f = modulate(std::vector<double>(len, 1.0), cfg);
    const std::size_t off = window_offset(len, cfg.pad_factor);
    for (std::size_t t = 0; t < len; ++t) EXPECT_NEAR(f[off + t].real(), 1.0, 1e-12) << t;
    for (std::size_t t = 0; t < off; ++t) EXPECT_EQ(f[t], Complex(0.0, 0.0));
    for (std::size_t t = off + len; t < f.size(); ++t) EXPECT_EQ(f[t], Complex(0.0, 0.0));
}

TEST(Modulate, OutputIsRealNonnegativeWithZeroPadEnergy) {
    std::mt19937_64 rng(3);
    for (std::size_t pad : {1u, 2u, 3u}) {
        PulseConfig cfg;
        cfg.pad_factor = pad;
        const std::size_t len = 101;
        const auto f = modulate(normalize(random_series(len, rng)), cfg);
        ASSERT_EQ(f.size(), pad * len);
        const std::size_t off = window_offset(len, pad);
        double pad_energy = 0.0;
        for (std::size_t t = 0; t < f.size(); ++t) {
            EXPECT_EQ(f[t].imag(), 0.0);
            EXPECT_GE(f[t].real(), 0.0);
            if (t < off || t >= off + len) pad_energy += std::norm(f[t]);
        }
        EXPECT_EQ(pad_energy, 0.0);
    }
}

TEST(Modulate, CenterHoldsEnvelopeTimesSeries) {
    const std::vector<double> x{0.0, 0.25, 0.5, 1.0, 0.75};
    const PulseConfig cfg;
    const auto g = super_gaussian(x.size(), cfg);
    const auto f = modulate(x, cfg);
    const std::size_t off = window_offset(x.size(), cfg.pad_factor);
    for (std::size_t t = 0; t < x.size(); ++t) EXPECT_EQ(f[off + t].real(), g[t] * x[t]);
}

TEST(Modulate, InvalidPulseThrows) {
    PulseConfig cfg;
    cfg.width = 0.0;
    EXPECT_THROW(modulate(std::vector<double>{1.0}, cfg), std::invalid_argument);
    EXPECT_THROW(modulate(std::vector<double>{}, PulseConfig{}), std::invalid_argument);
}

TEST(Amplitude, Modulus) {
    ComplexField f(3);
    f[0] = Complex(3, 4);
    f[1] = Complex(-2, 0);
    f[2] = Complex(0, 0);
    EXPECT_EQ(amplitude(f), (std::vector<double>{5, 2, 0}));
}

TEST(Amplitude, BackwardMatchesDefinitionAndZeroAtOrigin) {
    ComplexField f(2);
    f[0] = Complex(3, 4);
    const auto adj = amplitude_backward(f, std::vector<double>{2.0, 7.0});
    EXPECT_NEAR(std::abs(adj[0] - Complex(0.6, 0.8)), 0.0, 1e-15);
    EXPECT_EQ(adj[1], Complex(0.0, 0.0));
}

TEST(MaxPool, Examples) {
    const auto p = max_pool(std::vector<double>{1, 3, 2, 5}, 2);
    EXPECT_EQ(p.values, (std::vector<double>{3, 5}));
    EXPECT_EQ(p.argmax, (std::vector<std::size_t>{1, 3}));
    const std::vector<double> v{4, -1, 2};
    EXPECT_EQ(max_pool(v, 1).values, v);
}

TEST(MaxPool, KernelMustDivideLength) {
    EXPECT_THROW(max_pool(std::vector<double>{1, 2, 3}, 2), std::invalid_argument);
    EXPECT_THROW(max_pool(std::vector<double>{1, 2}, 0), std::invalid_argument);
}

TEST(MaxPool, TiesGoToLowestIndex) {
    EXPECT_EQ(max_pool(std::vector<double>{2, 2, 7, 7}, 2).argmax, (std::vector<std::size_t>{0, 2}));
}

TEST(MaxPool, PadFactorKernelRestoresSeriesLength) {
    std::mt19937_64 rng(5);
    for (std::size_t pad : {1u, 2u, 4u})
        for (std::size_t len : {1u, 7u, 500u, 1024u}) {
            PulseConfig cfg;
            cfg.pad_factor = pad;
            const auto f = modulate(normalize(random_series(len, rng)), cfg);
            EXPECT_EQ(max_pool(amplitude(f), pad).values.size(), len);
        }
}

TEST(MaxPool, Monotone) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_series(24, rng);
        auto w = v;
        const auto bump = random_series(24, rng, 0.0, 1.0);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += bump[i];
        const auto pv = max_pool(v, 3).values;
        const auto pw = max_pool(w, 3).values;
        for (std::size_t j = 0; j < pv.size(); ++j) EXPECT_LE(pv[j], pw[j]);
    }
}

TEST(MaxPool, BackwardRoutesToArgmax) {
    const auto p = max_pool(std::vector<double>{1, 3, 5, 2}, 2);
    EXPECT_EQ(max_pool_backward(p.argmax, std::vector<double>{10, 20}, 4), (std::vector<double>{0, 10, 20, 0}));
}

} // namespace
} // namespace nsn

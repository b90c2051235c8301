#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "aimc/codes.hpp"

using namespace aimc;

namespace {

constexpr double pi = std::numbers::pi;

// Brute-force aperiodic autocorrelation magnitudes for lags 0..N-1.
std::vector<double> acf(const std::vector<double>& phases) {
    const std::size_t n = phases.size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0;
        for (std::size_t i = 0; i + k < n; ++i) s += std::polar(1.0, phases[i + k] - phases[i]);
        out[k] = std::abs(s);
    }
    return out;
}

double max_sidelobe(const std::vector<double>& phases) {
    const auto a = acf(phases);
    return *std::max_element(a.begin() + 1, a.end());
}

std::vector<long> quantized_multiset(const std::vector<double>& phases, double unit) {
    std::vector<long> q;
    for (double p : phases) q.push_back(std::lround(wrap_2pi(p) / unit) % std::lround(2 * pi / unit));
    std::sort(q.begin(), q.end());
    return q;
}

}  // namespace

TEST(Barker, AllVariantsHaveUnitSidelobes) {
    const std::vector<std::pair<std::string, std::size_t>> variants{
        {"BARKER_2_1", 2}, {"BARKER_2_2", 2}, {"BARKER_3", 3}, {"BARKER_4_1", 4}, {"BARKER_4_2", 4},
        {"BARKER_5", 5},   {"BARKER_7", 7},   {"BARKER_11", 11}, {"BARKER_13", 13}};
    for (const auto& [id, len] : variants) {
        const auto code = barker(id);
        ASSERT_EQ(code.length(), len) << id;
        const auto a = acf(code.phases_rad);
        EXPECT_NEAR(a[0], double(len), 1e-12) << id;
        EXPECT_LE(max_sidelobe(code.phases_rad), 1.0 + 1e-12) << id;
    }
}

TEST(Barker, ThirteenHasPeakThirteenSidelobeOne) {
    const auto a = acf(barker("BARKER_13").phases_rad);
    EXPECT_NEAR(a[0], 13.0, 1e-12);
    EXPECT_NEAR(*std::max_element(a.begin() + 1, a.end()), 1.0, 1e-12);
}

TEST(Barker, FiveHasRatioFive) {
    const auto a = acf(barker("BARKER_5").phases_rad);
    EXPECT_NEAR(a[0] / *std::max_element(a.begin() + 1, a.end()), 5.0, 1e-12);
}

TEST(Barker, LengthTwoVariantsDiffer) {
    const auto a = barker("BARKER_2_1").phases_rad;
    const auto b = barker("BARKER_2_2").phases_rad;
    EXPECT_NE(a, b);
    EXPECT_EQ(std::count(a.begin(), a.end(), 0.0) + std::count(b.begin(), b.end(), 0.0), 3);
}

TEST(Barker, UnknownIdThrows) { EXPECT_THROW(barker("BARKER_6"), SynthesisError); }

TEST(Frank, OrderTwo) {
    const auto f = frank(2).phases_rad;
    ASSERT_EQ(f.size(), 4u);
    EXPECT_NEAR(f[0], 0, 1e-12);
    EXPECT_NEAR(f[1], 0, 1e-12);
    EXPECT_NEAR(f[2], 0, 1e-12);
    EXPECT_NEAR(wrap_2pi(f[3]), pi, 1e-12);
}

TEST(Frank, OrderFourSecondRow) {
    const auto f = frank(4).phases_rad;
    const double expect[] = {0, pi / 2, pi, 3 * pi / 2};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(wrap_2pi(f[4 + j]), expect[j], 1e-12);
}

TEST(Polyphase, LengthsAndLowSidelobes) {
    for (int m : {4, 6, 8}) {
        const int n = m * m;
        EXPECT_EQ(frank(m).length(), std::size_t(n));
        EXPECT_EQ(p1(m).length(), std::size_t(n));
        EXPECT_EQ(p2(m).length(), std::size_t(n));
        // Polyphase codes of these lengths keep sidelobes well below the peak.
        for (const auto& c : {frank(m), p1(m), p2(m), p3(n), p4(n)}) EXPECT_LT(max_sidelobe(c.phases_rad), 0.25 * n);
    }
}

TEST(Polyphase, P3AndFrankOrderingsDiffer) {
    const auto a = p3(16).phases_rad;
    const auto b = frank(4).phases_rad;
    bool same_order = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(wrap_pi(a[i] - b[i])) > 1e-9) same_order = false;
    EXPECT_FALSE(same_order);
}

TEST(Polyphase, P3AndFrankPhaseMultisetsAtSixteen) {
    // Frank(4) uses multiples of pi/2; P3(16) = pi*i^2/16 reaches odd multiples of pi/16.
    const auto f = quantized_multiset(frank(4).phases_rad, pi / 16);
    const auto p = quantized_multiset(p3(16).phases_rad, pi / 16);
    EXPECT_TRUE(std::all_of(f.begin(), f.end(), [](long v) { return v % 8 == 0; }));
    EXPECT_FALSE(std::all_of(p.begin(), p.end(), [](long v) { return v % 8 == 0; }));
    EXPECT_NE(f, p);
}

TEST(Polyphase, P4IsP3MinusLinearTerm) {
    const auto a = p3(25).phases_rad;
    const auto b = p4(25).phases_rad;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(wrap_pi(a[i] - b[i] - pi * double(i)), 0, 1e-9);
}

TEST(Costas, WelchElevenTwo) {
    const auto c = welch_costas(11, 2).hop_indices;
    std::vector<int> one_based;
    for (int h : c) one_based.push_back(h + 1);
    EXPECT_EQ(one_based, (std::vector<int>{2, 4, 8, 5, 10, 9, 7, 3, 6, 1}));
    EXPECT_TRUE(is_costas(c));
}

TEST(Costas, NonPrimitiveRootRejected) { EXPECT_THROW(welch_costas(11, 3), SynthesisError); }

TEST(Costas, SeededArraysArePermutationsAndCostas) {
    for (int order : {3, 4, 5, 6, 7, 9, 10, 12}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            auto hops = costas(order, seed).hop_indices;
            ASSERT_EQ(hops.size(), std::size_t(order));
            EXPECT_TRUE(is_costas(hops)) << order << "/" << seed;
            std::reverse(hops.begin(), hops.end());
            EXPECT_TRUE(is_costas(hops));
            std::sort(hops.begin(), hops.end());
            for (int i = 0; i < order; ++i) EXPECT_EQ(hops[static_cast<std::size_t>(i)], i);
        }
    }
}

TEST(Costas, DetectsRepeatedDisplacement) {
    const std::vector<int> identity{0, 1, 2, 3};
    EXPECT_FALSE(is_costas(identity));
    const std::vector<int> not_perm{0, 0, 1};
    EXPECT_FALSE(is_costas(not_perm));
}

TEST(Wrap, Ranges) {
    EXPECT_NEAR(wrap_2pi(-pi / 2), 3 * pi / 2, 1e-12);
    EXPECT_NEAR(wrap_pi(3 * pi / 2), -pi / 2, 1e-12);
    EXPECT_NEAR(wrap_pi(-pi), pi, 1e-12);
}

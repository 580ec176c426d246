#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fastsketch/error.hpp"
#include "fastsketch/separation.hpp"

namespace fastsketch {
namespace {

// Plain restatement of the stopping rule used as an oracle.
SeparationResult oracle(const std::vector<double>& x, std::uint32_t r, double gamma) {
    double s = 0;
    for (std::uint32_t i = 1; i <= x.size(); ++i) {
        s += x[i - 1];
        if (i >= r && s <= i * gamma + std::pow(static_cast<double>(i), 2.0 / 3.0)) {
            return {Separation::Below, i};
        }
    }
    return {Separation::Above, static_cast<std::uint32_t>(x.size())};
}

TEST(Separate, AllOnesStaysAbove) {
    // S_i = i > 0.5 i + i^(2/3) for every i >= 9.
    const std::vector<double> x(16, 1.0);
    const auto res = separate(x, {16, 9, 0.5});
    EXPECT_EQ(res.decision, Separation::Above);
    EXPECT_EQ(res.iterations, 16u);
}

TEST(Separate, AlternatingBelowAtR) {
    // S_4 = 2 <= 4 * 0.9 + 4^(2/3).
    const std::vector<double> x{1, 0, 1, 0, 1, 0, 1, 0};
    const auto res = separate(x, {8, 4, 0.9});
    EXPECT_EQ(res.decision, Separation::Below);
    EXPECT_EQ(res.iterations, 4u);
}

TEST(Separate, AllZerosBelowAtR) {
    const std::vector<double> x(64, 0.0);
    for (const std::uint32_t r : {1u, 7u, 64u}) {
        const auto res = separate(x, {64, r, 0.3});
        EXPECT_EQ(res.decision, Separation::Below);
        EXPECT_EQ(res.iterations, r);
    }
}

TEST(Separate, TieCountsAsBelow) {
    // i = 8, gamma = 0.5: threshold 4 + 4 = 8 = S_8.
    const std::vector<double> x(8, 1.0);
    ASSERT_EQ(std::cbrt(64.0), 4.0);
    const auto res = separate(x, {8, 8, 0.5});
    EXPECT_EQ(res.decision, Separation::Below);
    EXPECT_EQ(res.iterations, 8u);
}

TEST(Separate, ContractViolations) {
    const std::vector<double> x(8, 1.0);
    EXPECT_THROW(separate(x, {9, 1, 0.5}), ContractViolation);
    EXPECT_THROW(separate(x, {8, 0, 0.5}), ContractViolation);
    EXPECT_THROW(separate(x, {8, 9, 0.5}), ContractViolation);
}

TEST(Separate, AgreesWithOracle) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto t = static_cast<std::uint32_t>(1 + gen() % 200);
        const auto r = static_cast<std::uint32_t>(1 + gen() % t);
        const double gamma = u(gen);
        const double p = u(gen);
        std::vector<double> x(t);
        for (auto& v : x) v = u(gen) < p ? 1.0 : 0.0;
        const auto got = separate(x, {t, r, gamma});
        const auto want = oracle(x, r, gamma);
        ASSERT_EQ(got.decision, want.decision);
        ASSERT_EQ(got.iterations, want.iterations);
    }
}

TEST(Separate, RaisingInputsNeverFlipsAboveToBelow) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int aboves = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint32_t t = 128;
        const auto r = static_cast<std::uint32_t>(1 + gen() % 32);
        const double gamma = 0.1 + 0.5 * u(gen);
        std::vector<double> x(t);
        for (auto& v : x) v = u(gen) < 0.85 ? 1.0 : 0.0;
        const auto before = separate(x, {t, r, gamma});
        std::vector<double> y = x;
        for (auto& v : y) v = std::min(1.0, v + (u(gen) < 0.2 ? u(gen) : 0.0));
        const auto after = separate(y, {t, r, gamma});
        if (before.decision == Separation::Above) {
            ++aboves;
            ASSERT_EQ(after.decision, Separation::Above);
        }
    }
    EXPECT_GT(aboves, 100);
}

TEST(Separate, MinRoundsForGap) {
    EXPECT_EQ(min_rounds_for_gap(0.5), 64u);
    EXPECT_EQ(min_rounds_for_gap(0.125), 4096u);
    EXPECT_EQ(min_rounds_for_gap(1.0), 8u);
    EXPECT_TRUE(separation_guarantee_holds({512, 64, 0.25}, 0.5));
    EXPECT_FALSE(separation_guarantee_holds({512, 16, 0.25}, 0.5));
}

}  // namespace
}  // namespace fastsketch

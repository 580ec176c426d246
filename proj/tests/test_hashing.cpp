#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fastsketch/error.hpp"
#include "fastsketch/hashing.hpp"

namespace fastsketch {
namespace {

// Straight table-lookup evaluation written independently of the library: the
// tables are regenerated from the seed in the documented fill order and the
// 80-bit key is handled as one 128-bit integer.
class ReferenceMixedTabulation {
public:
    explicit ReferenceMixedTabulation(std::uint64_t seed) {
        std::mt19937_64 gen(seed);
        for (int c = 0; c < 10; ++c) {
            for (int x = 0; x < 256; ++x) {
                const std::uint64_t lo = gen();
                const std::uint64_t hi = gen();
                const std::uint64_t drv = gen();
                out_[c][x] = (static_cast<unsigned __int128>(hi) << 64) | lo;
                drv_[c][x] = static_cast<std::uint32_t>(drv);
            }
        }
        for (int c = 0; c < 4; ++c) {
            for (int x = 0; x < 256; ++x) {
                const std::uint64_t lo = gen();
                const std::uint64_t hi = gen();
                second_[c][x] = (static_cast<unsigned __int128>(hi) << 64) | lo;
            }
        }
    }

    unsigned __int128 operator()(std::uint32_t round, std::uint64_t element) const {
        const unsigned __int128 key =
            (static_cast<unsigned __int128>(element) << 16) | (round & 0xffff);
        unsigned __int128 h = 0;
        std::uint32_t derived = 0;
        for (int c = 0; c < 10; ++c) {
            const int ch = static_cast<int>((key >> (8 * c)) & 0xff);
            h ^= out_[c][ch];
            derived ^= drv_[c][ch];
        }
        for (int c = 0; c < 4; ++c) h ^= second_[c][(derived >> (8 * c)) & 0xff];
        return h;
    }

private:
    unsigned __int128 out_[10][256];
    std::uint32_t drv_[10][256];
    unsigned __int128 second_[4][256];
};

std::vector<ElementId> probe_keys(std::size_t n) {
    std::mt19937_64 gen(12345);
    std::vector<ElementId> keys(n);
    for (auto& k : keys) k = gen();
    return keys;
}

TEST(Hashing, SameSeedSameOutputs) {
    const SketchHasher a(0), b(0);
    for (const ElementId k : probe_keys(1000)) {
        EXPECT_EQ(a.hash_round(5, k, 16), b.hash_round(5, k, 16));
        EXPECT_EQ(a.raw(1234, k), b.raw(1234, k));
    }
}

TEST(Hashing, DifferentSeedsDiffer) {
    const SketchHasher a(0), b(1);
    int differing = 0;
    for (const ElementId k : probe_keys(1000)) differing += a.raw(0, k) != b.raw(0, k);
    EXPECT_GT(differing, 0);
    EXPECT_GT(differing, 990);
}

TEST(Hashing, MatchesReferenceEvaluation) {
    const SketchHasher h(7);
    const ReferenceMixedTabulation ref(7);

    const unsigned __int128 expect = ref(3, 17);
    const HashOutput out = h.hash_round(3, 17, 16);
    EXPECT_EQ(out.fraction, static_cast<std::uint64_t>(expect >> 64));
    EXPECT_EQ(out.bin, reduce_to_range(static_cast<std::uint64_t>(expect), 16));

    std::mt19937_64 gen(99);
    for (int i = 0; i < 2000; ++i) {
        const auto round = static_cast<std::uint32_t>(gen() & 0xffff);
        const ElementId a = gen();
        const unsigned __int128 r = ref(round, a);
        const Hash128 got = h.raw(round, a);
        ASSERT_EQ(got.lo, static_cast<std::uint64_t>(r));
        ASSERT_EQ(got.hi, static_cast<std::uint64_t>(r >> 64));
    }
}

TEST(Hashing, PreparedKeyAgreesWithDirectEvaluation) {
    for (const HashFamily fam : {HashFamily::MixedTabulation, HashFamily::SipHash}) {
        const SketchHasher h(31, fam);
        std::mt19937_64 gen(5);
        for (int i = 0; i < 500; ++i) {
            const ElementId a = gen();
            const auto key = h.prepare(a);
            const auto round = static_cast<std::uint32_t>(gen() % SketchHasher::kRoundLimit);
            ASSERT_EQ(h.raw(round, key), h.raw(round, a));
            ASSERT_EQ(h.hash_round(round % 64, key, 32), h.hash_round(round % 64, a, 32));
        }
    }
}

TEST(Hashing, ForcedBinsForLateRounds) {
    const SketchHasher h(3);
    for (std::uint32_t t = 1; t <= 64; ++t) {
        for (std::uint32_t round = t; round < 2 * t; ++round) {
            for (const ElementId a : {ElementId{0}, ElementId{17}, ~ElementId{0}}) {
                ASSERT_EQ(h.hash_round(round, a, t).bin, round - t);
            }
        }
    }
    EXPECT_EQ(h.hash_round(16, 99, 16).bin, 0u);
    EXPECT_EQ(h.hash_round(31, 99, 16).bin, 15u);
}

TEST(Hashing, RoundOutOfRangeIsContractViolation) {
    const SketchHasher h(3);
    EXPECT_THROW(h.hash_round(32, 1, 16), ContractViolation);
    EXPECT_THROW(h.hash_round(0, 1, 0), ContractViolation);
    EXPECT_THROW(h.hash_round(0, 1, SketchHasher::kMaxT + 1), ContractViolation);
    EXPECT_THROW(h.raw(SketchHasher::kRoundLimit, 1), ContractViolation);
    EXPECT_NO_THROW(h.hash_round(2 * SketchHasher::kMaxT - 1, 1, SketchHasher::kMaxT));
}

class HashLaw : public ::testing::TestWithParam<HashFamily> {};

TEST_P(HashLaw, BinsAreUniform) {
    const SketchHasher h(42, GetParam());
    constexpr std::uint32_t t = 16;
    constexpr int n = 100000;
    std::vector<int> counts(t, 0);
    for (int k = 0; k < n; ++k) ++counts[h.hash_round(k % t, static_cast<ElementId>(k), t).bin];
    const double expect = static_cast<double>(n) / t;
    const double sigma = std::sqrt(n * (1.0 / t) * (1.0 - 1.0 / t));
    double chi2 = 0;
    for (const int c : counts) {
        EXPECT_LT(std::abs(c - expect), 4 * sigma);
        chi2 += (c - expect) * (c - expect) / expect;
    }
    // 15 degrees of freedom; 99.99th percentile is about 44.3.
    EXPECT_LT(chi2, 44.3);
}

TEST_P(HashLaw, FractionMeanIsHalf) {
    const SketchHasher h(43, GetParam());
    constexpr int n = 100000;
    long double sum = 0;
    for (int k = 0; k < n; ++k) {
        sum += h.hash_round(1, static_cast<ElementId>(k) * 7919, 8).fraction / 0x1p64L;
    }
    EXPECT_NEAR(static_cast<double>(sum / n), 0.5, 0.01);
}

INSTANTIATE_TEST_SUITE_P(Families, HashLaw,
                         ::testing::Values(HashFamily::MixedTabulation, HashFamily::SipHash));

TEST(Hashing, ReduceToRange) {
    EXPECT_EQ(reduce_to_range(0, 10), 0u);
    EXPECT_EQ(reduce_to_range(~std::uint64_t{0}, 10), 9u);
    EXPECT_EQ(reduce_to_range(std::uint64_t{1} << 63, 10), 5u);
    EXPECT_EQ(reduce_to_range(12345, 1), 0u);
}

TEST(Tokenize, Deterministic) {
    EXPECT_EQ(tokenize("the quick brown fox jumps", 0), tokenize("the quick brown fox jumps", 0));
    EXPECT_NE(tokenize("the quick brown fox jumps", 0), tokenize("the quick brown fox jumps", 1));
    EXPECT_NE(tokenize("a", 0), tokenize("b", 0));
}

TEST(Tokenize, EmptyStringIsValid) {
    EXPECT_NO_THROW(tokenize("", 0));
    EXPECT_EQ(tokenize("", 9), tokenize(std::string_view{}, 9));
}

TEST(Tokenize, NoCollisionsAmongDistinctShingles) {
    // Expected collisions among 1e5 keys: about 1e10 / 2^65, i.e. ~3e-10.
    std::set<ElementId> seen;
    int collisions = 0;
    for (int i = 0; i < 100000; ++i) {
        const std::string shingle = "w" + std::to_string(i) + " w" + std::to_string(i + 1) +
                                    " w" + std::to_string(i * 7) + " w" + std::to_string(i % 13) +
                                    " w" + std::to_string(i / 3);
        collisions += !seen.insert(tokenize(shingle, 0)).second;
    }
    EXPECT_LE(collisions, 1);
}

TEST(Mix64, IsInjectiveOnSample) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(mix64(i));
    EXPECT_EQ(seen.size(), 10000u);
}

}  // namespace
}  // namespace fastsketch

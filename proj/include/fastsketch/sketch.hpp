#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastsketch/hashing.hpp"

namespace fastsketch {

// One sketch entry: the real value round + fraction / 2^64, kept as an exact
// integer pair. Ordering is lexicographic, so every value produced in round i
// is below every value produced in round j > i.
struct SketchValue {
    std::uint32_t round = 0;
    std::uint64_t fraction = 0;

    friend auto operator<=>(const SketchValue&, const SketchValue&) = default;
};

// S(A, t): t entries, each the minimum over all (round, element) hashes that
// landed in that bin. Round 2t marks an unfilled ("infinite") entry.
class Sketch {
public:
    // All entries unfilled.
    Sketch(std::uint32_t t, std::uint64_t seed);
    // Throws ContractViolation if entries.size() != t or an entry's round is
    // impossible for its bin.
    Sketch(std::uint32_t t, std::uint64_t seed, std::vector<SketchValue> entries);

    std::uint32_t size() const noexcept { return t_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const SketchValue> entries() const noexcept { return entries_; }
    const SketchValue& operator[](std::size_t j) const { return entries_[j]; }

    SketchValue sentinel() const noexcept { return {2 * t_, 0}; }
    bool is_filled() const noexcept;

    friend bool operator==(const Sketch&, const Sketch&) = default;

private:
    std::uint32_t t_;
    std::uint64_t seed_;
    std::vector<SketchValue> entries_;
};

struct SketchBuild {
    Sketch sketch;
    // Number of h_i(a) evaluations performed.
    std::uint64_t hash_evals = 0;
    // Number of completed rounds (at most 2t).
    std::uint32_t rounds = 0;
};

// Fill-Sketch. Rounds are evaluated in increasing order and the loop stops
// after the first round at whose end every bin holds a value; no later round
// can lower any entry. Duplicate elements are harmless. Throws EmptyInput for
// an empty set and ContractViolation for t outside [1, SketchHasher::kMaxT].
SketchBuild fill_sketch_counted(std::span<const ElementId> elements, std::uint32_t t,
                                const SketchHasher& hasher);

Sketch fill_sketch(std::span<const ElementId> elements, std::uint32_t t,
                   const SketchHasher& hasher);

// Entrywise minimum; equals fill_sketch of the union.
Sketch union_sketch(const Sketch& a, const Sketch& b);

// Number of positions where the two sketches agree.
std::uint32_t match_count(const Sketch& a, const Sketch& b);

// X_i = [a[i] == b[i]] as reals, for the separation test.
std::vector<double> match_indicators(const Sketch& a, const Sketch& b);

// match_count / t.
double estimate_jaccard(const Sketch& a, const Sketch& b);

// b-bit minwise features: one block of 2^b coordinates per sketch entry with
// a single 1 at the low b bits of the entry's fraction. Stored sparsely as
// the t absolute indices.
struct FeatureVector {
    std::uint32_t bits = 0;
    std::vector<std::uint64_t> indices;

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(indices.size()); }
    std::uint64_t dimension() const noexcept { return indices.size() << bits; }
};

inline constexpr std::uint32_t kMaxFeatureBits = 16;

FeatureVector featurize_bbit(const Sketch& s, std::uint32_t bits);

// Sparse dot product of two 0/1 feature vectors.
std::uint32_t dot_estimate(const FeatureVector& a, const FeatureVector& b);

// Binary form: "FSK1", t (u32), seed (u64), then t x (round u32, fraction u64),
// all little-endian.
std::vector<std::uint8_t> encode_sketch(const Sketch& s);
Sketch decode_sketch(std::span<const std::uint8_t> bytes);

void save_sketch(const std::string& path, const Sketch& s);
Sketch load_sketch(const std::string& path);

}  // namespace fastsketch

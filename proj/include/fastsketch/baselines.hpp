#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fastsketch/hashing.hpp"

namespace fastsketch {

// A t x MinHash or one-permutation-hashing (OPH) sketch. For OPH, bins that
// received no element are empty until densified.
struct BaselineSketch {
    static constexpr std::uint32_t kEmptyBin = std::numeric_limits<std::uint32_t>::max();
    static constexpr std::uint64_t kEmptyValue = std::numeric_limits<std::uint64_t>::max();

    std::uint32_t t = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> entries;
    // Bin whose own minimum supplied entries[j] (j itself unless the value was
    // borrowed by densification); kEmptyBin while empty.
    std::vector<std::uint32_t> source;
    std::uint64_t hash_evals = 0;

    bool is_empty(std::uint32_t j) const { return source[j] == kEmptyBin; }
    std::uint32_t empty_count() const;
    std::uint32_t filled_count() const { return t - empty_count(); }
    // True if every entry derives from a single bin, i.e. the whole sketch
    // carries the hash of one element.
    bool single_source() const;

    friend bool operator==(const BaselineSketch& a, const BaselineSketch& b) {
        return a.t == b.t && a.seed == b.seed && a.entries == b.entries && a.source == b.source;
    }
};

// Entry i = min over a of an independent 64-bit hash keyed by (i, a).
BaselineSketch minhash_sketch(std::span<const ElementId> elements, std::uint32_t t,
                              const SketchHasher& hasher);

// One hash pass: the low word picks the bin, the high word is the value.
BaselineSketch oph_sketch(std::span<const ElementId> elements, std::uint32_t t,
                          const SketchHasher& hasher);

// Rotation densification: an empty bin takes the value of the nearest filled
// bin to its right (cyclically), shifted by distance * kRotationOffset so that
// borrowed values only match values borrowed over the same distance.
inline constexpr std::uint64_t kRotationOffset = 0x9e3779b97f4a7c15ULL;
BaselineSketch densify_rotation(const BaselineSketch& s);

// Re-hash probing densification: empty bin j probes bins
// p(j, 1), p(j, 2), ... drawn from the hasher until it hits a bin that was
// filled by OPH, and copies that value.
BaselineSketch densify_optimal(const BaselineSketch& s, const SketchHasher& hasher);

// Fraction of equal entries. Both sketches must be fully filled.
double baseline_estimate(const BaselineSketch& a, const BaselineSketch& b);

// |A n B| / |A u B| by sorted merge. Duplicates are ignored.
double exact_jaccard(std::span<const ElementId> a, std::span<const ElementId> b);

// Same layout as the sketch format with magic "FSKB"; each record is
// (source bin u32, value u64).
std::vector<std::uint8_t> encode_baseline(const BaselineSketch& s);
BaselineSketch decode_baseline(std::span<const std::uint8_t> bytes);

}  // namespace fastsketch

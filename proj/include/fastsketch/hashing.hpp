#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fastsketch {

// A key from the universe [2^64]. String tokens are mapped here by tokenize().
using ElementId = std::uint64_t;

// One 128-bit hash evaluation: `lo` drives the bin, `hi` is the value word.
struct Hash128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    friend bool operator==(const Hash128&, const Hash128&) = default;
};

// h_i(a) split into a bin in [t] and a fraction word read as a uniform
// value in [0, 1).
struct HashOutput {
    std::uint32_t bin = 0;
    std::uint64_t fraction = 0;

    friend bool operator==(const HashOutput&, const HashOutput&) = default;
};

enum class HashFamily {
    MixedTabulation,
    // Keyed SipHash over the same packed key; used for differential testing.
    SipHash,
};

// Unbiased (to within 2^-64) map of a uniform 64-bit word onto [0, n).
constexpr std::uint32_t reduce_to_range(std::uint64_t word, std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(word) * n) >> 64);
}

// Seeded family h_0 ... h_{2t-1} realized by a single hash over the packed
// key (round: 16 bits, element: 64 bits).
//
// The mixed tabulation variant views the 80-bit key as 10 8-bit characters.
// Each character selects a row of 128 output bits plus 4 derived characters;
// the XOR of the derived characters then selects 4 more 128-bit rows that are
// folded into the output. All tables are filled from std::mt19937_64(seed) in
// a fixed order, so outputs are identical across runs and platforms.
//
// Immutable after construction and safe to share between threads.
class SketchHasher {
public:
    static constexpr int kInputChars = 10;
    static constexpr int kDerivedChars = 4;
    static constexpr std::uint32_t kRoundLimit = 1u << 16;
    // 2t rounds must fit in the 16-bit round field.
    static constexpr std::uint32_t kMaxT = kRoundLimit / 2;

    struct InputRow {
        std::uint64_t lo;
        std::uint64_t hi;
        std::uint32_t derived;
    };
    struct DerivedRow {
        std::uint64_t lo;
        std::uint64_t hi;
    };

    // The element's contribution to the hash, independent of the round. With
    // mixed tabulation this is the XOR of the 8 element-character rows, so a
    // prepared key costs 2 + 4 lookups per round instead of 10 + 4.
    struct PreparedKey {
        ElementId element = 0;
        std::uint64_t lo = 0;
        std::uint64_t hi = 0;
        std::uint32_t derived = 0;
    };

    explicit SketchHasher(std::uint64_t seed,
                          HashFamily family = HashFamily::MixedTabulation);

    std::uint64_t seed() const noexcept { return seed_; }
    HashFamily family() const noexcept { return family_; }

    // Raw 128-bit evaluation of the packed key. `round_key` must be < 2^16.
    Hash128 raw(std::uint32_t round_key, ElementId a) const;

    // h_round(a) for a sketch of size t. For round < t the bin is the
    // fixed-point reduction of the low word; for t <= round < 2t the bin is
    // round - t. Throws ContractViolation unless 1 <= t <= kMaxT and
    // round < 2t.
    HashOutput hash_round(std::uint32_t round, ElementId a, std::uint32_t t) const;

    PreparedKey prepare(ElementId a) const;
    // Same results as raw() / hash_round() on key.element.
    Hash128 raw(std::uint32_t round_key, const PreparedKey& key) const;
    HashOutput hash_round(std::uint32_t round, const PreparedKey& key, std::uint32_t t) const;

    std::span<const InputRow> input_table() const noexcept { return input_; }
    std::span<const DerivedRow> derived_table() const noexcept { return derived_; }

private:
    Hash128 mixed_tabulation(const std::array<std::uint8_t, kInputChars>& key) const;
    Hash128 siphash(const std::array<std::uint8_t, kInputChars>& key) const;
    static std::array<std::uint8_t, kInputChars> pack(std::uint32_t round_key, ElementId a);

    std::uint64_t seed_;
    HashFamily family_;
    std::vector<InputRow> input_;
    std::vector<DerivedRow> derived_;
    std::array<std::uint8_t, 16> sip_key_{};
};

// Keyed 64-bit digest (SipHash-2-4) of a byte string.
std::uint64_t digest_bytes(std::span<const std::uint8_t> bytes, std::uint64_t seed);

// Maps a text token (e.g. a shingle) into the element universe.
ElementId tokenize(std::string_view token, std::uint64_t seed);

// SplitMix64 finalizer; used to derive independent sub-seeds from one seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace fastsketch

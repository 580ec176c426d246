#include "fastsketch/hashing.hpp"

#include <sodium.h>

#include <random>
#include <string>

#include "fastsketch/error.hpp"

namespace fastsketch {
namespace {

constexpr int kAlphabet = 256;

std::array<std::uint8_t, 16> derive_sip_key(std::uint64_t seed) {
    std::array<std::uint8_t, 16> key{};
    const std::uint64_t k0 = mix64(seed);
    const std::uint64_t k1 = mix64(k0);
    for (int i = 0; i < 8; ++i) {
        key[i] = static_cast<std::uint8_t>(k0 >> (8 * i));
        key[8 + i] = static_cast<std::uint8_t>(k1 >> (8 * i));
    }
    return key;
}

std::uint64_t load_le64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

SketchHasher::SketchHasher(std::uint64_t seed, HashFamily family)
    : seed_(seed), family_(family), sip_key_(derive_sip_key(seed)) {
    if (family_ == HashFamily::MixedTabulation) {
        std::mt19937_64 gen(seed);
        input_.resize(static_cast<std::size_t>(kInputChars) * kAlphabet);
        for (auto& row : input_) {
            row.lo = gen();
            row.hi = gen();
            row.derived = static_cast<std::uint32_t>(gen());
        }
        derived_.resize(static_cast<std::size_t>(kDerivedChars) * kAlphabet);
        for (auto& row : derived_) {
            row.lo = gen();
            row.hi = gen();
        }
    }
}

Hash128 SketchHasher::mixed_tabulation(const std::array<std::uint8_t, kInputChars>& key) const {
    Hash128 h;
    std::uint32_t derived = 0;
    const InputRow* rows = input_.data();
    for (int i = 0; i < kInputChars; ++i, rows += kAlphabet) {
        const InputRow& r = rows[key[i]];
        h.lo ^= r.lo;
        h.hi ^= r.hi;
        derived ^= r.derived;
    }
    const DerivedRow* drows = derived_.data();
    for (int i = 0; i < kDerivedChars; ++i, drows += kAlphabet) {
        const DerivedRow& r = drows[(derived >> (8 * i)) & 0xff];
        h.lo ^= r.lo;
        h.hi ^= r.hi;
    }
    return h;
}

Hash128 SketchHasher::siphash(const std::array<std::uint8_t, kInputChars>& key) const {
    std::array<std::uint8_t, crypto_shorthash_siphashx24_BYTES> out{};
    crypto_shorthash_siphashx24(out.data(), key.data(), key.size(), sip_key_.data());
    return {load_le64(out.data()), load_le64(out.data() + 8)};
}

std::array<std::uint8_t, SketchHasher::kInputChars> SketchHasher::pack(std::uint32_t round_key,
                                                                     ElementId a) {
    if (round_key >= kRoundLimit) {
        throw ContractViolation("round key " + std::to_string(round_key) +
                                " does not fit in 16 bits");
    }
    std::array<std::uint8_t, kInputChars> key{};
    key[0] = static_cast<std::uint8_t>(round_key);
    key[1] = static_cast<std::uint8_t>(round_key >> 8);
    for (int i = 0; i < 8; ++i) key[2 + i] = static_cast<std::uint8_t>(a >> (8 * i));
    return key;
}

Hash128 SketchHasher::raw(std::uint32_t round_key, ElementId a) const {
    const auto key = pack(round_key, a);
    return family_ == HashFamily::MixedTabulation ? mixed_tabulation(key) : siphash(key);
}

SketchHasher::PreparedKey SketchHasher::prepare(ElementId a) const {
    PreparedKey k;
    k.element = a;
    if (family_ != HashFamily::MixedTabulation) return k;
    const InputRow* rows = input_.data() + 2 * kAlphabet;
    for (int i = 0; i < 8; ++i, rows += kAlphabet) {
        const InputRow& r = rows[(a >> (8 * i)) & 0xff];
        k.lo ^= r.lo;
        k.hi ^= r.hi;
        k.derived ^= r.derived;
    }
    return k;
}

Hash128 SketchHasher::raw(std::uint32_t round_key, const PreparedKey& key) const {
    if (family_ != HashFamily::MixedTabulation) return raw(round_key, key.element);
    if (round_key >= kRoundLimit) {
        throw ContractViolation("round key " + std::to_string(round_key) +
                                " does not fit in 16 bits");
    }
    const InputRow& r0 = input_[round_key & 0xff];
    const InputRow& r1 = input_[kAlphabet + (round_key >> 8)];
    Hash128 h{key.lo ^ r0.lo ^ r1.lo, key.hi ^ r0.hi ^ r1.hi};
    const std::uint32_t derived = key.derived ^ r0.derived ^ r1.derived;
    const DerivedRow* drows = derived_.data();
    for (int i = 0; i < kDerivedChars; ++i, drows += kAlphabet) {
        const DerivedRow& r = drows[(derived >> (8 * i)) & 0xff];
        h.lo ^= r.lo;
        h.hi ^= r.hi;
    }
    return h;
}

namespace {

void check_round(std::uint32_t round, std::uint32_t t) {
    if (t == 0 || t > SketchHasher::kMaxT) {
        throw ContractViolation("sketch size t=" + std::to_string(t) + " outside [1, " +
                                std::to_string(SketchHasher::kMaxT) + "]");
    }
    if (round >= 2 * t) {
        throw ContractViolation("round " + std::to_string(round) + " outside [0, 2t)");
    }
}

HashOutput split(const Hash128& h, std::uint32_t round, std::uint32_t t) {
    const std::uint32_t bin = round < t ? reduce_to_range(h.lo, t) : round - t;
    return {bin, h.hi};
}

}  // namespace

HashOutput SketchHasher::hash_round(std::uint32_t round, ElementId a, std::uint32_t t) const {
    check_round(round, t);
    return split(raw(round, a), round, t);
}

HashOutput SketchHasher::hash_round(std::uint32_t round, const PreparedKey& key,
                                    std::uint32_t t) const {
    check_round(round, t);
    return split(raw(round, key), round, t);
}

std::uint64_t digest_bytes(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
    const auto key = derive_sip_key(seed);
    std::array<std::uint8_t, crypto_shorthash_siphash24_BYTES> out{};
    crypto_shorthash_siphash24(out.data(), bytes.data(), bytes.size(), key.data());
    return load_le64(out.data());
}

ElementId tokenize(std::string_view token, std::uint64_t seed) {
    return digest_bytes({reinterpret_cast<const std::uint8_t*>(token.data()), token.size()},
                        seed);
}

}  // namespace fastsketch

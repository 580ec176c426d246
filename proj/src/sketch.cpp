#include "fastsketch/sketch.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"
#include "fastsketch/error.hpp"

namespace fastsketch {
namespace {

constexpr std::string_view kSketchMagic = "FSK1";

void check_t(std::uint32_t t) {
    if (t == 0 || t > SketchHasher::kMaxT) {
        throw ContractViolation("sketch size t=" + std::to_string(t) + " outside [1, " +
                                std::to_string(SketchHasher::kMaxT) + "]");
    }
}

void check_compatible(const Sketch& a, const Sketch& b) {
    if (a.size() != b.size()) {
        throw IncompatibleSketches("sketch sizes differ: " + std::to_string(a.size()) +
                                   " vs " + std::to_string(b.size()));
    }
    if (a.seed() != b.seed()) {
        throw IncompatibleSketches("sketch seeds differ");
    }
}

}  // namespace

Sketch::Sketch(std::uint32_t t, std::uint64_t seed) : t_(t), seed_(seed) {
    check_t(t);
    entries_.assign(t, sentinel());
}

Sketch::Sketch(std::uint32_t t, std::uint64_t seed, std::vector<SketchValue> entries)
    : t_(t), seed_(seed), entries_(std::move(entries)) {
    check_t(t);
    if (entries_.size() != t) {
        throw ContractViolation("expected " + std::to_string(t) + " entries, got " +
                                std::to_string(entries_.size()));
    }
    for (std::uint32_t j = 0; j < t; ++j) {
        const std::uint32_t round = entries_[j].round;
        if (round >= t && round != t + j && round != 2 * t) {
            throw ContractViolation("entry " + std::to_string(j) + " has round " +
                                    std::to_string(round) + " which cannot map to that bin");
        }
    }
}

bool Sketch::is_filled() const noexcept {
    const SketchValue inf = sentinel();
    return std::none_of(entries_.begin(), entries_.end(),
                        [&](const SketchValue& v) { return v == inf; });
}

SketchBuild fill_sketch_counted(std::span<const ElementId> elements, std::uint32_t t,
                                const SketchHasher& hasher) {
    check_t(t);
    if (elements.empty()) throw EmptyInput("cannot sketch an empty set");

    const SketchValue inf{2 * t, 0};
    std::vector<SketchValue> s(t, inf);
    std::uint32_t filled = 0;
    std::uint64_t evals = 0;
    std::vector<SketchHasher::PreparedKey> keys;
    keys.reserve(elements.size());
    for (const ElementId a : elements) keys.push_back(hasher.prepare(a));

    std::uint32_t round = 0;
    while (round < 2 * t) {
        for (const auto& key : keys) {
            const HashOutput h = hasher.hash_round(round, key, t);
            ++evals;
            SketchValue& slot = s[h.bin];
            if (slot == inf) ++filled;
            const SketchValue v{round, h.fraction};
            if (v < slot) slot = v;
        }
        ++round;
        if (filled == t) break;
    }
    return {Sketch(t, hasher.seed(), std::move(s)), evals, round};
}

Sketch fill_sketch(std::span<const ElementId> elements, std::uint32_t t,
                   const SketchHasher& hasher) {
    return fill_sketch_counted(elements, t, hasher).sketch;
}

Sketch union_sketch(const Sketch& a, const Sketch& b) {
    check_compatible(a, b);
    std::vector<SketchValue> out(a.size());
    for (std::uint32_t j = 0; j < a.size(); ++j) out[j] = std::min(a[j], b[j]);
    return Sketch(a.size(), a.seed(), std::move(out));
}

std::uint32_t match_count(const Sketch& a, const Sketch& b) {
    check_compatible(a, b);
    std::uint32_t n = 0;
    for (std::uint32_t j = 0; j < a.size(); ++j) n += a[j] == b[j] ? 1 : 0;
    return n;
}

std::vector<double> match_indicators(const Sketch& a, const Sketch& b) {
    check_compatible(a, b);
    std::vector<double> x(a.size());
    for (std::uint32_t j = 0; j < a.size(); ++j) x[j] = a[j] == b[j] ? 1.0 : 0.0;
    return x;
}

double estimate_jaccard(const Sketch& a, const Sketch& b) {
    return static_cast<double>(match_count(a, b)) / a.size();
}

FeatureVector featurize_bbit(const Sketch& s, std::uint32_t bits) {
    if (bits == 0 || bits > kMaxFeatureBits) {
        throw ContractViolation("b=" + std::to_string(bits) + " outside [1, " +
                                std::to_string(kMaxFeatureBits) + "]");
    }
    if (!s.is_filled()) throw ContractViolation("cannot featurize an unfilled sketch");
    FeatureVector f;
    f.bits = bits;
    f.indices.resize(s.size());
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    for (std::uint32_t j = 0; j < s.size(); ++j) {
        f.indices[j] = (std::uint64_t{j} << bits) + (s[j].fraction & mask);
    }
    return f;
}

std::uint32_t dot_estimate(const FeatureVector& a, const FeatureVector& b) {
    if (a.bits != b.bits || a.size() != b.size()) {
        throw IncompatibleSketches("feature vectors differ in shape");
    }
    // Each block holds exactly one nonzero, so the dot product is the number of
    // blocks whose indices coincide.
    std::uint32_t dot = 0;
    for (std::size_t j = 0; j < a.indices.size(); ++j) dot += a.indices[j] == b.indices[j];
    return dot;
}

std::vector<std::uint8_t> encode_sketch(const Sketch& s) {
    detail::ByteWriter w;
    w.put_magic(kSketchMagic);
    w.put_u32(s.size());
    w.put_u64(s.seed());
    for (const SketchValue& v : s.entries()) {
        w.put_u32(v.round);
        w.put_u64(v.fraction);
    }
    return std::move(w).take();
}

Sketch decode_sketch(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic(kSketchMagic);
    const std::uint64_t t_at = r.offset();
    const std::uint32_t t = r.get_u32();
    if (t == 0 || t > SketchHasher::kMaxT) throw FormatError("invalid sketch size", t_at);
    const std::uint64_t seed = r.get_u64();
    r.check_count(t, 12, "sketch entries");
    std::vector<SketchValue> entries(t);
    for (std::uint32_t j = 0; j < t; ++j) {
        const std::uint64_t at = r.offset();
        entries[j].round = r.get_u32();
        entries[j].fraction = r.get_u64();
        const std::uint32_t round = entries[j].round;
        if (round >= t && round != t + j && round != 2 * t) {
            throw FormatError("entry round inconsistent with its bin", at);
        }
    }
    r.expect_end();
    return Sketch(t, seed, std::move(entries));
}

void save_sketch(const std::string& path, const Sketch& s) {
    detail::write_file_bytes(path, encode_sketch(s));
}

Sketch load_sketch(const std::string& path) {
    return decode_sketch(detail::read_file_bytes(path));
}

}  // namespace fastsketch

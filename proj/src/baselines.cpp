#include "fastsketch/baselines.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"
#include "fastsketch/error.hpp"

namespace fastsketch {
namespace {

constexpr std::string_view kBaselineMagic = "FSKB";
// Round key reserved for densification probes; sketches never reach it
// because MinHash rows and OPH use keys below kMaxT.
constexpr std::uint32_t kProbeRound = SketchHasher::kRoundLimit - 1;

void check_build_args(std::span<const ElementId> elements, std::uint32_t t) {
    if (t == 0 || t > SketchHasher::kMaxT) {
        throw ContractViolation("sketch size t=" + std::to_string(t) + " outside [1, " +
                                std::to_string(SketchHasher::kMaxT) + "]");
    }
    if (elements.empty()) throw EmptyInput("cannot sketch an empty set");
}

BaselineSketch blank(std::uint32_t t, std::uint64_t seed) {
    BaselineSketch s;
    s.t = t;
    s.seed = seed;
    s.entries.assign(t, BaselineSketch::kEmptyValue);
    s.source.assign(t, BaselineSketch::kEmptyBin);
    return s;
}

void check_densifiable(const BaselineSketch& s) {
    if (s.filled_count() == 0) throw EmptyInput("all bins are empty; nothing to densify");
}

std::vector<ElementId> sorted_unique(std::span<const ElementId> v) {
    std::vector<ElementId> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::uint32_t BaselineSketch::empty_count() const {
    return static_cast<std::uint32_t>(std::count(source.begin(), source.end(), kEmptyBin));
}

bool BaselineSketch::single_source() const {
    if (source.empty() || source[0] == kEmptyBin) return false;
    return std::all_of(source.begin(), source.end(),
                       [&](std::uint32_t s) { return s == source[0]; });
}

BaselineSketch minhash_sketch(std::span<const ElementId> elements, std::uint32_t t,
                              const SketchHasher& hasher) {
    check_build_args(elements, t);
    BaselineSketch s = blank(t, hasher.seed());
    std::vector<SketchHasher::PreparedKey> keys;
    keys.reserve(elements.size());
    for (const ElementId a : elements) keys.push_back(hasher.prepare(a));
    for (std::uint32_t i = 0; i < t; ++i) {
        std::uint64_t best = BaselineSketch::kEmptyValue;
        for (const auto& key : keys) best = std::min(best, hasher.raw(i, key).hi);
        s.entries[i] = best;
        s.source[i] = i;
    }
    s.hash_evals = std::uint64_t{t} * elements.size();
    return s;
}

BaselineSketch oph_sketch(std::span<const ElementId> elements, std::uint32_t t,
                          const SketchHasher& hasher) {
    check_build_args(elements, t);
    BaselineSketch s = blank(t, hasher.seed());
    for (const ElementId a : elements) {
        const Hash128 h = hasher.raw(0, a);
        const std::uint32_t bin = reduce_to_range(h.lo, t);
        if (s.source[bin] == BaselineSketch::kEmptyBin || h.hi < s.entries[bin]) {
            s.entries[bin] = h.hi;
            s.source[bin] = bin;
        }
    }
    s.hash_evals = elements.size();
    return s;
}

BaselineSketch densify_rotation(const BaselineSketch& s) {
    check_densifiable(s);
    BaselineSketch out = s;
    for (std::uint32_t j = 0; j < s.t; ++j) {
        if (!s.is_empty(j)) continue;
        std::uint32_t distance = 1;
        std::uint32_t k = (j + 1) % s.t;
        while (s.is_empty(k)) {
            k = (k + 1) % s.t;
            ++distance;
        }
        out.entries[j] = s.entries[k] + distance * kRotationOffset;
        out.source[j] = s.source[k];
    }
    return out;
}

BaselineSketch densify_optimal(const BaselineSketch& s, const SketchHasher& hasher) {
    check_densifiable(s);
    if (hasher.seed() != s.seed) throw IncompatibleSketches("hasher seed differs from sketch seed");
    BaselineSketch out = s;
    for (std::uint32_t j = 0; j < s.t; ++j) {
        if (!s.is_empty(j)) continue;
        for (std::uint32_t attempt = 1;; ++attempt) {
            const std::uint64_t key = (std::uint64_t{j} << 32) | attempt;
            const std::uint32_t probe = reduce_to_range(hasher.raw(kProbeRound, key).lo, s.t);
            ++out.hash_evals;
            if (!s.is_empty(probe)) {
                out.entries[j] = s.entries[probe];
                out.source[j] = s.source[probe];
                break;
            }
        }
    }
    return out;
}

double baseline_estimate(const BaselineSketch& a, const BaselineSketch& b) {
    if (a.t != b.t || a.seed != b.seed) {
        throw IncompatibleSketches("baseline sketches differ in size or seed");
    }
    if (a.empty_count() != 0 || b.empty_count() != 0) {
        throw ContractViolation("baseline sketch has empty bins; densify first");
    }
    std::uint32_t matches = 0;
    for (std::uint32_t j = 0; j < a.t; ++j) matches += a.entries[j] == b.entries[j];
    return static_cast<double>(matches) / a.t;
}

double exact_jaccard(std::span<const ElementId> a, std::span<const ElementId> b) {
    if (a.empty() && b.empty()) throw EmptyInput("Jaccard similarity of two empty sets");
    const std::vector<ElementId> sa = sorted_unique(a);
    const std::vector<ElementId> sb = sorted_unique(b);
    std::size_t i = 0, j = 0, common = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] < sb[j]) {
            ++i;
        } else if (sb[j] < sa[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::vector<std::uint8_t> encode_baseline(const BaselineSketch& s) {
    detail::ByteWriter w;
    w.put_magic(kBaselineMagic);
    w.put_u32(s.t);
    w.put_u64(s.seed);
    for (std::uint32_t j = 0; j < s.t; ++j) {
        w.put_u32(s.source[j]);
        w.put_u64(s.entries[j]);
    }
    return std::move(w).take();
}

BaselineSketch decode_baseline(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic(kBaselineMagic);
    const std::uint64_t t_at = r.offset();
    const std::uint32_t t = r.get_u32();
    if (t == 0 || t > SketchHasher::kMaxT) throw FormatError("invalid sketch size", t_at);
    BaselineSketch s = blank(t, r.get_u64());
    r.check_count(t, 12, "baseline entries");
    for (std::uint32_t j = 0; j < t; ++j) {
        const std::uint64_t at = r.offset();
        s.source[j] = r.get_u32();
        s.entries[j] = r.get_u64();
        if (s.source[j] != BaselineSketch::kEmptyBin && s.source[j] >= t) {
            throw FormatError("source bin out of range", at);
        }
    }
    r.expect_end();
    return s;
}

}  // namespace fastsketch

#include "fastsketch/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "binary_io.hpp"
#include "fastsketch/baselines.hpp"
#include "fastsketch/error.hpp"
#include "fastsketch/separation.hpp"

namespace fastsketch {
namespace {

constexpr std::string_view kIndexMagic = "FSLI";
constexpr std::uint64_t kSeparationSalt = 0x5e9a7a710d5eed01ULL;
constexpr std::uint64_t kTableSalt = 0x7ab1e5eed0000002ULL;
constexpr std::uint64_t kFingerprintSalt = 0xf1a6e7a1e0000003ULL;
constexpr std::uint64_t kQuerySalt = 0x9e7e5a3b1e000004ULL;

// ceil() that ignores floating-point noise just above an integer.
std::uint64_t ceil_tolerant(double x) {
    return static_cast<std::uint64_t>(std::ceil(x - 1e-9));
}

std::vector<ElementId> sorted_unique(std::span<const ElementId> v) {
    std::vector<ElementId> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

LshParams derive_params(double j1, double j2, std::uint64_t n) {
    if (!(j2 > 0.0 && j2 < j1 && j1 < 1.0)) {
        throw InvalidParameters("need 0 < j2 < j1 < 1");
    }
    if (n == 0) throw InvalidParameters("need n >= 1");

    LshParams p;
    p.j1 = j1;
    p.j2 = j2;
    p.n = n;
    const double nd = static_cast<double>(n);
    p.K = static_cast<std::uint32_t>(
        std::max<std::uint64_t>(1, ceil_tolerant(std::log(nd) / std::log(1.0 / j2))));
    const double tables = std::pow(1.0 / j1, p.K);
    if (tables > static_cast<double>(kMaxTables)) {
        throw InvalidParameters("L = (1/j1)^K exceeds " + std::to_string(kMaxTables));
    }
    p.L = static_cast<std::uint32_t>(ceil_tolerant(tables));
    p.t = p.K * static_cast<std::uint32_t>(ceil_tolerant(1.0 + p.K * (1.0 / j1 - 1.0)));
    p.rho = std::log(1.0 / j1) / std::log(1.0 / j2);
    p.gamma = (j1 + j2) / 2.0;
    p.C = kCandidateFactor;

    const double delta = (j1 - j2) / 2.0;
    p.r = std::max(kMinSeparationRounds, min_rounds_for_gap(delta));
    const auto log_term = static_cast<std::uint32_t>(
        16 * std::max<std::uint64_t>(1, ceil_tolerant(std::log2(nd + 1.0))));
    const auto tail_term =
        static_cast<std::uint32_t>(ceil_tolerant(std::log(nd) / (2.0 * delta * delta)));
    p.t_sep = std::max({64u, log_term, p.r, tail_term});

    if (p.t > SketchHasher::kMaxT || p.t_sep > SketchHasher::kMaxT) {
        throw InvalidParameters("thresholds too close: sketch size t=" + std::to_string(p.t) +
                                ", t_sep=" + std::to_string(p.t_sep) + " exceeds " +
                                std::to_string(SketchHasher::kMaxT));
    }
    return p;
}

SignatureTable::SignatureTable(std::uint32_t rows, std::uint32_t cols, std::uint32_t t,
                               std::vector<std::uint32_t> positions)
    : rows_(rows), cols_(cols), t_(t), positions_(std::move(positions)) {
    if (cols_ == 0 || t_ % cols_ != 0) {
        throw InvalidParameters("sketch size must be a positive multiple of K");
    }
    if (positions_.size() != std::size_t{rows_} * cols_) {
        throw InvalidParameters("signature table has wrong number of entries");
    }
    const std::uint32_t block = t_ / cols_;
    for (std::uint32_t i = 0; i < rows_; ++i) {
        for (std::uint32_t j = 0; j < cols_; ++j) {
            const std::uint32_t v = at(i, j);
            if (v < j * block || v >= (j + 1) * block) {
                throw InvalidParameters("signature table entry outside its block");
            }
        }
    }
}

SignatureTable SignatureTable::sample(const LshParams& p, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const std::uint32_t block = p.t / p.K;
    std::vector<std::uint32_t> pos(std::size_t{p.L} * p.K);
    for (std::uint32_t i = 0; i < p.L; ++i) {
        for (std::uint32_t j = 0; j < p.K; ++j) {
            pos[std::size_t{i} * p.K + j] = j * block + reduce_to_range(gen(), block);
        }
    }
    return SignatureTable(p.L, p.K, p.t, std::move(pos));
}

std::vector<std::uint64_t> build_signatures(const Sketch& s, const SignatureTable& sig,
                                            std::uint64_t fingerprint_seed) {
    if (s.size() != sig.sketch_size()) {
        throw IncompatibleSketches("sketch size " + std::to_string(s.size()) +
                                   " does not match signature table size " +
                                   std::to_string(sig.sketch_size()));
    }
    std::vector<std::uint64_t> out(sig.rows());
    std::vector<std::uint8_t> buf(std::size_t{sig.cols()} * 12);
    for (std::uint32_t i = 0; i < sig.rows(); ++i) {
        std::uint8_t* p = buf.data();
        for (const std::uint32_t pos : sig.row(i)) {
            const SketchValue& v = s[pos];
            for (int b = 0; b < 4; ++b) *p++ = static_cast<std::uint8_t>(v.round >> (8 * b));
            for (int b = 0; b < 8; ++b) *p++ = static_cast<std::uint8_t>(v.fraction >> (8 * b));
        }
        out[i] = digest_bytes(buf, fingerprint_seed);
    }
    return out;
}

LshIndex::LshIndex(LshParams params, std::uint64_t seed)
    : params_(params),
      seed_(seed),
      sketch_hasher_(seed),
      sep_hasher_(mix64(seed ^ kSeparationSalt)),
      buckets_(params.L) {}

std::uint64_t LshIndex::separation_seed() const noexcept { return sep_hasher_.seed(); }

std::uint64_t LshIndex::fingerprint_seed() const noexcept { return mix64(seed_ ^ kFingerprintSalt); }

LshIndex LshIndex::build(std::span<const SetRecord> collection, double j1, double j2,
                         std::uint64_t seed) {
    std::unordered_set<std::string> seen;
    for (const SetRecord& rec : collection) {
        if (!seen.insert(rec.id).second) throw DuplicateId("duplicate set id \"" + rec.id + "\"");
        if (rec.elements.empty()) throw EmptyInput("set \"" + rec.id + "\" is empty");
    }

    const std::uint64_t n = std::max<std::uint64_t>(1, collection.size());
    LshIndex idx(derive_params(j1, j2, n), seed);
    idx.sig_ = SignatureTable::sample(idx.params_, mix64(seed ^ kTableSalt));
    const std::uint64_t fp_seed = idx.fingerprint_seed();

    idx.ids_.reserve(collection.size());
    idx.sets_.reserve(collection.size());
    idx.sep_sketches_.reserve(collection.size());
    for (std::uint32_t k = 0; k < collection.size(); ++k) {
        const SetRecord& rec = collection[k];
        const Sketch s = fill_sketch(rec.elements, idx.params_.t, idx.sketch_hasher_);
        const auto fps = build_signatures(s, idx.sig_, fp_seed);
        for (std::uint32_t i = 0; i < idx.params_.L; ++i) idx.buckets_[i][fps[i]].push_back(k);
        idx.sep_sketches_.push_back(fill_sketch(rec.elements, idx.params_.t_sep, idx.sep_hasher_));
        idx.ids_.push_back(rec.id);
        idx.sets_.push_back(sorted_unique(rec.elements));
    }
    return idx;
}

std::vector<std::uint64_t> LshIndex::signatures_of(std::span<const ElementId> elements) const {
    return build_signatures(fill_sketch(elements, params_.t, sketch_hasher_), sig_,
                            fingerprint_seed());
}

std::optional<QueryMatch> LshIndex::query(std::span<const ElementId> q, QueryStats* stats) const {
    if (q.empty()) throw EmptyInput("empty query set");
    QueryStats local;
    QueryStats& st = stats ? *stats : local;
    st = QueryStats{};

    const SketchBuild qb = fill_sketch_counted(q, params_.t, sketch_hasher_);
    st.hash_evals += qb.hash_evals;
    const auto fps = build_signatures(qb.sketch, sig_, fingerprint_seed());

    const std::uint64_t limit = std::uint64_t{params_.C} * params_.L;
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < params_.L && candidates.size() <= limit; ++i) {
        const auto it = buckets_[i].find(fps[i]);
        if (it == buckets_[i].end()) continue;
        for (const std::uint32_t k : it->second) {
            candidates.push_back(k);
            if (candidates.size() > limit) break;
        }
    }
    st.matches = candidates.size();

    auto verify = [&](std::uint32_t k) -> std::optional<QueryMatch> {
        ++st.exact_checks;
        const double j = exact_jaccard(sets_[k], q);
        if (j > params_.j2) return QueryMatch{ids_[k], k, j};
        return std::nullopt;
    };

    if (candidates.size() > limit) {
        // Too many matches to filter individually: one uniform draw among the
        // first C L is a hit with constant probability.
        st.sampled = true;
        std::mt19937_64 gen(mix64(seed_ ^ kQuerySalt ^ fps[0]));
        return verify(candidates[reduce_to_range(gen(), static_cast<std::uint32_t>(limit))]);
    }
    if (candidates.empty()) return std::nullopt;

    const SketchBuild qs = fill_sketch_counted(q, params_.t_sep, sep_hasher_);
    st.hash_evals += qs.hash_evals;
    const SeparationParams sp{params_.t_sep, params_.r, params_.gamma};
    std::vector<bool> tried(sets_.size(), false);
    for (const std::uint32_t k : candidates) {
        // A set matched in several tables gives the same separation outcome.
        if (tried[k]) continue;
        tried[k] = true;
        ++st.separations;
        const auto x = match_indicators(sep_sketches_[k], qs.sketch);
        if (separate(x, sp).decision == Separation::Below) continue;
        if (auto hit = verify(k)) return hit;
    }
    return std::nullopt;
}

std::uint64_t LshIndex::bucket_entry_count() const noexcept {
    std::uint64_t total = 0;
    for (const BucketMap& m : buckets_) {
        for (const auto& [fp, ids] : m) total += ids.size();
    }
    return total;
}

std::span<const std::uint32_t> LshIndex::bucket(std::uint32_t table, std::uint64_t fp) const {
    const auto it = buckets_.at(table).find(fp);
    if (it == buckets_[table].end()) return {};
    return it->second;
}

std::vector<std::uint8_t> LshIndex::encode() const {
    detail::ByteWriter w;
    w.put_magic(kIndexMagic);
    w.put_u32(kFormatVersion);
    w.put_f64(params_.j1);
    w.put_f64(params_.j2);
    w.put_u64(params_.n);
    w.put_u32(params_.K);
    w.put_u32(params_.L);
    w.put_u32(params_.t);
    w.put_f64(params_.rho);
    w.put_f64(params_.gamma);
    w.put_u32(params_.r);
    w.put_u32(params_.C);
    w.put_u32(params_.t_sep);
    w.put_u64(seed_);

    for (const std::uint32_t v : sig_.positions()) w.put_u32(v);

    for (const BucketMap& m : buckets_) {
        std::vector<std::uint64_t> keys;
        keys.reserve(m.size());
        for (const auto& [fp, ids] : m) keys.push_back(fp);
        std::sort(keys.begin(), keys.end());
        w.put_u64(keys.size());
        for (const std::uint64_t fp : keys) {
            const auto& ids = m.at(fp);
            w.put_u64(fp);
            w.put_u32(static_cast<std::uint32_t>(ids.size()));
            for (const std::uint32_t k : ids) w.put_u32(k);
        }
    }

    w.put_u64(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        w.put_string(ids_[k]);
        w.put_u64(sets_[k].size());
        for (const ElementId e : sets_[k]) w.put_u64(e);
    }

    for (const Sketch& s : sep_sketches_) {
        for (const SketchValue& v : s.entries()) {
            w.put_u32(v.round);
            w.put_u64(v.fraction);
        }
    }
    return std::move(w).take();
}

LshIndex LshIndex::decode(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic(kIndexMagic);
    const std::uint64_t version_at = r.offset();
    if (r.get_u32() != kFormatVersion) throw FormatError("unsupported index version", version_at);

    const std::uint64_t params_at = r.offset();
    LshParams stored;
    stored.j1 = r.get_f64();
    stored.j2 = r.get_f64();
    stored.n = r.get_u64();
    stored.K = r.get_u32();
    stored.L = r.get_u32();
    stored.t = r.get_u32();
    stored.rho = r.get_f64();
    stored.gamma = r.get_f64();
    stored.r = r.get_u32();
    stored.C = r.get_u32();
    stored.t_sep = r.get_u32();
    LshParams derived;
    try {
        derived = derive_params(stored.j1, stored.j2, stored.n);
    } catch (const InvalidParameters& e) {
        throw FormatError(std::string("invalid stored parameters: ") + e.what(), params_at);
    }
    if (!(derived == stored)) {
        throw FormatError("stored parameters are inconsistent with j1, j2, n", params_at);
    }
    LshIndex idx(stored, r.get_u64());

    const std::uint64_t table_at = r.offset();
    r.check_count(std::uint64_t{stored.L} * stored.K, 4, "signature table");
    std::vector<std::uint32_t> pos(std::size_t{stored.L} * stored.K);
    for (auto& v : pos) v = r.get_u32();
    try {
        idx.sig_ = SignatureTable(stored.L, stored.K, stored.t, std::move(pos));
    } catch (const InvalidParameters& e) {
        throw FormatError(e.what(), table_at);
    }

    // Sizes are checked against the set count once it is known.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> refs(stored.L);
    for (std::uint32_t i = 0; i < stored.L; ++i) {
        const std::uint64_t nbuckets = r.get_u64();
        r.check_count(nbuckets, 12, "bucket table");
        BucketMap& m = idx.buckets_[i];
        for (std::uint64_t b = 0; b < nbuckets; ++b) {
            const std::uint64_t bucket_at = r.offset();
            const std::uint64_t fp = r.get_u64();
            const std::uint32_t len = r.get_u32();
            r.check_count(len, 4, "bucket");
            auto [it, fresh] = m.try_emplace(fp);
            if (!fresh) throw FormatError("duplicate bucket fingerprint", bucket_at);
            it->second.resize(len);
            for (auto& k : it->second) {
                const std::uint64_t at = r.offset();
                k = r.get_u32();
                refs[i].emplace_back(k, at);
            }
        }
    }

    const std::uint64_t nsets = r.get_u64();
    r.check_count(nsets, 12, "set store");
    if (std::max<std::uint64_t>(1, nsets) != stored.n) {
        throw FormatError("set count does not match stored n", r.offset() - 8);
    }
    for (std::uint64_t k = 0; k < nsets; ++k) {
        idx.ids_.push_back(r.get_string());
        const std::uint64_t size_at = r.offset();
        const std::uint64_t size = r.get_u64();
        if (size == 0) throw FormatError("stored set is empty", size_at);
        r.check_count(size, 8, "set elements");
        std::vector<ElementId> elems(size);
        for (auto& e : elems) e = r.get_u64();
        if (!std::is_sorted(elems.begin(), elems.end()) ||
            std::adjacent_find(elems.begin(), elems.end()) != elems.end()) {
            throw FormatError("stored set is not sorted and unique", size_at + 8);
        }
        idx.sets_.push_back(std::move(elems));
    }

    for (std::uint32_t i = 0; i < stored.L; ++i) {
        std::vector<std::uint32_t> per_set(nsets, 0);
        for (const auto& [k, at] : refs[i]) {
            if (k >= nsets) throw FormatError("bucket references unknown set", at);
            if (++per_set[k] > 1) throw FormatError("set stored twice in one table", at);
        }
        if (refs[i].size() != nsets) {
            throw FormatError("table " + std::to_string(i) + " does not hold every set",
                              table_at);
        }
    }

    r.check_count(nsets * stored.t_sep, 12, "separation sketches");
    for (std::uint64_t k = 0; k < nsets; ++k) {
        const std::uint64_t at = r.offset();
        std::vector<SketchValue> entries(stored.t_sep);
        for (auto& v : entries) {
            v.round = r.get_u32();
            v.fraction = r.get_u64();
        }
        try {
            Sketch s(stored.t_sep, idx.sep_hasher_.seed(), std::move(entries));
            if (!s.is_filled()) throw ContractViolation("unfilled separation sketch");
            idx.sep_sketches_.push_back(std::move(s));
        } catch (const ContractViolation& e) {
            throw FormatError(e.what(), at);
        }
    }
    r.expect_end();
    return idx;
}

void LshIndex::save(const std::string& path) const { detail::write_file_bytes(path, encode()); }

LshIndex LshIndex::load(const std::string& path) {
    return decode(detail::read_file_bytes(path));
}

}  // namespace fastsketch

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fastsketch/collection.hpp"
#include "fastsketch/hashing.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

// Parameters of the index for a collection of n sets and thresholds
// 0 < j2 < j1 < 1.
//
//   K     = max(1, ceil(log n / log(1/j2)))
//   L     = ceil((1/j1)^K)
//   t     = K * ceil(1 + K (1/j1 - 1))          (divisible by K)
//   rho   = log(1/j1) / log(1/j2)
//   gamma = (j1 + j2) / 2
//   r     = max(16, ceil(8 / delta^3)),          delta = (j1 - j2) / 2
//   t_sep = max(64, 16 ceil(log2(n + 1)), r, ceil(ln n / (2 delta^2)))
//   C     = 32
struct LshParams {
    double j1 = 0;
    double j2 = 0;
    std::uint64_t n = 0;
    std::uint32_t K = 0;
    std::uint32_t L = 0;
    std::uint32_t t = 0;
    double rho = 0;
    double gamma = 0;
    std::uint32_t r = 0;
    std::uint32_t C = 0;
    std::uint32_t t_sep = 0;

    friend bool operator==(const LshParams&, const LshParams&) = default;
};

inline constexpr std::uint32_t kCandidateFactor = 32;
inline constexpr std::uint32_t kMinSeparationRounds = 16;
// Guards against parameter choices whose tables would not fit in memory.
inline constexpr std::uint64_t kMaxTables = 1u << 22;

// Throws InvalidParameters unless 0 < j2 < j1 < 1 and n >= 1, or if L or t
// exceed implementation limits.
LshParams derive_params(double j1, double j2, std::uint64_t n);

// L x K matrix; row i, column j holds a position in block
// [j t/K, (j+1) t/K) of the size-t sketch. Rows are independent.
class SignatureTable {
public:
    SignatureTable() = default;
    SignatureTable(std::uint32_t rows, std::uint32_t cols, std::uint32_t t,
                   std::vector<std::uint32_t> positions);

    static SignatureTable sample(const LshParams& p, std::uint64_t seed);

    std::uint32_t rows() const noexcept { return rows_; }
    std::uint32_t cols() const noexcept { return cols_; }
    std::uint32_t sketch_size() const noexcept { return t_; }
    std::uint32_t at(std::uint32_t i, std::uint32_t j) const { return positions_[i * cols_ + j]; }
    std::span<const std::uint32_t> row(std::uint32_t i) const {
        return std::span<const std::uint32_t>(positions_).subspan(i * cols_, cols_);
    }
    std::span<const std::uint32_t> positions() const noexcept { return positions_; }

    friend bool operator==(const SignatureTable&, const SignatureTable&) = default;

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::uint32_t t_ = 0;
    std::vector<std::uint32_t> positions_;
};

// 64-bit fingerprint of the K-tuple (s[T[i,0]], ..., s[T[i,K-1]]) for every
// row i. Throws IncompatibleSketches if s.size() != sig.sketch_size().
std::vector<std::uint64_t> build_signatures(const Sketch& s, const SignatureTable& sig,
                                            std::uint64_t fingerprint_seed);

struct QueryMatch {
    std::string id;
    std::uint32_t index = 0;
    double jaccard = 0;
};

struct QueryStats {
    std::uint64_t hash_evals = 0;     // sketch construction for the query
    std::uint64_t matches = 0;        // |M|, counted up to C L + 1
    std::uint64_t separations = 0;    // Separate calls
    std::uint64_t exact_checks = 0;   // exact Jaccard evaluations
    bool sampled = false;             // |M| > C L branch taken
};

// Approximate Jaccard similarity search index.
//
// Each set is sketched once at size t; its L signatures are sampled from that
// sketch through the signature table and inserted into L bucket maps. A second
// sketch of size t_sep under an independent seed backs the separation test
// that filters candidates before exact verification.
//
// Immutable after build; concurrent queries are safe.
class LshIndex {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    // Throws DuplicateId, EmptyInput (empty set) or InvalidParameters.
    // An empty collection yields a valid index that finds nothing.
    static LshIndex build(std::span<const SetRecord> collection, double j1, double j2,
                          std::uint64_t seed);

    // Returns a stored set with exact Jaccard > j2, or nullopt.
    // Throws EmptyInput for an empty query.
    std::optional<QueryMatch> query(std::span<const ElementId> q,
                                    QueryStats* stats = nullptr) const;

    // L signature fingerprints of an arbitrary set under this index.
    std::vector<std::uint64_t> signatures_of(std::span<const ElementId> elements) const;

    const LshParams& params() const noexcept { return params_; }
    const SignatureTable& signature_table() const noexcept { return sig_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t sketch_seed() const noexcept { return seed_; }
    std::uint64_t separation_seed() const noexcept;
    std::uint64_t fingerprint_seed() const noexcept;

    std::size_t set_count() const noexcept { return ids_.size(); }
    const std::string& id(std::uint32_t index) const { return ids_[index]; }
    std::span<const ElementId> elements(std::uint32_t index) const { return sets_[index]; }
    const Sketch& separation_sketch(std::uint32_t index) const { return sep_sketches_[index]; }
    // Sum of bucket list lengths over all tables (n L for a valid index).
    std::uint64_t bucket_entry_count() const noexcept;
    // Set indices stored under fingerprint fp in table i.
    std::span<const std::uint32_t> bucket(std::uint32_t table, std::uint64_t fp) const;

    // "FSLI" binary format; see README for the layout.
    std::vector<std::uint8_t> encode() const;
    static LshIndex decode(std::span<const std::uint8_t> bytes);
    void save(const std::string& path) const;
    static LshIndex load(const std::string& path);

private:
    using BucketMap = std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>;

    LshIndex(LshParams params, std::uint64_t seed);

    LshParams params_;
    std::uint64_t seed_ = 0;
    SketchHasher sketch_hasher_;
    SketchHasher sep_hasher_;
    SignatureTable sig_;
    std::vector<BucketMap> buckets_;
    std::vector<std::string> ids_;
    std::vector<std::vector<ElementId>> sets_;
    std::vector<Sketch> sep_sketches_;
};

}  // namespace fastsketch

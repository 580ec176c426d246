#pragma once

// Monte Carlo drivers behind the CLI commands. Trial i of a run uses
// seed + i, so any single trial can be replayed in isolation.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fastsketch/hashing.hpp"
#include "fastsketch/report.hpp"

namespace fastsketch {

enum class Method { FastSketch, MinHash, OphRotation, OphOptimal };

inline constexpr Method kAllMethods[] = {Method::FastSketch, Method::MinHash,
                                         Method::OphRotation, Method::OphOptimal};

std::string_view method_name(Method m);

struct PairTrial {
    std::uint32_t matches = 0;
    // The (densified) sketch of A / B derives from a single element.
    bool degenerate_a = false;
    bool degenerate_b = false;
};

PairTrial run_pair_trial(Method m, std::span<const ElementId> a, std::span<const ElementId> b,
                         std::uint32_t t, const SketchHasher& hasher);

struct MethodHistogram {
    Method method = Method::FastSketch;
    // counts[k] = number of trials with k matching entries.
    std::vector<std::uint64_t> counts;
    std::uint64_t degenerate_a = 0;
    std::uint64_t degenerate_b = 0;

    std::uint64_t trials() const;
    // Mean and (population) variance of the estimate k / t.
    double mean() const;
    double variance() const;
};

struct HistogramRun {
    std::uint32_t t = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double exact = 0;
    std::vector<MethodHistogram> methods;

    const MethodHistogram& of(Method m) const;
};

HistogramRun run_histogram(std::span<const ElementId> a, std::span<const ElementId> b,
                           std::uint32_t t, std::uint64_t trials, std::uint64_t seed,
                           std::span<const Method> methods = kAllMethods);

// Columns: method, t, seed, trials, matches, estimate, count, frequency, exact.
// One row per method and lattice point k / t, k = 0..t.
ResultTable histogram_table(const HistogramRun& run);

// Two sets whose union has `union_size` elements and whose intersection has
// J * union_size of them; the remaining elements alternate between A and B.
// Throws InvalidParameters if J * union_size is not an integer or J is
// outside (0, 1].
struct SetPair {
    std::vector<ElementId> a;
    std::vector<ElementId> b;
};
SetPair make_jaccard_pair(double jaccard, std::uint32_t union_size);

// Chernoff-type tail bounds (e^d / (1+d)^(1+d))^e and
// (e^-d / (1-d)^(1-d))^e for exponent e. The lower form is 0 for d > 1,
// where the event is empty.
double chernoff_upper(double delta, double exponent);
double chernoff_lower(double delta, double exponent);

struct ConcentrationRun {
    std::uint32_t t = 0;
    double jaccard = 0;
    double delta = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    // Trials with X >= tJ(1+delta) and X <= tJ(1-delta), X = match count.
    std::uint64_t upper_hits = 0;
    std::uint64_t lower_hits = 0;

    double upper_frequency() const;
    double lower_frequency() const;
    // Bounds with exponent t (as in the sketch's headline tail statement) and
    // with exponent tJ (the classical Chernoff form).
    double upper_bound_t() const { return chernoff_upper(delta, t); }
    double upper_bound_mu() const { return chernoff_upper(delta, t * jaccard); }
    double lower_bound_t() const { return chernoff_lower(delta, t); }
    double lower_bound_mu() const { return chernoff_lower(delta, t * jaccard); }
};

ConcentrationRun run_concentration(std::span<const ElementId> a, std::span<const ElementId> b,
                                   std::uint32_t t, double delta, std::uint64_t trials,
                                   std::uint64_t seed);

// Columns: tail, t, J, delta, trials, seed, frequency, bound_t, bound_mu.
// Header only when trials == 0.
ResultTable concentration_table(const ConcentrationRun& run);

// `size` distinct pseudorandom elements.
std::vector<ElementId> synthetic_set(std::uint64_t size, std::uint64_t seed);

struct BenchPoint {
    Method method = Method::FastSketch;
    std::uint64_t set_size = 0;
    std::uint32_t t = 0;
    std::uint64_t seed = 0;
    std::uint32_t seeds = 0;
    double mean_hash_evals = 0;
    double mean_elapsed_us = 0;
};

// For every (size, t), sketches a synthetic set under `seeds_per_point`
// consecutive seeds with the fast sketch and with MinHash.
std::vector<BenchPoint> run_bench(std::span<const std::uint64_t> sizes,
                                  std::span<const std::uint32_t> ts,
                                  std::uint32_t seeds_per_point, std::uint64_t seed,
                                  bool include_minhash = true);

// Columns: method, set_size, t, seed, seeds, hash_evals, elapsed_us.
ResultTable bench_table(std::span<const BenchPoint> points);

// Planted-neighbor search: per trial a query Q of `set_size` random
// elements, one planted set sharing `shared` of them, and `decoys` sets
// sharing at most `max_decoy_shared` (decoy Jaccard <= j2 is the caller's
// responsibility). Builds an index with seed + trial and queries Q.
struct RecallConfig {
    double j1 = 0.5;
    double j2 = 0.25;
    std::uint32_t decoys = 100;
    std::uint32_t set_size = 12;
    std::uint32_t shared = 8;
    std::uint32_t max_decoy_shared = 4;
    std::uint64_t trials = 400;
    std::uint64_t seed = 0;
};

struct RecallRun {
    std::uint64_t trials = 0;
    std::uint64_t found_planted = 0;
    std::uint64_t found_any = 0;
    // Returned sets with exact Jaccard <= j2; must stay 0.
    std::uint64_t false_returns = 0;
    double planted_jaccard = 0;
    double max_decoy_jaccard = 0;

    double success_rate() const;
};

RecallRun run_planted_recall(const RecallConfig& cfg);

}  // namespace fastsketch

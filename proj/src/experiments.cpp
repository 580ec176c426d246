#include "fastsketch/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "fastsketch/baselines.hpp"
#include "fastsketch/error.hpp"
#include "fastsketch/lsh.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::FastSketch: return "fast";
        case Method::MinHash: return "minhash";
        case Method::OphRotation: return "oph_rotation";
        case Method::OphOptimal: return "oph_optimal";
    }
    return "unknown";
}

PairTrial run_pair_trial(Method m, std::span<const ElementId> a, std::span<const ElementId> b,
                         std::uint32_t t, const SketchHasher& hasher) {
    PairTrial out;
    switch (m) {
        case Method::FastSketch:
            out.matches = match_count(fill_sketch(a, t, hasher), fill_sketch(b, t, hasher));
            break;
        case Method::MinHash: {
            const auto sa = minhash_sketch(a, t, hasher);
            const auto sb = minhash_sketch(b, t, hasher);
            out.matches = static_cast<std::uint32_t>(std::lround(baseline_estimate(sa, sb) * t));
            break;
        }
        case Method::OphRotation:
        case Method::OphOptimal: {
            auto densify = [&](const BaselineSketch& s) {
                return m == Method::OphRotation ? densify_rotation(s) : densify_optimal(s, hasher);
            };
            const auto sa = densify(oph_sketch(a, t, hasher));
            const auto sb = densify(oph_sketch(b, t, hasher));
            out.matches = static_cast<std::uint32_t>(std::lround(baseline_estimate(sa, sb) * t));
            out.degenerate_a = sa.single_source();
            out.degenerate_b = sb.single_source();
            break;
        }
    }
    return out;
}

std::uint64_t MethodHistogram::trials() const {
    std::uint64_t n = 0;
    for (const auto c : counts) n += c;
    return n;
}

double MethodHistogram::mean() const {
    const double t = static_cast<double>(counts.size() - 1);
    double sum = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) sum += counts[k] * (k / t);
    return sum / static_cast<double>(trials());
}

double MethodHistogram::variance() const {
    const double t = static_cast<double>(counts.size() - 1);
    const double mu = mean();
    double sum = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double d = k / t - mu;
        sum += counts[k] * d * d;
    }
    return sum / static_cast<double>(trials());
}

const MethodHistogram& HistogramRun::of(Method m) const {
    for (const auto& h : methods) {
        if (h.method == m) return h;
    }
    throw InvalidParameters("method " + std::string(method_name(m)) + " not in this run");
}

HistogramRun run_histogram(std::span<const ElementId> a, std::span<const ElementId> b,
                           std::uint32_t t, std::uint64_t trials, std::uint64_t seed,
                           std::span<const Method> methods) {
    HistogramRun run;
    run.t = t;
    run.trials = trials;
    run.seed = seed;
    run.exact = exact_jaccard(a, b);
    for (const Method m : methods) {
        run.methods.push_back({m, std::vector<std::uint64_t>(t + 1, 0), 0, 0});
    }
    for (std::uint64_t i = 0; i < trials; ++i) {
        const SketchHasher hasher(seed + i);
        for (auto& h : run.methods) {
            const PairTrial r = run_pair_trial(h.method, a, b, t, hasher);
            ++h.counts[r.matches];
            h.degenerate_a += r.degenerate_a;
            h.degenerate_b += r.degenerate_b;
        }
    }
    return run;
}

ResultTable histogram_table(const HistogramRun& run) {
    ResultTable table;
    table.columns = {"method", "t",        "seed",      "trials", "matches",
                     "estimate", "count", "frequency", "exact"};
    for (const auto& h : run.methods) {
        for (std::uint32_t k = 0; k <= run.t; ++k) {
            const double freq =
                run.trials ? static_cast<double>(h.counts[k]) / static_cast<double>(run.trials)
                           : 0.0;
            table.add_row({std::string(method_name(h.method)), std::uint64_t{run.t}, run.seed,
                           run.trials, std::uint64_t{k}, static_cast<double>(k) / run.t,
                           h.counts[k], freq, run.exact});
        }
    }
    return table;
}

SetPair make_jaccard_pair(double jaccard, std::uint32_t union_size) {
    if (!(jaccard > 0.0 && jaccard <= 1.0)) throw InvalidParameters("J must lie in (0, 1]");
    if (union_size == 0) throw InvalidParameters("union size must be positive");
    const double shared_real = jaccard * union_size;
    const auto shared = static_cast<std::uint32_t>(std::llround(shared_real));
    if (std::abs(shared_real - shared) > 1e-9 || shared == 0) {
        throw InvalidParameters("J=" + format_double(jaccard) +
                                " is not a multiple of 1/" + std::to_string(union_size));
    }
    SetPair p;
    for (std::uint32_t e = 0; e < shared; ++e) {
        p.a.push_back(e);
        p.b.push_back(e);
    }
    for (std::uint32_t e = shared; e < union_size; ++e) {
        ((e - shared) % 2 == 0 ? p.a : p.b).push_back(e);
    }
    return p;
}

double chernoff_upper(double delta, double exponent) {
    if (!(delta > 0.0)) throw InvalidParameters("delta must be positive");
    return std::exp(exponent * (delta - (1.0 + delta) * std::log1p(delta)));
}

double chernoff_lower(double delta, double exponent) {
    if (!(delta > 0.0)) throw InvalidParameters("delta must be positive");
    if (delta > 1.0) return 0.0;
    // (1-d)^(1-d) -> 1 as d -> 1.
    const double tail = delta < 1.0 ? (1.0 - delta) * std::log1p(-delta) : 0.0;
    return std::exp(exponent * (-delta - tail));
}

double ConcentrationRun::upper_frequency() const {
    return trials ? static_cast<double>(upper_hits) / static_cast<double>(trials) : 0.0;
}

double ConcentrationRun::lower_frequency() const {
    return trials ? static_cast<double>(lower_hits) / static_cast<double>(trials) : 0.0;
}

ConcentrationRun run_concentration(std::span<const ElementId> a, std::span<const ElementId> b,
                                   std::uint32_t t, double delta, std::uint64_t trials,
                                   std::uint64_t seed) {
    if (!(delta > 0.0)) throw InvalidParameters("delta must be positive");
    ConcentrationRun run;
    run.t = t;
    run.jaccard = exact_jaccard(a, b);
    run.delta = delta;
    run.trials = trials;
    run.seed = seed;
    const double mu = t * run.jaccard;
    constexpr double kSlack = 1e-9;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const SketchHasher hasher(seed + i);
        const double x = match_count(fill_sketch(a, t, hasher), fill_sketch(b, t, hasher));
        if (x >= mu * (1.0 + delta) - kSlack) ++run.upper_hits;
        if (x <= mu * (1.0 - delta) + kSlack) ++run.lower_hits;
    }
    return run;
}

ResultTable concentration_table(const ConcentrationRun& run) {
    ResultTable table;
    table.columns = {"tail",  "t",         "J",       "delta",   "trials",
                     "seed",  "frequency", "bound_t", "bound_mu"};
    if (run.trials == 0) return table;
    table.add_row({std::string("upper"), std::uint64_t{run.t}, run.jaccard, run.delta, run.trials,
                   run.seed, run.upper_frequency(), run.upper_bound_t(), run.upper_bound_mu()});
    table.add_row({std::string("lower"), std::uint64_t{run.t}, run.jaccard, run.delta, run.trials,
                   run.seed, run.lower_frequency(), run.lower_bound_t(), run.lower_bound_mu()});
    return table;
}

std::vector<ElementId> synthetic_set(std::uint64_t size, std::uint64_t seed) {
    // mix64 is a bijection, so distinct inputs give distinct elements.
    std::vector<ElementId> out(size);
    const std::uint64_t base = mix64(seed) << 20;
    for (std::uint64_t k = 0; k < size; ++k) out[k] = mix64(base + k);
    return out;
}

std::vector<BenchPoint> run_bench(std::span<const std::uint64_t> sizes,
                                  std::span<const std::uint32_t> ts,
                                  std::uint32_t seeds_per_point, std::uint64_t seed,
                                  bool include_minhash) {
    if (seeds_per_point == 0) throw InvalidParameters("need at least one seed per point");
    using clock = std::chrono::steady_clock;
    std::vector<BenchPoint> points;
    for (const std::uint64_t size : sizes) {
        if (size == 0) throw InvalidParameters("set sizes must be positive");
        for (const std::uint32_t t : ts) {
            BenchPoint fast{Method::FastSketch, size, t, seed, seeds_per_point, 0, 0};
            BenchPoint mh{Method::MinHash, size, t, seed, seeds_per_point, 0, 0};
            for (std::uint32_t i = 0; i < seeds_per_point; ++i) {
                const SketchHasher hasher(seed + i);
                const auto elems = synthetic_set(size, seed + i);

                auto start = clock::now();
                const auto built = fill_sketch_counted(elems, t, hasher);
                fast.mean_elapsed_us +=
                    std::chrono::duration<double, std::micro>(clock::now() - start).count();
                fast.mean_hash_evals += static_cast<double>(built.hash_evals);

                if (include_minhash) {
                    start = clock::now();
                    const auto m = minhash_sketch(elems, t, hasher);
                    mh.mean_elapsed_us +=
                        std::chrono::duration<double, std::micro>(clock::now() - start).count();
                    mh.mean_hash_evals += static_cast<double>(m.hash_evals);
                }
            }
            for (BenchPoint* p : {&fast, &mh}) {
                p->mean_hash_evals /= seeds_per_point;
                p->mean_elapsed_us /= seeds_per_point;
            }
            points.push_back(fast);
            if (include_minhash) points.push_back(mh);
        }
    }
    return points;
}

ResultTable bench_table(std::span<const BenchPoint> points) {
    ResultTable table;
    table.columns = {"method", "set_size", "t", "seed", "seeds", "hash_evals", "elapsed_us"};
    for (const auto& p : points) {
        table.add_row({std::string(method_name(p.method)), p.set_size, std::uint64_t{p.t}, p.seed,
                       std::uint64_t{p.seeds}, p.mean_hash_evals, p.mean_elapsed_us});
    }
    return table;
}

double RecallRun::success_rate() const {
    return trials ? static_cast<double>(found_any) / static_cast<double>(trials) : 0.0;
}

RecallRun run_planted_recall(const RecallConfig& cfg) {
    if (cfg.shared > cfg.set_size || cfg.max_decoy_shared > cfg.set_size) {
        throw InvalidParameters("shared counts exceed the set size");
    }
    RecallRun run;
    run.trials = cfg.trials;
    const double s = cfg.set_size;
    run.planted_jaccard = cfg.shared / (2 * s - cfg.shared);
    run.max_decoy_jaccard = cfg.max_decoy_shared / (2 * s - cfg.max_decoy_shared);

    for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = cfg.seed + trial;
        std::mt19937_64 gen(mix64(trial_seed));
        // Fresh random elements are distinct from Q with probability 1 - 2^-60.
        std::vector<ElementId> q(cfg.set_size);
        for (auto& e : q) e = gen();

        std::vector<SetRecord> collection;
        collection.reserve(cfg.decoys + 1);
        for (std::uint32_t d = 0; d < cfg.decoys; ++d) {
            SetRecord rec{"decoy" + std::to_string(d), {}};
            const std::uint32_t shared = d % (cfg.max_decoy_shared + 1);
            for (std::uint32_t k = 0; k < shared; ++k) {
                rec.elements.push_back(q[(d + k) % cfg.set_size]);
            }
            while (rec.elements.size() < cfg.set_size) rec.elements.push_back(gen());
            collection.push_back(std::move(rec));
        }
        SetRecord planted{"planted", std::vector<ElementId>(q.begin(), q.begin() + cfg.shared)};
        while (planted.elements.size() < cfg.set_size) planted.elements.push_back(gen());
        const auto pos = static_cast<std::ptrdiff_t>(gen() % (cfg.decoys + 1));
        collection.insert(collection.begin() + pos, std::move(planted));

        const LshIndex index = LshIndex::build(collection, cfg.j1, cfg.j2, trial_seed);
        const auto hit = index.query(q);
        if (!hit) continue;
        if (hit->jaccard <= cfg.j2) {
            ++run.false_returns;
        } else {
            ++run.found_any;
        }
        if (hit->id == "planted") ++run.found_planted;
    }
    return run;
}

}  // namespace fastsketch

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fastsketch/baselines.hpp"
#include "fastsketch/collection.hpp"
#include "fastsketch/error.hpp"
#include "fastsketch/experiments.hpp"
#include "fastsketch/lsh.hpp"
#include "fastsketch/report.hpp"
#include "fastsketch/sketch.hpp"

namespace fs = std::filesystem;
using namespace fastsketch;

namespace {

enum ExitCode { kOk = 0, kNotFound = 1, kUsage = 2, kDataError = 3 };

struct OutputOptions {
    std::string format = "csv";
    std::string out;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--format", o.format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Write the table to this file instead of stdout");
}

void emit(const ResultTable& table, const OutputOptions& o) {
    const std::string text = render(table, parse_output_format(o.format));
    if (o.out.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f || !(f << text)) throw Error("cannot write " + o.out);
}

// Accepts "0.25" or "1/3".
double parse_ratio(const std::string& s) {
    const auto slash = s.find('/');
    auto number = [&](std::string_view part) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size()) {
            throw InvalidParameters("not a number: \"" + s + "\"");
        }
        return v;
    };
    if (slash == std::string::npos) return number(s);
    const std::string_view view(s);
    const double den = number(view.substr(slash + 1));
    if (den == 0) throw InvalidParameters("zero denominator in \"" + s + "\"");
    return number(view.substr(0, slash)) / den;
}

// Set ids may contain any character except TAB; file names keep a safe subset.
std::string file_stem(const std::string& id) {
    std::string out;
    for (const char ch : id) {
        const bool safe = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                          (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
        out += safe ? ch : '_';
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

double micros_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start)
        .count();
}

struct SketchCmd {
    std::string input;
    std::string out_dir;
    std::uint32_t t = 16;
    std::uint64_t seed = 0;
    bool numeric = false;
    std::uint64_t token_seed = 0;
    OutputOptions output;

    int run() const {
        const auto sets = load_collection(input, {numeric, token_seed});
        const SketchHasher hasher(seed);
        fs::create_directories(out_dir);
        ResultTable table;
        table.columns = {"id", "file", "method", "t", "seed", "set_size", "hash_evals",
                         "elapsed_us"};
        std::set<std::string> used;
        for (const SetRecord& rec : sets) {
            const std::string path = (fs::path(out_dir) / (file_stem(rec.id) + ".fsk")).string();
            if (!used.insert(path).second) {
                throw DuplicateId("set ids \"" + rec.id + "\" map to the same file " + path);
            }
            const auto start = std::chrono::steady_clock::now();
            const SketchBuild b = fill_sketch_counted(rec.elements, t, hasher);
            const double us = micros_since(start);
            save_sketch(path, b.sketch);
            table.add_row({rec.id, path, std::string("fast"), std::uint64_t{t}, seed,
                           std::uint64_t{rec.elements.size()}, b.hash_evals, us});
        }
        emit(table, output);
        return kOk;
    }
};

struct EstimateCmd {
    std::string a, b;
    std::uint32_t bits = 0;
    OutputOptions output;

    int run() const {
        const Sketch sa = load_sketch(a);
        const Sketch sb = load_sketch(b);
        ResultTable table;
        table.columns = {"method", "t", "seed", "matches", "estimate"};
        std::vector<Cell> row{std::string("fast"), std::uint64_t{sa.size()}, sa.seed(),
                              std::uint64_t{match_count(sa, sb)}, estimate_jaccard(sa, sb)};
        if (bits) {
            const std::uint32_t dot = dot_estimate(featurize_bbit(sa, bits), featurize_bbit(sb, bits));
            table.columns.insert(table.columns.end(), {"b", "dot", "dot_estimate"});
            row.insert(row.end(), {std::uint64_t{bits}, std::uint64_t{dot},
                                   static_cast<double>(dot) / sa.size()});
        }
        table.add_row(std::move(row));
        emit(table, output);
        return kOk;
    }
};

struct UnionCmd {
    std::string a, b, out;

    int run() const {
        save_sketch(out, union_sketch(load_sketch(a), load_sketch(b)));
        return kOk;
    }
};

struct HistogramCmd {
    std::uint32_t t = 16;
    std::uint64_t trials = 2000;
    std::uint64_t seed = 0;
    OutputOptions output;

    int run() const {
        const std::vector<ElementId> a{1, 2};
        const std::vector<ElementId> b{2, 3};
        emit(histogram_table(run_histogram(a, b, t, trials, seed)), output);
        return kOk;
    }
};

struct ConcentrationCmd {
    std::uint32_t t = 16;
    std::string jaccard = "1/3";
    double delta = 1.0;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    std::uint32_t union_size = 60;
    OutputOptions output;

    int run() const {
        const SetPair p = make_jaccard_pair(parse_ratio(jaccard), union_size);
        emit(concentration_table(run_concentration(p.a, p.b, t, delta, trials, seed)), output);
        return kOk;
    }
};

struct BenchCmd {
    std::vector<std::uint64_t> sizes{1, 10, 1000, 100000};
    std::vector<std::uint32_t> ts{16, 256};
    std::uint32_t seeds = 10;
    std::uint64_t seed = 0;
    bool no_minhash = false;
    OutputOptions output;

    int run() const {
        emit(bench_table(run_bench(sizes, ts, seeds, seed, !no_minhash)), output);
        return kOk;
    }
};

struct LshBuildCmd {
    std::string input;
    std::string out;
    double j1 = 0.5;
    double j2 = 0.25;
    std::uint64_t seed = 0;
    bool numeric = false;
    std::uint64_t token_seed = 0;
    OutputOptions output;

    int run() const {
        const auto sets = load_collection(input, {numeric, token_seed});
        const auto start = std::chrono::steady_clock::now();
        const LshIndex idx = LshIndex::build(sets, j1, j2, seed);
        const double us = micros_since(start);
        idx.save(out);
        const LshParams& p = idx.params();
        ResultTable table;
        table.columns = {"file", "n", "j1", "j2", "K", "L", "t", "t_sep", "r",
                         "rho", "gamma", "seed", "elapsed_us"};
        table.add_row({out, std::uint64_t{idx.set_count()}, p.j1, p.j2, std::uint64_t{p.K},
                       std::uint64_t{p.L}, std::uint64_t{p.t}, std::uint64_t{p.t_sep},
                       std::uint64_t{p.r}, p.rho, p.gamma, seed, us});
        emit(table, output);
        return kOk;
    }
};

struct LshQueryCmd {
    std::string index;
    std::string query;
    std::string query_file;
    bool numeric = false;
    std::uint64_t token_seed = 0;
    OutputOptions output;

    std::vector<ElementId> query_elements() const {
        const CollectionOptions opts{numeric, token_seed};
        if (!query_file.empty()) {
            const auto sets = load_collection(query_file, opts);
            if (sets.empty()) throw EmptyInput("query file has no sets");
            return sets.front().elements;
        }
        return parse_collection("query\t" + query + "\n", opts).front().elements;
    }

    int run() const {
        const LshIndex idx = LshIndex::load(index);
        const auto q = query_elements();
        QueryStats st;
        const auto start = std::chrono::steady_clock::now();
        const auto hit = idx.query(q, &st);
        const double us = micros_since(start);
        ResultTable table;
        table.columns = {"status",  "id",          "exact",        "seed",    "hash_evals",
                         "matches", "separations", "exact_checks", "sampled", "elapsed_us"};
        table.add_row({std::string(hit ? "found" : "not_found"), hit ? hit->id : std::string(),
                       hit ? hit->jaccard : 0.0, idx.seed(), st.hash_evals, st.matches,
                       st.separations, st.exact_checks, std::uint64_t{st.sampled}, us});
        emit(table, output);
        return hit ? kOk : kNotFound;
    }
};

struct LshRecallCmd {
    RecallConfig cfg;
    OutputOptions output;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const RecallRun r = run_planted_recall(cfg);
        const double us = micros_since(start);
        ResultTable table;
        table.columns = {"j1",           "j2",           "decoys",        "trials",
                         "seed",         "found_planted", "found_any",    "false_returns",
                         "success_rate", "planted_jaccard", "max_decoy_jaccard", "elapsed_us"};
        table.add_row({cfg.j1, cfg.j2, std::uint64_t{cfg.decoys}, r.trials, cfg.seed,
                       r.found_planted, r.found_any, r.false_returns, r.success_rate(),
                       r.planted_jaccard, r.max_decoy_jaccard, us});
        emit(table, output);
        return kOk;
    }
};

void add_collection_options(CLI::App* cmd, std::string& input, bool& numeric,
                            std::uint64_t& token_seed) {
    cmd->add_option("--input,input", input, "Collection file: <id><TAB><tokens>")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--numeric", numeric, "Tokens are decimal 64-bit integers");
    cmd->add_option("--token-seed", token_seed, "Seed for string tokenization")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Similarity sketches, baselines and Jaccard similarity search"};
    app.require_subcommand(1);

    SketchCmd sketch;
    auto* c_sketch = app.add_subcommand("sketch", "Sketch every set of a collection");
    add_collection_options(c_sketch, sketch.input, sketch.numeric, sketch.token_seed);
    c_sketch->add_option("--out", sketch.out_dir, "Directory for <id>.fsk files")->required();
    c_sketch->add_option("--t", sketch.t, "Sketch size")->capture_default_str();
    c_sketch->add_option("--seed", sketch.seed, "Hash seed")->capture_default_str();
    c_sketch->add_option("--format", sketch.output.format, "Summary format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    EstimateCmd estimate;
    auto* c_est = app.add_subcommand("estimate", "Estimate Jaccard similarity of two sketches");
    c_est->add_option("first", estimate.a, "First sketch file")->required()->check(CLI::ExistingFile);
    c_est->add_option("second", estimate.b, "Second sketch file")->required()->check(CLI::ExistingFile);
    c_est->add_option("--b", estimate.bits, "Also report the b-bit feature dot product")
        ->check(CLI::Range(1u, kMaxFeatureBits));
    add_output_options(c_est, estimate.output);

    UnionCmd uni;
    auto* c_union = app.add_subcommand("union", "Merge two sketches into the sketch of the union");
    c_union->add_option("first", uni.a, "First sketch file")->required()->check(CLI::ExistingFile);
    c_union->add_option("second", uni.b, "Second sketch file")->required()->check(CLI::ExistingFile);
    c_union->add_option("--out", uni.out, "Output sketch file")->required();

    HistogramCmd hist;
    auto* c_hist = app.add_subcommand(
        "histogram", "Estimate frequencies per method for A={1,2}, B={2,3}");
    c_hist->add_option("--t", hist.t, "Sketch size")->capture_default_str();
    c_hist->add_option("--trials", hist.trials, "Trials")->capture_default_str();
    c_hist->add_option("--seed", hist.seed, "Seed of trial 0")->capture_default_str();
    add_output_options(c_hist, hist.output);

    ConcentrationCmd conc;
    auto* c_conc = app.add_subcommand("concentration", "Tail frequencies against Chernoff bounds");
    c_conc->add_option("--t", conc.t, "Sketch size")->capture_default_str();
    c_conc->add_option("--J", conc.jaccard, "Jaccard similarity, e.g. 0.25 or 1/3")
        ->capture_default_str();
    c_conc->add_option("--delta", conc.delta, "Relative deviation")->capture_default_str();
    c_conc->add_option("--trials", conc.trials, "Trials")->capture_default_str();
    c_conc->add_option("--seed", conc.seed, "Seed of trial 0")->capture_default_str();
    c_conc->add_option("--union-size", conc.union_size, "|A u B|")->capture_default_str();
    add_output_options(c_conc, conc.output);

    BenchCmd bench;
    auto* c_bench = app.add_subcommand("bench", "Hash evaluations and time, fast sketch vs MinHash");
    c_bench->add_option("--sizes", bench.sizes, "Set sizes")->delimiter(',')->capture_default_str();
    c_bench->add_option("--ts", bench.ts, "Sketch sizes")->delimiter(',')->capture_default_str();
    c_bench->add_option("--seeds", bench.seeds, "Seeds per point")
        ->check(CLI::Range(10u, 1000000u))
        ->capture_default_str();
    c_bench->add_option("--seed", bench.seed, "First seed")->capture_default_str();
    c_bench->add_flag("--no-minhash", bench.no_minhash, "Skip the MinHash baseline");
    add_output_options(c_bench, bench.output);

    LshBuildCmd build;
    auto* c_build = app.add_subcommand("lsh-build", "Build a similarity search index");
    add_collection_options(c_build, build.input, build.numeric, build.token_seed);
    c_build->add_option("--out", build.out, "Index file to write")->required();
    c_build->add_option("--j1", build.j1, "Similarity to find")->capture_default_str();
    c_build->add_option("--j2", build.j2, "Similarity to reject")->capture_default_str();
    c_build->add_option("--seed", build.seed, "Index seed")->capture_default_str();
    c_build->add_option("--format", build.output.format, "Summary format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    LshQueryCmd query;
    auto* c_query = app.add_subcommand("lsh-query", "Query an index; exit 1 when nothing is found");
    c_query->add_option("--index", query.index, "Index file")->required()->check(CLI::ExistingFile);
    auto* q_text = c_query->add_option("--query", query.query, "Space-separated query tokens");
    auto* q_file = c_query->add_option("--query-file", query.query_file,
                                       "Collection file; its first set is the query")
                       ->check(CLI::ExistingFile);
    q_text->excludes(q_file);
    c_query->add_flag("--numeric", query.numeric, "Tokens are decimal 64-bit integers");
    c_query->add_option("--token-seed", query.token_seed, "Seed for string tokenization")
        ->capture_default_str();
    add_output_options(c_query, query.output);

    LshRecallCmd recall;
    auto* c_recall = app.add_subcommand("lsh-recall", "Planted-neighbor recall experiment");
    c_recall->add_option("--j1", recall.cfg.j1, "Similarity to find")->capture_default_str();
    c_recall->add_option("--j2", recall.cfg.j2, "Similarity to reject")->capture_default_str();
    c_recall->add_option("--decoys", recall.cfg.decoys, "Decoy sets per trial")
        ->capture_default_str();
    c_recall->add_option("--trials", recall.cfg.trials, "Trials")->capture_default_str();
    c_recall->add_option("--seed", recall.cfg.seed, "Seed of trial 0")->capture_default_str();
    add_output_options(c_recall, recall.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (c_query->parsed() && query.query.empty() && query.query_file.empty()) {
            throw CLI::RequiredError("--query or --query-file");
        }
        if (c_sketch->parsed()) return sketch.run();
        if (c_est->parsed()) return estimate.run();
        if (c_union->parsed()) return uni.run();
        if (c_hist->parsed()) return hist.run();
        if (c_conc->parsed()) return conc.run();
        if (c_bench->parsed()) return bench.run();
        if (c_build->parsed()) return build.run();
        if (c_query->parsed()) return query.run();
        if (c_recall->parsed()) return recall.run();
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidParameters& e) {
        std::cerr << "error: invalid parameters: " << e.what() << '\n';
        return kUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fastsketch/baselines.hpp"
#include "fastsketch/collection.hpp"
#include "fastsketch/error.hpp"
#include "fastsketch/experiments.hpp"
#include "fastsketch/report.hpp"

namespace fastsketch {
namespace {

std::uint64_t error_line(const std::string& text, const CollectionOptions& opts) {
    try {
        parse_collection(text, opts);
    } catch (const FormatError& e) {
        return e.offset();
    }
    return 0;
}

TEST(Collection, ParsesNumericAndTextSets) {
    const auto num = parse_collection("a\t1 2 3\n\nb\t  4   5 \r\n", {true, 0});
    ASSERT_EQ(num.size(), 2u);
    EXPECT_EQ(num[0].id, "a");
    EXPECT_EQ(num[0].elements, (std::vector<ElementId>{1, 2, 3}));
    EXPECT_EQ(num[1].elements, (std::vector<ElementId>{4, 5}));

    const auto txt = parse_collection("doc 1\tthe cat sat\n", {false, 7});
    ASSERT_EQ(txt.size(), 1u);
    EXPECT_EQ(txt[0].id, "doc 1");
    EXPECT_EQ(txt[0].elements,
              (std::vector<ElementId>{tokenize("the", 7), tokenize("cat", 7), tokenize("sat", 7)}));
}

TEST(Collection, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("a\t1\nno tab here\n", {true, 0}), 2u);
    EXPECT_EQ(error_line("a\t1\n\nb\t2 x3\n", {true, 0}), 3u);
    EXPECT_EQ(error_line("a\t1\na\t2\n", {true, 0}), 2u);
    EXPECT_EQ(error_line("\t1\n", {true, 0}), 1u);
    EXPECT_THROW(parse_collection("a\t   \n", {true, 0}), EmptyInput);
    EXPECT_TRUE(parse_collection("", {true, 0}).empty());
    EXPECT_THROW(load_collection("/nonexistent/sets.tsv", {}), Error);
}

ResultTable random_table(std::mt19937_64& gen) {
    static const std::vector<std::string> words{"plain", "with,comma", "say \"hi\"", "multi\nline",
                                                "", "12", "-3", "0.5", "1e+300", " space"};
    ResultTable t;
    const auto cols = 1 + gen() % 5;
    for (std::size_t c = 0; c < cols; ++c) t.columns.push_back("c" + std::to_string(c));
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    const auto rows = gen() % 6;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<Cell> row;
        for (std::size_t c = 0; c < cols; ++c) {
            switch (gen() % 4) {
                case 0: row.emplace_back(std::uint64_t{gen()}); break;
                case 1: row.emplace_back(-static_cast<std::int64_t>(1 + gen() % 1000)); break;
                case 2: row.emplace_back(u(gen) / 7.0); break;
                default: row.emplace_back(words[gen() % words.size()]); break;
            }
        }
        t.add_row(std::move(row));
    }
    return t;
}

TEST(Report, CsvRoundTripIsByteIdentical) {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 500; ++i) {
        const ResultTable t = random_table(gen);
        const std::string csv = to_csv(t);
        ASSERT_EQ(to_csv(parse_csv(csv)), csv);
    }
}

TEST(Report, JsonRoundTripIsByteIdentical) {
    std::mt19937_64 gen(2);
    for (int i = 0; i < 500; ++i) {
        const ResultTable t = random_table(gen);
        const std::string js = to_jsonl(t);
        ASSERT_EQ(to_jsonl(parse_jsonl(js)), js);
        if (!t.rows.empty()) ASSERT_EQ(parse_jsonl(js), t);
    }
}

TEST(Report, DoublesAreShortestRoundTrip) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
    for (const double v : {0.1, 1e-300, 123456.789, -0.0625}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Report, Errors) {
    EXPECT_THROW(parse_csv("a,b\n1\n"), FormatError);
    EXPECT_THROW(parse_csv("a\n\"open\n"), FormatError);
    EXPECT_THROW(parse_jsonl("{\"a\":1}\n{\"b\":1}\n"), FormatError);
    EXPECT_THROW(parse_jsonl("[1]\n"), FormatError);
    EXPECT_THROW(parse_jsonl("{oops\n"), FormatError);
    EXPECT_THROW(parse_output_format("xml"), InvalidParameters);
    ResultTable t;
    t.columns = {"a"};
    EXPECT_THROW(t.add_row({std::uint64_t{1}, std::uint64_t{2}}), ContractViolation);
}

TEST(Experiments, HistogramIsDeterministicAndOnLattice) {
    const std::vector<ElementId> a{1, 2};
    const std::vector<ElementId> b{2, 3};
    const HistogramRun r1 = run_histogram(a, b, 16, 300, 5);
    const HistogramRun r2 = run_histogram(a, b, 16, 300, 5);
    EXPECT_EQ(to_csv(histogram_table(r1)), to_csv(histogram_table(r2)));
    EXPECT_EQ(to_jsonl(histogram_table(r1)), to_jsonl(histogram_table(r2)));
    for (const auto& m : r1.methods) {
        EXPECT_EQ(m.counts.size(), 17u);
        EXPECT_EQ(m.trials(), 300u);
    }
    const ResultTable t = histogram_table(r1);
    EXPECT_EQ(t.rows.size(), 4u * 17u);
    EXPECT_EQ(to_csv(parse_csv(to_csv(t))), to_csv(t));
}

TEST(Experiments, MakeJaccardPair) {
    const SetPair p = make_jaccard_pair(1.0 / 3.0, 60);
    EXPECT_DOUBLE_EQ(exact_jaccard(p.a, p.b), 1.0 / 3.0);
    EXPECT_EQ(p.a.size(), 40u);
    const SetPair q = make_jaccard_pair(1.0, 5);
    EXPECT_EQ(exact_jaccard(q.a, q.b), 1.0);
    EXPECT_THROW(make_jaccard_pair(0.3, 7), InvalidParameters);
    EXPECT_THROW(make_jaccard_pair(0.0, 10), InvalidParameters);
}

TEST(Experiments, ChernoffBounds) {
    EXPECT_NEAR(chernoff_upper(1.0, 1.0), std::exp(1.0) / 4.0, 1e-12);
    EXPECT_NEAR(chernoff_lower(0.5, 2.0), std::pow(std::exp(-0.5) / std::pow(0.5, 0.5), 2), 1e-12);
    EXPECT_NEAR(chernoff_lower(1.0, 3.0), std::exp(-3.0), 1e-12);
    EXPECT_EQ(chernoff_lower(1.5, 3.0), 0.0);
    EXPECT_LT(chernoff_upper(0.5, 16), chernoff_upper(0.5, 8));
}

TEST(Experiments, ConcentrationEdgeCases) {
    const std::vector<ElementId> a{1, 2};
    const std::vector<ElementId> b{2, 3};
    // (1 + delta) J > 1: the upper event is impossible.
    const ConcentrationRun r = run_concentration(a, b, 16, 2.5, 500, 0);
    EXPECT_EQ(r.upper_hits, 0u);
    const ConcentrationRun none = run_concentration(a, b, 16, 0.5, 0, 0);
    const ResultTable t = concentration_table(none);
    EXPECT_TRUE(t.rows.empty());
    EXPECT_EQ(to_csv(t), "tail,t,J,delta,trials,seed,frequency,bound_t,bound_mu\n");
    EXPECT_THROW(run_concentration(a, b, 16, 0.0, 10, 0), InvalidParameters);
}

TEST(Experiments, BenchCountsHashEvaluations) {
    const std::vector<std::uint64_t> sizes{1, 100000};
    const std::vector<std::uint32_t> ts{16, 256};
    const auto pts = run_bench(sizes, ts, 10, 0);
    ASSERT_EQ(pts.size(), 8u);
    for (const BenchPoint& p : pts) {
        EXPECT_EQ(p.seeds, 10u);
        if (p.method == Method::MinHash) {
            EXPECT_EQ(p.mean_hash_evals, static_cast<double>(p.set_size) * p.t);
        } else if (p.set_size == 1) {
            EXPECT_LE(p.mean_hash_evals, 2.0 * p.t);
        } else {
            // One or two rounds suffice once |A| >> t ln t.
            EXPECT_LE(p.mean_hash_evals, 2.0 * p.set_size);
        }
    }
    EXPECT_EQ(bench_table(pts).rows.size(), 8u);
}

TEST(Experiments, BenchScalesSubMultiplicatively) {
    const std::vector<std::uint64_t> sizes{1000, 2000, 4000, 8000};
    const std::vector<std::uint32_t> ts{256};
    const auto pts = run_bench(sizes, ts, 10, 0, false);
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LE(pts[i].mean_hash_evals, 2.5 * pts[i - 1].mean_hash_evals);
    }
}

TEST(Experiments, SyntheticSetsAreDistinct) {
    auto s = synthetic_set(10000, 3);
    std::sort(s.begin(), s.end());
    EXPECT_EQ(std::unique(s.begin(), s.end()), s.end());
}

}  // namespace
}  // namespace fastsketch

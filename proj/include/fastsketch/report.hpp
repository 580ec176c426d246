#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fastsketch {

using Cell = std::variant<std::uint64_t, std::int64_t, double, std::string>;

// Column-ordered result rows, emitted as CSV or JSON lines. Emitting, parsing
// and re-emitting a table reproduces the original bytes in either format.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view name);

// RFC 4180 style: header line, then one line per row; fields containing
// ',', '"' or a line break are quoted. Doubles use the shortest round-trip
// representation.
std::string to_csv(const ResultTable& table);
ResultTable parse_csv(std::string_view text);

// One JSON object per row, keys in column order. A table without rows emits
// nothing.
std::string to_jsonl(const ResultTable& table);
ResultTable parse_jsonl(std::string_view text);

std::string render(const ResultTable& table, OutputFormat format);
ResultTable parse_rendered(std::string_view text, OutputFormat format);

std::string format_double(double v);

}  // namespace fastsketch

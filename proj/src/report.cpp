#include "fastsketch/report.hpp"

#include <charconv>
#include <json.hpp>

#include "fastsketch/error.hpp"

namespace fastsketch {
namespace {

using ojson = nlohmann::ordered_json;

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else {
                return std::to_string(v);
            }
        },
        c);
}

template <typename T>
bool parse_exact(std::string_view s, T& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// A field becomes numeric only if it is the canonical rendering of that
// number, so re-emission is byte-identical.
Cell classify(std::string_view field) {
    if (std::uint64_t u; parse_exact(field, u) && std::to_string(u) == field) return u;
    if (std::int64_t i; parse_exact(field, i) && std::to_string(i) == field) return i;
    if (double d; parse_exact(field, d) && format_double(d) == field) return d;
    return std::string(field);
}

bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out += s;
        return;
    }
    out += '"';
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

struct CsvField {
    std::string text;
    bool quoted = false;
};

std::vector<std::vector<CsvField>> split_csv(std::string_view text) {
    std::vector<std::vector<CsvField>> records;
    std::vector<CsvField> record;
    CsvField field;
    std::size_t i = 0;
    std::uint64_t line = 1;
    bool at_field_start = true;
    while (i < text.size()) {
        const char ch = text[i];
        if (at_field_start && ch == '"') {
            field.quoted = true;
            ++i;
            for (;;) {
                if (i >= text.size()) throw FormatError("unterminated quoted field", line);
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field.text += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (text[i] == '\n') ++line;
                field.text += text[i++];
            }
            at_field_start = false;
            if (i < text.size() && text[i] != ',' && text[i] != '\n') {
                throw FormatError("characters after closing quote", line);
            }
            continue;
        }
        if (ch == ',') {
            record.push_back(std::move(field));
            field = {};
            at_field_start = true;
        } else if (ch == '\n') {
            record.push_back(std::move(field));
            records.push_back(std::move(record));
            field = {};
            record.clear();
            at_field_start = true;
            ++line;
        } else {
            field.text += ch;
            at_field_start = false;
        }
        ++i;
    }
    if (!at_field_start || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw ContractViolation("row has " + std::to_string(row.size()) + " cells, table has " +
                                std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw InvalidParameters("unknown format \"" + std::string(name) + "\" (csv|json)");
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        append_field(out, table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            append_field(out, cell_text(row[c]));
        }
        out += '\n';
    }
    return out;
}

ResultTable parse_csv(std::string_view text) {
    const auto records = split_csv(text);
    ResultTable table;
    if (records.empty()) return table;
    for (const auto& f : records[0]) table.columns.push_back(f.text);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.columns.size()) {
            throw FormatError("wrong number of fields", r + 1);
        }
        std::vector<Cell> row;
        for (const auto& f : records[r]) {
            row.push_back(f.quoted ? Cell(f.text) : classify(f.text));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_jsonl(const ResultTable& table) {
    std::string out;
    for (const auto& row : table.rows) {
        ojson obj = ojson::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit([&](const auto& v) { obj[table.columns[c]] = v; }, row[c]);
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

ResultTable parse_jsonl(std::string_view text) {
    ResultTable table;
    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty()) continue;

        ojson obj;
        try {
            obj = ojson::parse(line);
        } catch (const ojson::parse_error& e) {
            throw FormatError(e.what(), line_no);
        }
        if (!obj.is_object()) throw FormatError("expected a JSON object", line_no);
        if (table.columns.empty() && table.rows.empty()) {
            for (const auto& [key, _] : obj.items()) table.columns.push_back(key);
        }
        std::vector<Cell> row;
        std::size_t c = 0;
        for (const auto& [key, value] : obj.items()) {
            if (c >= table.columns.size() || table.columns[c] != key) {
                throw FormatError("keys differ from the first row", line_no);
            }
            ++c;
            if (value.is_number_unsigned()) {
                row.emplace_back(value.get<std::uint64_t>());
            } else if (value.is_number_integer()) {
                row.emplace_back(value.get<std::int64_t>());
            } else if (value.is_number_float()) {
                row.emplace_back(value.get<double>());
            } else if (value.is_string()) {
                row.emplace_back(value.get<std::string>());
            } else {
                throw FormatError("unsupported value type for \"" + key + "\"", line_no);
            }
        }
        if (c != table.columns.size()) throw FormatError("missing keys", line_no);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render(const ResultTable& table, OutputFormat format) {
    return format == OutputFormat::Csv ? to_csv(table) : to_jsonl(table);
}

ResultTable parse_rendered(std::string_view text, OutputFormat format) {
    return format == OutputFormat::Csv ? parse_csv(text) : parse_jsonl(text);
}

}  // namespace fastsketch

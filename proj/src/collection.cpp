#include "fastsketch/collection.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fastsketch/error.hpp"

namespace fastsketch {

std::vector<SetRecord> parse_collection(std::istream& in, const CollectionOptions& opts) {
    std::vector<SetRecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw FormatError("expected <set-id><TAB><tokens>", line_no);
        }
        SetRecord rec;
        rec.id = line.substr(0, tab);
        if (!seen.insert(rec.id).second) {
            throw FormatError("duplicate set id \"" + rec.id + "\"", line_no);
        }

        std::string_view rest(line);
        rest.remove_prefix(tab + 1);
        while (!rest.empty()) {
            const auto start = rest.find_first_not_of(' ');
            if (start == std::string_view::npos) break;
            rest.remove_prefix(start);
            const auto end = rest.find(' ');
            const std::string_view tok = rest.substr(0, end);
            rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);

            if (opts.numeric) {
                ElementId v = 0;
                const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                    throw FormatError("bad numeric token \"" + std::string(tok) + "\"", line_no);
                }
                rec.elements.push_back(v);
            } else {
                rec.elements.push_back(tokenize(tok, opts.token_seed));
            }
        }
        if (rec.elements.empty()) {
            throw EmptyInput("set \"" + rec.id + "\" has no tokens (line " +
                             std::to_string(line_no) + ")");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<SetRecord> parse_collection(std::string_view text, const CollectionOptions& opts) {
    std::istringstream in{std::string(text)};
    return parse_collection(in, opts);
}

std::vector<SetRecord> load_collection(const std::string& path, const CollectionOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_collection(in, opts);
}

}  // namespace fastsketch

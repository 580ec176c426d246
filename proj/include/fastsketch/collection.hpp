#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "fastsketch/hashing.hpp"

namespace fastsketch {

// One named set.
struct SetRecord {
    std::string id;
    std::vector<ElementId> elements;
};

struct CollectionOptions {
    // Tokens are decimal u64 keys instead of strings to tokenize.
    bool numeric = false;
    // Seed for tokenize() when numeric is false.
    std::uint64_t token_seed = 0;
};

// Parses the text collection format: one set per line,
//   <set-id> TAB <token> <token> ...
// Blank lines are skipped. Errors carry the 1-based line number:
// FormatError for a missing tab, a bad numeric token or a duplicate id;
// EmptyInput for a line with no tokens.
std::vector<SetRecord> parse_collection(std::istream& in, const CollectionOptions& opts);
std::vector<SetRecord> parse_collection(std::string_view text, const CollectionOptions& opts);
std::vector<SetRecord> load_collection(const std::string& path, const CollectionOptions& opts);

}  // namespace fastsketch

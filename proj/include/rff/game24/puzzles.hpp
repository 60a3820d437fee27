#pragma once

// Puzzle files: plain text, one puzzle per line, space-separated integers.
// Lines are addressed 1-based, so "901-1000" selects lines 901..1000.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rff/game24/number_set.hpp"

namespace rff::game24 {

struct Puzzle {
    int index = 0;  ///< 1-based line number in the source file.
    NumberSet numbers;
};

struct IndexRange {
    int first = 1;
    int last = -1;  ///< Inclusive; -1 means through the end.

    [[nodiscard]] bool contains(int i) const { return i >= first && (last < 0 || i <= last); }
};

/// Parses "901-1000", "17" or "" (everything).
inline IndexRange parse_range(std::string_view text) {
    if (text.empty() || text == "all") return {};
    auto to_int = [&](std::string_view t) {
        int v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size() || v < 1) {
            throw std::invalid_argument("bad index range '" + std::string(text) + "'");
        }
        return v;
    };
    auto dash = text.find('-');
    if (dash == std::string_view::npos) {
        int v = to_int(text);
        return {v, v};
    }
    IndexRange r{to_int(text.substr(0, dash)), to_int(text.substr(dash + 1))};
    if (r.last < r.first) throw std::invalid_argument("empty index range '" + std::string(text) + "'");
    return r;
}

inline std::vector<Puzzle> read_puzzles(std::istream& in, IndexRange range = {}) {
    std::vector<Puzzle> out;
    std::string line;
    int index = 0;
    while (std::getline(in, line)) {
        ++index;
        if (!range.contains(index)) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back({index, parse_numbers(line)});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(index) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Puzzle> load_puzzles(const std::string& path, IndexRange range = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open puzzle file '" + path + "'");
    return read_puzzles(in, range);
}

inline void write_puzzles(std::ostream& out, const std::vector<Puzzle>& puzzles) {
    for (const auto& p : puzzles) out << p.numbers.key() << '\n';
}

}  // namespace rff::game24

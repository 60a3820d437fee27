#pragma once

// results.csv, one row per run:
//
//   puzzle_id,method,seed,outcome,visited_states,duration_ms,correct,answer
//
// outcome is Solved|Unsolved|StepLimit; correct is 1 when the answer was
// checked against the puzzle (Game of 24: the expression verifies; math:
// equals the ground truth), else 0. answer holds the answer for solved runs
// and the reason otherwise. Fields containing a comma, quote or newline are
// quoted with doubled quotes.

#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rff/core/trace.hpp"

namespace rff::bench {

struct RunResult {
    std::string puzzle_id;
    std::string method;
    std::uint64_t seed = 0;
    Outcome::Kind outcome = Outcome::Kind::Pending;
    std::uint64_t visited_states = 0;
    double duration_ms = 0;
    bool correct = false;
    std::string answer;

    bool operator==(const RunResult&) const = default;
};

inline constexpr std::string_view kCsvHeader = "puzzle_id,method,seed,outcome,visited_states,duration_ms,correct,answer";

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Splits one CSV record, reading more lines when a quoted field spans them.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0;; ++i) {
        if (i == line.size()) {
            if (!quoted) break;
            cur += '\n';
            if (!std::getline(in, line)) throw std::runtime_error("unterminated quoted CSV field");
            i = static_cast<std::size_t>(-1);
            continue;
        }
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return true;
}

}  // namespace detail

inline void write_csv(std::ostream& out, const std::vector<RunResult>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(3) << r.duration_ms;
        out << detail::csv_field(r.puzzle_id) << ',' << detail::csv_field(r.method) << ',' << r.seed << ','
            << to_string(r.outcome) << ',' << r.visited_states << ',' << ms.str() << ',' << (r.correct ? 1 : 0) << ','
            << detail::csv_field(r.answer) << '\n';
    }
}

inline std::vector<RunResult> read_csv(std::istream& in) {
    std::vector<std::string> f;
    if (!detail::read_record(in, f)) return {};
    std::string header;
    for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
    if (header != kCsvHeader) throw std::runtime_error("unexpected CSV header: " + header);
    std::vector<RunResult> rows;
    while (detail::read_record(in, f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 8) throw std::runtime_error("CSV row with " + std::to_string(f.size()) + " fields");
        RunResult r;
        r.puzzle_id = f[0];
        r.method = f[1];
        r.seed = std::stoull(f[2]);
        if (f[3] == "Solved") r.outcome = Outcome::Kind::Solved;
        else if (f[3] == "Unsolved") r.outcome = Outcome::Kind::Unsolved;
        else if (f[3] == "StepLimit") r.outcome = Outcome::Kind::StepLimit;
        else throw std::runtime_error("bad outcome '" + f[3] + "'");
        r.visited_states = std::stoull(f[4]);
        r.duration_ms = std::stod(f[5]);
        r.correct = f[6] == "1";
        r.answer = f[7];
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Per-method aggregate. accuracy = correct runs / runs.
struct MethodRow {
    std::string method;
    std::size_t runs = 0;
    std::size_t solved = 0;
    std::size_t correct = 0;
    double accuracy = 0;
    double mean_visited = 0;
    double mean_ms = 0;
};

struct ResultTable {
    std::vector<MethodRow> rows;  ///< In order of first appearance.
    std::string config;           ///< Echo of the run configuration.
};

inline ResultTable summarize(const std::vector<RunResult>& results, std::string config = {}) {
    ResultTable table{{}, std::move(config)};
    std::map<std::string, std::size_t> at;
    std::vector<double> visited_sum, ms_sum;
    for (const auto& r : results) {
        auto [it, fresh] = at.emplace(r.method, table.rows.size());
        if (fresh) {
            table.rows.push_back(MethodRow{r.method});
            visited_sum.push_back(0);
            ms_sum.push_back(0);
        }
        auto& row = table.rows[it->second];
        ++row.runs;
        row.solved += r.outcome == Outcome::Kind::Solved ? 1 : 0;
        row.correct += r.correct ? 1 : 0;
        visited_sum[it->second] += static_cast<double>(r.visited_states);
        ms_sum[it->second] += r.duration_ms;
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto& row = table.rows[i];
        const auto n = static_cast<double>(row.runs);
        row.accuracy = static_cast<double>(row.correct) / n;
        row.mean_visited = visited_sum[i] / n;
        row.mean_ms = ms_sum[i] / n;
    }
    return table;
}

inline void print_table(std::ostream& out, const ResultTable& table) {
    if (!table.config.empty()) out << table.config << '\n';
    out << std::left << std::setw(8) << "method" << std::right << std::setw(8) << "runs" << std::setw(8) << "solved"
        << std::setw(10) << "accuracy" << std::setw(10) << "visited" << std::setw(12) << "mean_ms" << '\n';
    for (const auto& r : table.rows) {
        out << std::left << std::setw(8) << r.method << std::right << std::setw(8) << r.runs << std::setw(8)
            << r.solved << std::setw(10) << std::fixed << std::setprecision(3) << r.accuracy << std::setw(10)
            << std::setprecision(2) << r.mean_visited << std::setw(12) << std::setprecision(2) << r.mean_ms << '\n';
    }
}

}  // namespace rff::bench

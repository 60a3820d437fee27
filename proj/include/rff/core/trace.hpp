#pragma once

// Search traces and their line-delimited text form.
//
// Serialized layout (one record per line, fields separated by TAB):
//
//   rff-trace<TAB>1
//   <seq><TAB><kind><TAB><depth>[<TAB><name>=<value>]...
//   outcome<TAB><Solved|Unsolved|StepLimit><TAB>visited=<n>[<TAB>answer=<text>|<TAB>reason=<text>]
//
// Detail fields keep the order in which the engine attached them. Values
// escape backslash, TAB, LF and CR as \\, \t, \n and \r.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rff {

enum class EventKind { BackwardStep, ForwardStep, StateCheck, Verify, Backtrack, Output };

constexpr std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::BackwardStep: return "BackwardStep";
        case EventKind::ForwardStep: return "ForwardStep";
        case EventKind::StateCheck: return "StateCheck";
        case EventKind::Verify: return "Verify";
        case EventKind::Backtrack: return "Backtrack";
        case EventKind::Output: return "Output";
    }
    return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (auto kind : {EventKind::BackwardStep, EventKind::ForwardStep, EventKind::StateCheck,
                      EventKind::Verify, EventKind::Backtrack, EventKind::Output}) {
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

struct Field {
    std::string name;
    std::string value;

    bool operator==(const Field&) const = default;
};

struct TraceEvent {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ForwardStep;
    int depth = 0;
    std::vector<Field> detail;

    [[nodiscard]] const std::string* field(std::string_view name) const {
        auto it = std::find_if(detail.begin(), detail.end(), [&](const Field& f) { return f.name == name; });
        return it == detail.end() ? nullptr : &it->value;
    }

    [[nodiscard]] std::string field_or(std::string_view name, std::string fallback = {}) const {
        const auto* value = field(name);
        return value ? *value : std::move(fallback);
    }

    bool operator==(const TraceEvent&) const = default;
};

struct Outcome {
    enum class Kind { Pending, Solved, Unsolved, StepLimit };

    Kind kind = Kind::Pending;
    std::string text;  ///< Answer when solved, reason when unsolved.

    static Outcome solved(std::string answer) { return {Kind::Solved, std::move(answer)}; }
    static Outcome unsolved(std::string reason) { return {Kind::Unsolved, std::move(reason)}; }
    static Outcome step_limit() { return {Kind::StepLimit, {}}; }

    [[nodiscard]] bool is_solved() const { return kind == Kind::Solved; }

    bool operator==(const Outcome&) const = default;
};

constexpr std::string_view to_string(Outcome::Kind kind) {
    switch (kind) {
        case Outcome::Kind::Pending: return "Pending";
        case Outcome::Kind::Solved: return "Solved";
        case Outcome::Kind::Unsolved: return "Unsolved";
        case Outcome::Kind::StepLimit: return "StepLimit";
    }
    return "?";
}

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered event log of one run. Sequence numbers come from a single counter,
/// so the log replays identically regardless of wall-clock timing.
class SearchTrace {
public:
    TraceEvent& append(EventKind kind, int depth, std::vector<Field> detail = {}) {
        events_.push_back(TraceEvent{next_seq_++, kind, depth, std::move(detail)});
        if (kind == EventKind::ForwardStep) ++visited_states_;
        return events_.back();
    }

    void set_outcome(Outcome outcome) { outcome_ = std::move(outcome); }

    [[nodiscard]] const std::vector<TraceEvent>& events() const { return events_; }
    [[nodiscard]] std::uint64_t visited_states() const { return visited_states_; }
    [[nodiscard]] const Outcome& outcome() const { return outcome_; }

    [[nodiscard]] std::size_t count(EventKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(events_.begin(), events_.end(), [&](const TraceEvent& e) { return e.kind == kind; }));
    }

    bool operator==(const SearchTrace&) const = default;

    /// Rebuilds a trace from explicit parts. Used by the parser; the counter
    /// is recomputed from the events rather than trusted.
    static SearchTrace from_events(std::vector<TraceEvent> events, Outcome outcome) {
        SearchTrace trace;
        for (auto& e : events) {
            if (e.seq != trace.next_seq_) {
                throw TraceFormatError("non-contiguous sequence number " + std::to_string(e.seq));
            }
            ++trace.next_seq_;
            if (e.kind == EventKind::ForwardStep) ++trace.visited_states_;
            trace.events_.push_back(std::move(e));
        }
        trace.outcome_ = std::move(outcome);
        return trace;
    }

private:
    std::vector<TraceEvent> events_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t visited_states_ = 0;
    Outcome outcome_;
};

namespace detail {

inline std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string unescape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (++i == text.size()) throw TraceFormatError("dangling escape");
        switch (text[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: throw TraceFormatError(std::string("bad escape \\") + text[i]);
        }
    }
    return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        parts.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline Field parse_field(std::string_view text) {
    auto eq = text.find('=');
    if (eq == std::string_view::npos) throw TraceFormatError("field without '=': " + std::string(text));
    return Field{std::string(text.substr(0, eq)), unescape(text.substr(eq + 1))};
}

}  // namespace detail

inline constexpr std::string_view kTraceHeader = "rff-trace\t1";

inline std::string serialize(const SearchTrace& trace) {
    std::ostringstream out;
    out << kTraceHeader << '\n';
    for (const auto& e : trace.events()) {
        out << e.seq << '\t' << to_string(e.kind) << '\t' << e.depth;
        for (const auto& f : e.detail) out << '\t' << f.name << '=' << detail::escape(f.value);
        out << '\n';
    }
    const auto& outcome = trace.outcome();
    out << "outcome\t" << to_string(outcome.kind) << "\tvisited=" << trace.visited_states();
    if (outcome.kind == Outcome::Kind::Solved) out << "\tanswer=" << detail::escape(outcome.text);
    if (outcome.kind == Outcome::Kind::Unsolved) out << "\treason=" << detail::escape(outcome.text);
    out << '\n';
    return out.str();
}

inline SearchTrace parse_trace(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) throw TraceFormatError("missing trace header");

    std::vector<TraceEvent> events;
    std::optional<Outcome> outcome;
    std::uint64_t visited = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (outcome) throw TraceFormatError("content after outcome line");
        auto parts = detail::split_tabs(line);
        if (parts[0] == "outcome") {
            if (parts.size() < 3) throw TraceFormatError("short outcome line");
            Outcome o;
            if (parts[1] == "Solved") o.kind = Outcome::Kind::Solved;
            else if (parts[1] == "Unsolved") o.kind = Outcome::Kind::Unsolved;
            else if (parts[1] == "StepLimit") o.kind = Outcome::Kind::StepLimit;
            else if (parts[1] == "Pending") o.kind = Outcome::Kind::Pending;
            else throw TraceFormatError("unknown outcome " + std::string(parts[1]));
            auto visited_field = detail::parse_field(parts[2]);
            if (visited_field.name != "visited") throw TraceFormatError("expected visited= field");
            visited = std::stoull(visited_field.value);
            if (parts.size() > 3) o.text = detail::parse_field(parts[3]).value;
            outcome = std::move(o);
            continue;
        }
        if (parts.size() < 3) throw TraceFormatError("short event line: " + line);
        TraceEvent e;
        e.seq = std::stoull(std::string(parts[0]));
        auto kind = parse_event_kind(parts[1]);
        if (!kind) throw TraceFormatError("unknown event kind " + std::string(parts[1]));
        e.kind = *kind;
        e.depth = std::stoi(std::string(parts[2]));
        for (std::size_t i = 3; i < parts.size(); ++i) e.detail.push_back(detail::parse_field(parts[i]));
        events.push_back(std::move(e));
    }
    if (!outcome) throw TraceFormatError("missing outcome line");
    auto trace = SearchTrace::from_events(std::move(events), std::move(*outcome));
    if (trace.visited_states() != visited) {
        throw TraceFormatError("visited counter disagrees with ForwardStep count");
    }
    return trace;
}

}  // namespace rff

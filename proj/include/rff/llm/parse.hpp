#pragma once

// Reply grammar. Keys are matched case-insensitively anywhere in the reply;
// the first occurrence wins and its value runs to the end of that line.
//
//   target   := "Target:" numbers ["," ] "because" move
//   move     := number op number "=" number
//   step     := ["Move:"] move ["," "leaving" numbers]
//   verdict  := "Verdict:" word | reply starting with yes/no
//   verify   := "Valid" | "Backtrack:" int | ... "step" int ...
//   need     := "Need:" name "," ("since" | "because") text
//   fact     := "Fact:" name "=" number
//   answer   := "Answer:" text
//
// number is an integer, a decimal or a/b; op is one of + - * / x X and the
// Unicode multiplication, division and minus signs.

#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/game24/number_set.hpp"

namespace rff::llm {

/// A reply that does not follow the grammar. Engines report it as AdapterFailure.
class ParseError : public AdapterError {
public:
    using AdapterError::AdapterError;
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n*`\"'");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n*`\"'.");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
    return s;
}

/// ASCII operators in place of the Unicode ones models like to use.
inline std::string normalize_ops(std::string s) {
    s = replace_all(std::move(s), "\xC3\x97", "*");      // multiplication sign
    s = replace_all(std::move(s), "\xC3\xB7", "/");      // division sign
    s = replace_all(std::move(s), "\xE2\x88\x92", "-");  // minus sign
    return s;
}

/// Value after "key:" on the first line that has it.
inline std::optional<std::string> keyed(std::string_view reply, std::string_view key) {
    const std::string low = lower(reply);
    const std::string needle = lower(key) + ":";
    auto pos = low.find(needle);
    if (pos == std::string::npos) return std::nullopt;
    pos += needle.size();
    auto end = reply.find('\n', pos);
    return std::string(reply.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
}

inline const std::string kNumber = R"((?:-?\d+(?:\.\d+)?(?:/\d+)?))";

}  // namespace detail

/// Integer, decimal ("2.5") or fraction ("8/3"), with "$" and thousands commas ignored.
inline std::optional<Rational> parse_number(std::string_view text) {
    std::string t;
    for (char c : text) {
        if (c != ',' && c != '$' && c != ' ') t += c;
    }
    if (t.size() > 1 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    if (auto r = parse_rational(t)) return r;
    auto dot = t.find('.');
    if (dot == std::string::npos || t.find('/') != std::string::npos) return std::nullopt;
    std::string frac = t.substr(dot + 1);
    auto whole = parse_rational(t.substr(0, dot) + frac);
    if (!whole || frac.empty()) return std::nullopt;
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    return *whole / Rational(scale);
}

/// Whitespace- or comma-separated numbers.
inline game24::NumberSet parse_number_list(std::string_view text) {
    std::vector<Rational> values;
    std::string token;
    auto flush = [&] {
        while (!token.empty() && token.back() == '.') token.pop_back();
        if (token.empty()) return;
        auto v = parse_number(token);
        if (!v) throw ParseError("not a number: '" + token + "'");
        values.push_back(*v);
        token.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == ',' || c == '\t' || c == '\r' || c == '\n') flush();
        else if (std::string_view("()[]{}*`").find(c) == std::string_view::npos) token += c;
    }
    flush();
    return game24::NumberSet(std::move(values));
}

/// First "a op b = c" in `text`. The arithmetic is not checked here.
inline std::optional<game24::ArithMove> find_move(std::string_view text) {
    static const std::regex re("(" + detail::kNumber + R"()\s*([-+*/xX])\s*()" + detail::kNumber + R"()\s*=\s*()" +
                               detail::kNumber + ")");
    const std::string s = detail::normalize_ops(std::string(text));
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    auto lhs = parse_number(m[1].str());
    auto rhs = parse_number(m[3].str());
    auto res = parse_number(m[4].str());
    auto op = parse_op(m[2].str()[0]);
    if (!lhs || !rhs || !res || !op) return std::nullopt;
    return game24::ArithMove{*lhs, *rhs, *op, *res};
}

struct TargetReply {
    game24::NumberSet values;
    game24::ArithMove transition;
};

inline TargetReply parse_target_reply(std::string_view reply) {
    auto line = detail::keyed(reply, "Target");
    if (!line) throw ParseError("no 'Target:' line");
    const std::string low = detail::lower(*line);
    auto because = low.find("because");
    if (because == std::string::npos) throw ParseError("target without a 'because' transition");
    auto move = find_move(line->substr(because + 7));
    if (!move) throw ParseError("transition is not 'a op b = c'");
    return {parse_number_list(line->substr(0, because)), *move};
}

struct MoveReply {
    game24::ArithMove move;
    std::optional<game24::NumberSet> leaving;
};

inline MoveReply parse_move_reply(std::string_view reply) {
    std::string line;
    if (auto keyed = detail::keyed(reply, "Move")) {
        line = *keyed;
    } else {
        // Otherwise the first line that holds a move.
        std::string_view rest = reply;
        while (!rest.empty()) {
            auto end = rest.find('\n');
            auto candidate = rest.substr(0, end);
            if (find_move(candidate)) {
                line = std::string(candidate);
                break;
            }
            rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
        }
    }
    auto move = find_move(line);
    if (!move) throw ParseError("no move 'a op b = c' in reply");
    MoveReply out{*move, std::nullopt};
    const std::string low = detail::lower(line);
    for (std::string_view word : {"leaving", "left:"}) {
        auto pos = low.find(word);
        if (pos == std::string::npos) continue;
        out.leaving = parse_number_list(line.substr(pos + word.size()));
        break;
    }
    return out;
}

/// yes -> true, no -> false.
inline bool parse_verdict(std::string_view reply) {
    std::string text = detail::keyed(reply, "Verdict").value_or(std::string(reply));
    std::string word;
    for (char c : detail::trim(text)) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (word == "yes" || word == "true" || word == "sure") return true;
    if (word == "no" || word == "false" || word == "impossible") return false;
    throw ParseError("no yes/no verdict in reply");
}

/// Value estimate for forward tree search: sure 1, likely 0.5, impossible 0.
inline double parse_evaluation(std::string_view reply) {
    std::string text = detail::lower(detail::keyed(reply, "Verdict").value_or(std::string(reply)));
    if (text.find("impossible") != std::string::npos) return 0.0;
    if (text.find("sure") != std::string::npos) return 1.0;
    if (text.find("likely") != std::string::npos) return 0.5;
    throw ParseError("no sure/likely/impossible verdict in reply");
}

struct VerifyReply {
    bool valid = false;
    std::optional<int> step;
};

inline VerifyReply parse_verify_reply(std::string_view reply) {
    static const std::regex step_re(R"(step\s*#?\s*(\d+))", std::regex::icase);
    if (auto line = detail::keyed(reply, "Backtrack")) {
        auto t = detail::trim(*line);
        std::size_t used = 0;
        try {
            int j = std::stoi(t, &used);
            return {false, j};
        } catch (const std::exception&) {
        }
    }
    const std::string text(reply);
    std::smatch m;
    if (std::regex_search(text, m, step_re)) return {false, std::stoi(m[1].str())};
    const std::string head = detail::lower(detail::trim(text.substr(0, text.find('\n'))));
    if (head == "valid" || head.rfind("valid", 0) == 0) return {true, std::nullopt};
    return {false, std::nullopt};
}

/// Depth the engine should revisit from depth i: the reported step clamped to
/// [1, i-1], or i-1 when the reply names none.
inline int clamp_backtrack(std::optional<int> j, int i) {
    if (i <= 1) return 0;
    if (!j) return i - 1;
    return std::clamp(*j, 1, i - 1);
}

struct NeedReply {
    std::string name;
    std::string rationale;
};

inline NeedReply parse_need_reply(std::string_view reply) {
    auto line = detail::keyed(reply, "Need");
    if (!line) throw ParseError("no 'Need:' line");
    const std::string low = detail::lower(*line);
    std::size_t cut = std::string::npos, skip = 0;
    for (std::string_view word : {"since", "because"}) {
        auto pos = low.find(word);
        if (pos < cut) {
            cut = pos;
            skip = word.size();
        }
    }
    if (cut == std::string::npos) throw ParseError("need without a 'since' rationale");
    std::string name = detail::trim(line->substr(0, cut));
    while (!name.empty() && (name.back() == ',' || name.back() == ' ')) name.pop_back();
    if (name.empty()) throw ParseError("empty quantity in 'Need:' line");
    return {name, detail::trim(line->substr(cut + skip))};
}

struct FactReply {
    std::string name;
    Rational value;
};

inline FactReply parse_fact_reply(std::string_view reply) {
    auto line = detail::keyed(reply, "Fact");
    if (!line) throw ParseError("no 'Fact:' line");
    auto eq = line->rfind('=');
    if (eq == std::string::npos) throw ParseError("fact without '='");
    std::string name = detail::trim(line->substr(0, eq));
    static const std::regex num_re(R"(-?\$?[\d,]*\d(?:\.\d+)?(?:/\d+)?)");
    const std::string rhs = line->substr(eq + 1);
    std::smatch m;
    if (name.empty() || !std::regex_search(rhs, m, num_re)) throw ParseError("fact is not 'name = number'");
    auto value = parse_number(m.str());
    if (!value) throw ParseError("fact value is not a number: '" + m.str() + "'");
    return {name, *value};
}

/// Text after "Answer:", trimmed.
inline std::string parse_answer_text(std::string_view reply) {
    auto line = detail::keyed(reply, "Answer");
    if (!line) throw ParseError("no 'Answer:' line");
    auto text = detail::trim(*line);
    if (text.empty()) throw ParseError("empty answer");
    return text;
}

inline Rational parse_answer_number(std::string_view reply) {
    static const std::regex num_re(R"(-?\$?[\d,]*\d(?:\.\d+)?(?:/\d+)?)");
    const std::string text = parse_answer_text(reply);
    std::smatch m;
    if (!std::regex_search(text, m, num_re)) throw ParseError("answer is not a number: '" + text + "'");
    auto value = parse_number(m.str());
    if (!value) throw ParseError("answer is not a number: '" + text + "'");
    return *value;
}

}  // namespace rff::llm

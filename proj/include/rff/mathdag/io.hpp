#pragma once

// Problem files are JSON Lines. A structured record looks like
//
//   {"id":"p1","variables":[{"name":"a","value":"2"},
//                           {"name":"c","op":"+","lhs":"a","rhs":"b"}],
//    "goal":"c","depth":2,"answer":"5","text":"..."}
//
// and a GSM8K record ({"question": ..., "answer": "...\n#### 72"}) loads as a
// text-only problem whose ground truth is the number after "####".

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rff/mathdag/problem.hpp"

namespace rff::mathdag {

/// Number after the last "####", with thousands separators removed.
inline std::optional<Rational> parse_gsm8k_answer(const std::string& text) {
    auto pos = text.rfind("####");
    if (pos == std::string::npos) return std::nullopt;
    std::string digits;
    for (char c : text.substr(pos + 4)) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '$') continue;
        digits += c;
    }
    if (auto r = parse_rational(digits)) return r;
    // Decimal answers such as "2.5".
    auto dot = digits.find('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string frac = digits.substr(dot + 1);
    auto whole = parse_rational(digits.substr(0, dot) + frac);
    if (!whole || frac.empty()) return std::nullopt;
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    return *whole / Rational(scale);
}

inline nlohmann::json to_json(const DagProblem& p) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& d : p.variables) {
        if (d.literal) {
            vars.push_back({{"name", d.name}, {"value", to_string(d.value)}});
        } else {
            vars.push_back({{"name", d.name}, {"op", std::string(1, symbol(d.op))}, {"lhs", d.lhs}, {"rhs", d.rhs}});
        }
    }
    nlohmann::json j{{"id", p.id}, {"variables", vars}, {"goal", p.goal}, {"depth", p.depth}};
    if (p.answer) j["answer"] = to_string(*p.answer);
    if (!p.surface_text.empty()) j["text"] = p.surface_text;
    return j;
}

inline DagProblem problem_from_json(const nlohmann::json& j) {
    DagProblem p;
    if (j.contains("question")) {
        p.surface_text = j.at("question").get<std::string>();
        p.id = j.value("id", std::string());
        if (j.contains("answer")) {
            p.answer = parse_gsm8k_answer(j.at("answer").get<std::string>());
            if (!p.answer) throw ProblemError("GSM8K record without a '#### <number>' answer");
        }
        return p;
    }
    p.id = j.value("id", std::string());
    for (const auto& v : j.at("variables")) {
        std::string name = v.at("name").get<std::string>();
        if (v.contains("value")) {
            auto value = parse_rational(v.at("value").get<std::string>());
            if (!value) throw ProblemError("bad value for '" + name + "'");
            p.variables.push_back(literal(std::move(name), *value));
            continue;
        }
        auto op = v.at("op").get<std::string>();
        if (op.size() != 1 || !parse_op(op[0])) throw ProblemError("bad operator '" + op + "'");
        p.variables.push_back(
            binary(std::move(name), v.at("lhs").get<std::string>(), *parse_op(op[0]), v.at("rhs").get<std::string>()));
    }
    p.goal = j.at("goal").get<std::string>();
    if (j.contains("answer")) {
        auto a = parse_rational(j.at("answer").get<std::string>());
        if (!a) throw ProblemError("bad answer field");
        p.answer = *a;
    }
    p.surface_text = j.value("text", std::string());
    validate(p);
    p.depth = depth_of(p, p.goal);
    return p;
}

inline std::vector<DagProblem> read_problems(std::istream& in) {
    std::vector<DagProblem> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(problem_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw ProblemError("record " + std::to_string(lineno) + ": " + e.what());
        }
        if (out.back().id.empty()) out.back().id = "line" + std::to_string(lineno);
    }
    return out;
}

inline std::vector<DagProblem> load_problems(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    return read_problems(in);
}

inline void write_problems(std::ostream& out, const std::vector<DagProblem>& problems) {
    for (const auto& p : problems) out << to_json(p).dump() << '\n';
}

}  // namespace rff::mathdag

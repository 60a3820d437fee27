#pragma once

// Prompt templates. Slots are written {name}; the engines fill
//   current     the current state (numbers, or known facts)
//   target      the target state
//   avoid       previously failed attempts, one per line
//   background  the problem text (math) or the original numbers (verifier)
// Every template instructs the model to answer in one fixed line format so
// parse.hpp can read it back.
//
// On disk a template set is a directory of "<domain>.<role>.txt" files; any
// file present replaces the built-in text for that pair.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rff/core/config.hpp"
#include "rff/llm/client.hpp"
#include "rff/llm/config.hpp"

namespace rff::llm {

enum class Role { LastStep, Forward, StateCheck, Verify, Output, CotSolve, Propose, Evaluate };

inline constexpr Role kRoles[] = {Role::LastStep, Role::Forward,  Role::StateCheck, Role::Verify,
                                  Role::Output,   Role::CotSolve, Role::Propose,    Role::Evaluate};

constexpr std::string_view to_string(Role r) {
    switch (r) {
        case Role::LastStep: return "last_step";
        case Role::Forward: return "forward";
        case Role::StateCheck: return "state_check";
        case Role::Verify: return "verify";
        case Role::Output: return "output";
        case Role::CotSolve: return "cot";
        case Role::Propose: return "propose";
        case Role::Evaluate: return "evaluate";
    }
    return "?";
}

using Slots = std::map<std::string, std::string>;

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PromptTemplate {
    Role role = Role::LastStep;
    Domain domain = Domain::Game24;
    std::string text;
    Slots example;              ///< Slot values of the worked example.
    std::string example_reply;  ///< What a correct reply to the example looks like.

    /// Slot names in order of first appearance.
    [[nodiscard]] std::vector<std::string> slots() const {
        std::vector<std::string> out;
        for (const auto& piece : pieces()) {
            if (piece.slot && std::find(out.begin(), out.end(), piece.text) == out.end()) out.push_back(piece.text);
        }
        return out;
    }

    [[nodiscard]] std::string render(const Slots& values) const {
        std::string out;
        for (const auto& piece : pieces()) {
            if (!piece.slot) {
                out += piece.text;
                continue;
            }
            auto it = values.find(piece.text);
            if (it == values.end()) throw TemplateError("no value for slot {" + piece.text + "}");
            out += it->second;
        }
        return out;
    }

    /// Inverse of render for text whose slot values do not contain the
    /// literal text that follows them. nullopt when `rendered` does not fit.
    [[nodiscard]] std::optional<Slots> extract(std::string_view rendered) const {
        auto parts = pieces();
        Slots out;
        std::size_t pos = 0;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const auto& piece = parts[k];
            if (!piece.slot) {
                if (rendered.substr(pos, piece.text.size()) != piece.text) return std::nullopt;
                pos += piece.text.size();
                continue;
            }
            std::size_t end = rendered.size();
            if (k + 1 < parts.size()) {
                end = rendered.find(parts[k + 1].text, pos);
                if (end == std::string_view::npos) return std::nullopt;
            }
            std::string value(rendered.substr(pos, end - pos));
            auto [it, fresh] = out.emplace(piece.text, value);
            if (!fresh && it->second != value) return std::nullopt;
            pos = end;
        }
        if (pos != rendered.size()) return std::nullopt;
        return out;
    }

private:
    struct Piece {
        bool slot;
        std::string text;
    };

    [[nodiscard]] std::vector<Piece> pieces() const {
        std::vector<Piece> out;
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto open = text.find('{', pos);
            auto close = open == std::string::npos ? open : text.find('}', open);
            bool is_slot = close != std::string::npos && close > open + 1;
            if (is_slot) {
                for (std::size_t i = open + 1; i < close; ++i) {
                    char c = text[i];
                    is_slot = is_slot && ((c >= 'a' && c <= 'z') || c == '_');
                }
            }
            if (!is_slot) {
                auto stop = open == std::string::npos ? text.size() : open + 1;
                if (!out.empty() && !out.back().slot) out.back().text += text.substr(pos, stop - pos);
                else out.push_back({false, text.substr(pos, stop - pos)});
                pos = stop;
                continue;
            }
            if (open > pos) {
                if (!out.empty() && !out.back().slot) out.back().text += text.substr(pos, open - pos);
                else out.push_back({false, text.substr(pos, open - pos)});
            }
            out.push_back({true, text.substr(open + 1, close - open - 1)});
            pos = close + 1;
        }
        return out;
    }
};

/// Slots the engines fill for each (domain, role).
inline std::vector<std::string> required_slots(Domain d, Role r) {
    if (d == Domain::Game24) {
        switch (r) {
            case Role::LastStep:
            case Role::Forward: return {"current", "target", "avoid"};
            case Role::StateCheck: return {"current", "target"};
            case Role::Verify: return {"background", "current"};
            case Role::Output:
            case Role::CotSolve:
            case Role::Propose:
            case Role::Evaluate: return {"current"};
        }
    }
    switch (r) {
        case Role::LastStep:
        case Role::Forward:
        case Role::StateCheck: return {"background", "current", "target"};
        case Role::Verify:
        case Role::Output:
        case Role::CotSolve:
        case Role::Propose:
        case Role::Evaluate: return {"background", "current"};
    }
    return {};
}

namespace detail {

inline std::vector<PromptTemplate> builtin_templates() {
    std::vector<PromptTemplate> t;
    auto add = [&](Domain d, Role r, std::string text, Slots example, std::string reply) {
        t.push_back({r, d, std::move(text), std::move(example), std::move(reply)});
    };

    add(Domain::Game24, Role::LastStep,
        "We are playing the Game of 24 and reason backwards from the target.\n"
        "Start numbers: {current}\n"
        "Target numbers: {target}\n"
        "Name the numbers we must hold one step before the target, and the arithmetic step "
        "(+ - * /) that turns them into the target numbers. Numbers of the target that the step "
        "does not touch are carried over unchanged.\n"
        "These earlier answers failed, do not give them again:\n{avoid}\n"
        "Reply with exactly one line:\n"
        "Target: <numbers separated by spaces>, because <a> <op> <b> = <c>",
        {{"current", "1 2 12 12"}, {"target", "24"}, {"avoid", "(none)"}}, "Target: 12 12, because 12 + 12 = 24");

    add(Domain::Game24, Role::Forward,
        "We are playing the Game of 24 and reason forwards towards a target.\n"
        "Current numbers: {current}\n"
        "Target numbers: {target}\n"
        "Pick two of the current numbers and combine them with one of + - * / so that the numbers "
        "left over get closer to the target numbers.\n"
        "These results already failed, do not produce them again:\n{avoid}\n"
        "Reply with exactly one line:\n"
        "Move: <a> <op> <b> = <c>, leaving <remaining numbers>",
        {{"current", "2 3 4"}, {"target", "4 6"}, {"avoid", "(none)"}}, "Move: 2 * 3 = 6, leaving 4 6");

    add(Domain::Game24, Role::StateCheck,
        "We are playing the Game of 24.\n"
        "Current numbers: {current}\n"
        "Target numbers: {target}\n"
        "Are the current numbers equal to the target numbers, or can one arithmetic step "
        "(+ - * / on two of them) turn them into the target numbers?\n"
        "Reply with exactly one line:\n"
        "Verdict: yes|no",
        {{"current", "4 6"}, {"target", "24"}}, "Verdict: yes");

    add(Domain::Game24, Role::Verify,
        "Check this Game of 24 solution. Every start number must be used exactly once and every "
        "step must be exact arithmetic on numbers that are available at that point.\n"
        "Start numbers: {background}\n"
        "Steps:\n{current}\n"
        "If all steps are correct reply with the single line \"Valid\". Otherwise reply with "
        "exactly one line:\n"
        "Backtrack: <number of the last step that is still correct>",
        {{"background", "1 2 12 12"}, {"current", "1. 2 - 1 = 1\n2. 12 + 12 = 24\n3. 24 * 1 = 24"}}, "Valid");

    add(Domain::Game24, Role::Output,
        "Write the solution of the Game of 24 for the numbers {current} as one expression.\n"
        "Reply with exactly one line:\n"
        "Answer: <expression>",
        {{"current", "1 2 12 12"}}, "Answer: (12 + 12) * (2 - 1)");

    add(Domain::Game24, Role::CotSolve,
        "Use the numbers {current} with + - * / to obtain 24. Use every number exactly once. "
        "Work step by step, combining two numbers per step.\n"
        "Finish with exactly one line:\n"
        "Answer: <expression>",
        {{"current", "4 4 6 8"}},
        "4 + 8 = 12 (left: 4 6 12)\n6 - 4 = 2 (left: 2 12)\n2 * 12 = 24 (left: 24)\nAnswer: (6 - 4) * (4 + 8)");

    add(Domain::Game24, Role::Propose,
        "Numbers: {current}\n"
        "List possible next steps of the Game of 24, one per line, in the form:\n"
        "<a> <op> <b> = <c> (left: <remaining numbers>)",
        {{"current", "4 9 10 13"}}, "13 - 9 = 4 (left: 4 4 10)\n10 - 4 = 6 (left: 6 9 13)\n4 + 9 = 13 (left: 10 13 13)");

    add(Domain::Game24, Role::Evaluate,
        "Numbers: {current}\n"
        "Can these numbers reach 24 with + - * /, each used exactly once?\n"
        "Reply with exactly one line:\n"
        "Verdict: sure|likely|impossible",
        {{"current", "4 6"}}, "Verdict: sure");

    add(Domain::Math, Role::LastStep,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "We want to find {target}. Working backwards, which single quantity that is not known yet "
        "is needed next?\n"
        "Reply with exactly one line:\n"
        "Need: <quantity>, since <how it is used>",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "pen = 3"},
         {"target", "the answer"}},
        "Need: book, since answer = pen + book");

    add(Domain::Math, Role::Forward,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "Work out one new quantity that helps to find {target}.\n"
        "Reply with exactly one line:\n"
        "Fact: <quantity> = <number>",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "pen = 3"},
         {"target", "book"}},
        "Fact: book = 8");

    add(Domain::Math, Role::StateCheck,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "Do the known facts, or the problem statement itself, already give {target}?\n"
        "Reply with exactly one line:\n"
        "Verdict: yes|no",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "pen = 3, book = 8"},
         {"target", "book"}},
        "Verdict: yes");

    add(Domain::Math, Role::Verify,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "Are all known facts correct? Reply with the single line \"Valid\", or with "
        "\"Backtrack: <number of the last correct fact>\".",
        {{"background", "A pen costs 3 dollars. What does a pen cost?"}, {"current", "1. pen = 3"}}, "Valid");

    add(Domain::Math, Role::Output,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "Give the final answer to the question.\n"
        "Reply with exactly one line:\n"
        "Answer: <number>",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "pen = 3, book = 8, answer = 11"}},
        "Answer: 11");

    add(Domain::Math, Role::CotSolve,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "Solve the problem step by step.\n"
        "Finish with exactly one line:\n"
        "Answer: <number>",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "(none)"}},
        "The book costs 3 + 5 = 8. Together 3 + 8 = 11.\nAnswer: 11");

    add(Domain::Math, Role::Propose,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "List quantities that can be computed next, one per line:\n"
        "Fact: <quantity> = <number>",
        {{"background", "A pen costs 3 dollars and a book costs 5 dollars more than a pen. What do both cost together?"},
         {"current", "pen = 3"}},
        "Fact: book = 8");

    add(Domain::Math, Role::Evaluate,
        "Problem: {background}\n"
        "Known facts: {current}\n"
        "How promising are these facts for answering the question?\n"
        "Reply with exactly one line:\n"
        "Verdict: sure|likely|impossible",
        {{"background", "A pen costs 3 dollars. What does a pen cost?"}, {"current", "pen = 3"}}, "Verdict: sure");
    return t;
}

}  // namespace detail

inline std::string template_file_name(Domain d, Role r) {
    return std::string(to_string(d)) + "." + std::string(to_string(r)) + ".txt";
}

class TemplateSet {
public:
    /// The built-in set.
    TemplateSet() {
        for (auto& t : detail::builtin_templates()) {
            auto key = std::make_pair(t.domain, t.role);
            templates_.emplace(key, std::move(t));
        }
    }

    /// Built-ins overridden by any "<domain>.<role>.txt" in `dir`.
    static TemplateSet load(const std::filesystem::path& dir) {
        if (!std::filesystem::is_directory(dir)) throw TemplateError("not a template directory: " + dir.string());
        TemplateSet set;
        for (auto d : {Domain::Game24, Domain::Math}) {
            for (auto r : kRoles) {
                auto path = dir / template_file_name(d, r);
                if (!std::filesystem::exists(path)) continue;
                std::ifstream in(path);
                std::stringstream buf;
                buf << in.rdbuf();
                std::string text = buf.str();
                while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
                set.set_text(d, r, std::move(text), path.string());
            }
        }
        return set;
    }

    void set_text(Domain d, Role r, std::string text, const std::string& origin = "template") {
        PromptTemplate& t = templates_.at({d, r});
        PromptTemplate candidate = t;
        candidate.text = std::move(text);
        auto present = candidate.slots();
        for (const auto& need : required_slots(d, r)) {
            if (std::find(present.begin(), present.end(), need) == present.end()) {
                throw TemplateError(origin + ": missing slot {" + need + "}");
            }
        }
        for (const auto& name : present) {
            if (!candidate.example.count(name)) throw TemplateError(origin + ": unknown slot {" + name + "}");
        }
        t = std::move(candidate);
    }

    [[nodiscard]] const PromptTemplate& get(Domain d, Role r) const { return templates_.at({d, r}); }

    /// User message for `values`, preceded by up to `shots` worked examples
    /// (only one exists per template).
    [[nodiscard]] std::vector<Message> conversation(Domain d, Role r, const Slots& values, int shots) const {
        const auto& t = get(d, r);
        std::vector<Message> out;
        if (shots > 0) {
            out.push_back({"user", t.render(t.example)});
            out.push_back({"assistant", t.example_reply});
        }
        out.push_back({"user", t.render(values)});
        return out;
    }

private:
    std::map<std::pair<Domain, Role>, PromptTemplate> templates_;
};

}  // namespace rff::llm

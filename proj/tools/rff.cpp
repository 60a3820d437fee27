// rff: solve single puzzles, run benchmarks, build dataset variants and
// generate math problems.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rff/bench/runner.hpp"
#include "rff/game24/solver.hpp"
#include "rff/mathdag/generator.hpp"
#include "rff/mathdag/io.hpp"

namespace {

using namespace rff;

constexpr int kExitUnsolved = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitAuth = 4;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EngineFlags {
    int max_steps = EngineConfig{}.max_steps;
    int width = EngineConfig{}.width;
    std::uint64_t seed = 0;
    std::string adapter = "oracle";
    std::string ranking = "guided";
    int tree_width = 5;

    void add(CLI::App& app) {
        app.add_option("-L,--max-steps", max_steps, "Step limit L")->capture_default_str();
        app.add_option("-n,--width", width, "Candidate limit n per step")->capture_default_str();
        app.add_option("--seed", seed, "Base seed")->capture_default_str();
        app.add_option("--adapter", adapter, "oracle | llm")->capture_default_str();
        app.add_option("--ranking", ranking, "Oracle candidate order: guided | shuffled")->capture_default_str();
        app.add_option("--tree-width", tree_width, "Beam width b for the tree baseline")->capture_default_str();
    }

    [[nodiscard]] EngineConfig engine() const {
        EngineConfig cfg;
        cfg.max_steps = max_steps;
        cfg.width = width;
        cfg.seed = seed;
        return cfg;
    }

    [[nodiscard]] game24::Ranking parsed_ranking() const {
        if (ranking == "guided") return game24::Ranking::Guided;
        if (ranking == "shuffled") return game24::Ranking::Shuffled;
        throw ConfigError("unknown ranking '" + ranking + "' (expected guided|shuffled)");
    }
};

struct LlmFlags {
    llm::LlmConfig base;
    std::optional<double> temperature;
    long timeout_ms = base.timeout.count();
    std::string templates, record, replay;

    void add(CLI::App& app) {
        const std::string g = "LLM adapter";
        app.add_option("--base-url", base.base_url, "OpenAI-compatible endpoint")->group(g)->capture_default_str();
        app.add_option("--model", base.model)->group(g)->capture_default_str();
        app.add_option("--api-key-env", base.api_key_env, "Environment variable holding the key")
            ->group(g)
            ->capture_default_str();
        app.add_option("--temperature", temperature, "Default 0.7 for game24, 0 for math")->group(g);
        app.add_option("--max-retries", base.max_retries)->group(g)->capture_default_str();
        app.add_option("--timeout-ms", timeout_ms, "Per-request timeout")->group(g)->capture_default_str();
        app.add_option("--shots", base.shots, "Worked examples per prompt (0 or 1)")->group(g)->capture_default_str();
        app.add_option("--max-concurrency", base.max_concurrency, "Requests in flight")->group(g)->capture_default_str();
        app.add_option("--templates", templates, "Directory overriding the built-in prompt templates")->group(g);
        app.add_option("--record", record, "Record every exchange into this cassette file")->group(g);
        app.add_option("--replay", replay, "Answer requests from this cassette file")->group(g);
    }

    [[nodiscard]] llm::LlmConfig config(llm::Domain d) const {
        auto c = base;
        c.temperature = temperature.value_or(llm::LlmConfig::for_domain(d).temperature);
        c.timeout = std::chrono::milliseconds(timeout_ms);
        return c;
    }
};

bench::RunSpec make_spec(const EngineFlags& e, const LlmFlags& l, llm::Domain domain, const std::vector<std::string>& methods) {
    bench::RunSpec spec;
    spec.domain = domain;
    spec.engine = e.engine();
    spec.adapter = bench::parse_adapter(e.adapter);
    spec.ranking = e.parsed_ranking();
    spec.tree_width = e.tree_width;
    spec.methods.clear();
    for (const auto& m : methods) spec.methods.push_back(bench::parse_method(m));
    if (spec.adapter == bench::AdapterKind::Llm) spec.llm = l.config(domain);
    spec.templates_dir = l.templates;
    spec.record_cassette = l.record;
    spec.replay_cassette = l.replay;
    return spec;
}

int print_outcome(const SearchTrace& trace) {
    const auto& o = trace.outcome();
    std::cout << "outcome: " << to_string(o.kind) << '\n';
    if (o.is_solved()) {
        std::cout << "answer: " << o.text << '\n';
    } else if (!o.text.empty()) {
        std::cout << "reason: " << o.text << '\n';
    }
    std::cout << "visited_states: " << trace.visited_states() << '\n';
    return o.is_solved() ? 0 : kExitUnsolved;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rff: bidirectional search solver, benchmark runner and dataset tools"};
    app.set_config("--config", "", "TOML or INI file with option values");
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Solve one Game of 24 puzzle or one math problem");
    EngineFlags solve_engine;
    LlmFlags solve_llm;
    std::vector<std::string> numbers;
    std::string solve_method;
    std::string problems_path;
    int problem_index = 1;
    std::optional<std::uint64_t> gen_seed;
    int gen_depth = 4, gen_width = 2;
    std::string trace_out;
    bool show_trace = false;
    solve->add_option("numbers", numbers, "Game of 24 numbers, e.g. 4 9 10 13");
    solve->add_option("--method", solve_method, "rfft | tree | cot for game24; rffg | cot for math");
    solve->add_option("--problems", problems_path, "Math problems (JSONL)");
    solve->add_option("--index", problem_index, "1-based problem position in --problems")->capture_default_str();
    solve->add_option("--generate", gen_seed, "Solve a generated math problem with this seed");
    solve->add_option("--depth", gen_depth, "Depth of the generated problem")->capture_default_str();
    solve->add_option("--dag-width", gen_width, "Width of the generated problem")->capture_default_str();
    solve->add_option("--trace", trace_out, "Write the search trace to this file");
    solve->add_flag("--show-trace", show_trace, "Print the search trace");
    solve_engine.add(*solve);
    solve_llm.add(*solve);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run methods over a dataset and tabulate the results");
    EngineFlags bench_engine;
    LlmFlags bench_llm;
    std::vector<std::string> bench_methods;
    std::string domain_name = "game24";
    std::string dataset;
    std::string range_text;
    std::string out_dir = "bench_out";
    int repeat = 1, jobs = 1;
    bench_cmd->add_option("--method", bench_methods, "rfft | rffg | cot | tree (repeatable)")->required();
    bench_cmd->add_option("--domain", domain_name, "game24 | math")->capture_default_str();
    bench_cmd->add_option("--dataset", dataset, "Puzzle file (game24) or JSONL problems (math)")->required();
    bench_cmd->add_option("--range", range_text, "1-based item range, e.g. 901-1000");
    bench_cmd->add_option("--repeat", repeat, "Runs per item; seeds are seed, seed+1, ...")->capture_default_str();
    bench_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
    bench_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    bench_engine.add(*bench_cmd);
    bench_llm.add(*bench_cmd);

    // variants
    auto* variants = app.add_subcommand("variants", "Append a redundant 1 to every puzzle");
    std::string variants_in, variants_out;
    std::string variants_range;
    bool variants_check = false;
    variants->add_option("--in", variants_in, "Puzzle file")->required();
    variants->add_option("--out", variants_out, "Output file (default: stdout)");
    variants->add_option("--range", variants_range, "1-based puzzle range");
    variants->add_flag("--check", variants_check, "Confirm every solvable puzzle stays solvable");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate synthetic math problems as JSONL");
    int gen_count = 100, gen_min = 1, gen_max = 8, gen_w = 2;
    std::uint64_t gen_base_seed = 0;
    std::string gen_out;
    gen->add_option("--count", gen_count, "Problems to generate")->capture_default_str();
    gen->add_option("--min-depth", gen_min)->capture_default_str();
    gen->add_option("--max-depth", gen_max)->capture_default_str();
    gen->add_option("--width", gen_w, "Independent computations per problem")->capture_default_str();
    gen->add_option("--seed", gen_base_seed, "Seed of the first problem")->capture_default_str();
    gen->add_option("--out", gen_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*solve) {
            const bool math = !problems_path.empty() || gen_seed.has_value();
            if (math && !numbers.empty()) throw ConfigError("give either numbers or a math problem, not both");
            if (!math && numbers.empty()) throw ConfigError("nothing to solve: give numbers, --problems or --generate");
            auto domain = math ? llm::Domain::Math : llm::Domain::Game24;
            if (solve_method.empty()) solve_method = math ? "rffg" : "rfft";
            auto spec = make_spec(solve_engine, solve_llm, domain, {solve_method});
            bench::validate(spec);

            bench::Instance item;
            if (!math) {
                std::string joined;
                for (const auto& n : numbers) joined += n + " ";
                try {
                    item = {joined, game24::parse_numbers(joined), std::nullopt};
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
                item.id = item.numbers->key();
            } else if (gen_seed) {
                item.problem = mathdag::generate_problem(*gen_seed, gen_depth, gen_width);
                item.id = item.problem->id;
                std::cout << mathdag::render_text(*item.problem) << '\n';
            } else {
                std::vector<mathdag::DagProblem> all;
                try {
                    all = mathdag::load_problems(problems_path);
                } catch (const std::runtime_error& e) {
                    throw IoError(e.what());
                }
                if (problem_index < 1 || problem_index > static_cast<int>(all.size())) {
                    throw ConfigError("--index out of range (file has " + std::to_string(all.size()) + " problems)");
                }
                item.problem = all[static_cast<std::size_t>(problem_index - 1)];
                item.id = item.problem->id;
            }

            std::optional<bench::LlmBackend> backend;
            if (spec.adapter == bench::AdapterKind::Llm) backend = bench::LlmBackend::open(spec);
            auto rec = bench::run_one(spec, spec.methods.front(), item, spec.engine.seed, backend ? &*backend : nullptr);
            if (backend) backend->finish();
            if (show_trace) std::cout << serialize(rec.trace);
            if (!trace_out.empty()) {
                std::ofstream out(trace_out, std::ios::binary);
                out << serialize(rec.trace);
                if (!out) throw IoError("cannot write " + trace_out);
            }
            return print_outcome(rec.trace);
        }

        if (*bench_cmd) {
            auto spec = make_spec(bench_engine, bench_llm, llm::parse_domain(domain_name), bench_methods);
            spec.dataset = dataset;
            try {
                spec.range = game24::parse_range(range_text);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            spec.repeat = repeat;
            spec.jobs = jobs;
            spec.out_dir = out_dir;
            bench::validate(spec);
            if (!std::filesystem::exists(dataset)) throw IoError("dataset not found: " + dataset);
            auto report = bench::run_bench(spec);
            bench::print_table(std::cout, report.table);
            std::cout << "results: " << (std::filesystem::path(out_dir) / "results.csv").string() << '\n';
            return 0;
        }

        if (*variants) {
            std::vector<game24::Puzzle> puzzles;
            try {
                puzzles = game24::load_puzzles(variants_in, game24::parse_range(variants_range));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            std::vector<game24::Puzzle> out;
            std::size_t odd = 0, solvable = 0, kept = 0;
            for (const auto& p : puzzles) {
                if (p.numbers.size() != 4) ++odd;
                auto with_one = game24::add_redundant_one(p.numbers);
                if (variants_check) {
                    if (game24::brute_force_solvable(p.numbers).solvable) {
                        ++solvable;
                        if (game24::brute_force_solvable(with_one).solvable) {
                            ++kept;
                        } else {
                            std::cerr << "not preserved: line " << p.index << " (" << p.numbers.key() << ")\n";
                        }
                    }
                }
                out.push_back({p.index, std::move(with_one)});
            }
            if (odd) std::cerr << "warning: " << odd << " puzzle(s) do not have 4 numbers\n";
            if (variants_out.empty()) {
                game24::write_puzzles(std::cout, out);
            } else {
                std::ofstream f(variants_out);
                game24::write_puzzles(f, out);
                if (!f) throw IoError("cannot write " + variants_out);
            }
            if (variants_check) {
                std::cerr << "solvable: " << solvable << ", still solvable with the extra 1: " << kept << '\n';
                if (kept != solvable) return kExitUnsolved;
            }
            return 0;
        }

        if (*gen) {
            if (gen_count < 0) throw ConfigError("--count must be >= 0");
            if (gen_min < 1 || gen_max < gen_min) throw ConfigError("need 1 <= --min-depth <= --max-depth");
            std::vector<mathdag::DagProblem> problems;
            const int span = gen_max - gen_min + 1;
            for (int k = 0; k < gen_count; ++k) {
                int depth = gen_min + k % span;
                problems.push_back(mathdag::generate_problem(gen_base_seed + static_cast<std::uint64_t>(k), depth, gen_w));
            }
            if (gen_out.empty()) {
                mathdag::write_problems(std::cout, problems);
            } else {
                std::ofstream f(gen_out);
                mathdag::write_problems(f, problems);
                if (!f) throw IoError("cannot write " + gen_out);
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const llm::TemplateError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const llm::AuthError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAuth;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}

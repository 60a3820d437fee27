#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rff/baselines/game24.hpp"
#include "rff/baselines/mathdag.hpp"
#include "rff/bench/results.hpp"
#include "rff/bench/run_spec.hpp"
#include "rff/game24/oracle_adapter.hpp"
#include "rff/game24/puzzles.hpp"
#include "rff/llm/baselines.hpp"
#include "rff/llm/game24_adapter.hpp"
#include "rff/llm/math_adapter.hpp"
#include "rff/mathdag/io.hpp"
#include "rff/mathdag/oracle_adapter.hpp"

namespace rff::bench {

/// One puzzle or word problem.
struct Instance {
    std::string id;
    std::optional<game24::NumberSet> numbers;
    std::optional<mathdag::DagProblem> problem;
};

/// Reads spec.dataset for spec.domain and keeps the items in spec.range
/// (1-based line positions in both formats).
inline std::vector<Instance> load_instances(const RunSpec& spec) {
    if (spec.dataset.empty()) throw ConfigError("no dataset given");
    std::vector<Instance> out;
    if (spec.domain == llm::Domain::Game24) {
        for (auto& p : game24::load_puzzles(spec.dataset, spec.range)) {
            out.push_back({std::to_string(p.index), std::move(p.numbers), std::nullopt});
        }
        return out;
    }
    auto problems = mathdag::load_problems(spec.dataset);
    for (std::size_t k = 0; k < problems.size(); ++k) {
        int position = static_cast<int>(k) + 1;
        if (!spec.range.contains(position)) continue;
        std::string id = problems[k].id.empty() ? std::to_string(position) : problems[k].id;
        out.push_back({std::move(id), std::nullopt, std::move(problems[k])});
    }
    return out;
}

/// Model access shared by every run of a batch.
struct LlmBackend {
    std::shared_ptr<llm::ChatClient> client;
    std::shared_ptr<const llm::TemplateSet> templates;
    std::shared_ptr<llm::Cassette> recording;
    std::string record_path;

    static LlmBackend open(const RunSpec& spec) {
        if (!spec.llm) throw ConfigError("the llm adapter needs an LLM configuration");
        LlmBackend b;
        const auto& cfg = *spec.llm;
        b.templates = spec.templates_dir.empty()
                          ? std::make_shared<const llm::TemplateSet>()
                          : std::make_shared<const llm::TemplateSet>(llm::TemplateSet::load(spec.templates_dir));
        std::shared_ptr<llm::Transport> transport;
        if (!spec.replay_cassette.empty()) {
            transport = std::make_shared<llm::ReplayTransport>(
                std::make_shared<llm::Cassette>(llm::Cassette::load(spec.replay_cassette)));
        } else {
            transport = std::make_shared<llm::HttpTransport>(cfg.base_url, cfg.resolved_key(), cfg.timeout);
            if (!spec.record_cassette.empty()) {
                b.recording = std::make_shared<llm::Cassette>();
                b.record_path = spec.record_cassette;
                transport = std::make_shared<llm::RecordingTransport>(transport, b.recording);
            }
        }
        b.client = std::make_shared<llm::ChatClient>(cfg, std::move(transport));
        return b;
    }

    void finish() const {
        if (recording) recording->save(record_path);
    }
};

inline bool answer_correct(const Instance& item, const Outcome& outcome) {
    if (!outcome.is_solved()) return false;
    if (item.numbers) {
        try {
            return game24::verify_expression(outcome.text, *item.numbers);
        } catch (const std::exception&) {
            return false;
        }
    }
    if (!item.problem || !item.problem->answer) return false;
    auto value = parse_rational(outcome.text);
    return value && *value == *item.problem->answer;
}

namespace detail {

inline SearchTrace failed(std::string reason) {
    SearchTrace t;
    t.set_outcome(Outcome::unsolved(std::move(reason)));
    return t;
}

inline SearchTrace search(const RunSpec& spec, Method method, const Instance& item, const EngineConfig& cfg,
                          const LlmBackend* backend) {
    const bool oracle = spec.adapter == AdapterKind::Oracle;
    if (!oracle && !backend) throw ConfigError("the llm adapter needs an LLM backend");
    if (item.numbers) {
        const auto& numbers = *item.numbers;
        switch (method) {
            case Method::RffT: {
                if (oracle) {
                    game24::OracleAdapter a(spec.ranking);
                    return game24::solve_rff_t(a, numbers, cfg);
                }
                llm::LlmGame24Adapter a(backend->client, backend->templates);
                return llm::solve_rff_t(a, numbers, cfg);
            }
            case Method::CoT: {
                if (oracle) {
                    game24::OracleBaselineAdapter a;
                    return run_cot(a, numbers);
                }
                llm::LlmGame24Baseline a(backend->client, backend->templates);
                return run_cot(a, numbers);
            }
            case Method::ForwardTree: {
                if (oracle) {
                    game24::OracleBaselineAdapter a;
                    return game24::run_forward_tree(a, numbers, cfg, spec.tree_width);
                }
                llm::LlmGame24Baseline a(backend->client, backend->templates);
                return game24::run_forward_tree(a, numbers, cfg, spec.tree_width);
            }
            case Method::RffG: break;
        }
        throw ConfigError(std::string(to_string(method)) + " does not run on game24 puzzles");
    }
    const auto& p = *item.problem;
    switch (method) {
        case Method::RffG: {
            if (oracle) {
                if (p.text_only()) return failed("AdapterFailure: text-only problem needs the llm adapter");
                return mathdag::solve_rff_g(p, cfg);
            }
            llm::LlmMathAdapter a(backend->client, llm::problem_text(p), backend->templates);
            return llm::solve_rff_g(a, cfg);
        }
        case Method::CoT: {
            if (oracle) {
                mathdag::OracleCotAdapter a;
                return run_cot(a, p);
            }
            llm::LlmMathCot a(backend->client, backend->templates);
            return run_cot(a, p);
        }
        default: break;
    }
    throw ConfigError(std::string(to_string(method)) + " does not run on math problems");
}

inline std::string file_safe(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
    return out;
}

}  // namespace detail

/// A finished run and its trace.
struct RunRecord {
    RunResult result;
    SearchTrace trace;
};

/// Runs one item once. Adapter failures end up in the outcome; only
/// configuration problems and authentication failures throw.
inline RunRecord run_one(const RunSpec& spec, Method method, const Instance& item, std::uint64_t seed,
                         const LlmBackend* backend = nullptr) {
    EngineConfig cfg = spec.engine;
    cfg.seed = seed;
    auto start = std::chrono::steady_clock::now();
    SearchTrace trace;
    try {
        trace = detail::search(spec, method, item, cfg, backend);
    } catch (const AdapterError& e) {
        trace = detail::failed(std::string("AdapterFailure: ") + e.what());
    }
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    RunResult r;
    r.puzzle_id = item.id;
    r.method = std::string(to_string(method));
    r.seed = seed;
    r.outcome = trace.outcome().kind;
    r.visited_states = trace.visited_states();
    r.duration_ms = elapsed.count();
    r.correct = answer_correct(item, trace.outcome());
    r.answer = trace.outcome().text;
    return {std::move(r), std::move(trace)};
}

inline std::filesystem::path trace_path(const std::filesystem::path& out_dir, const RunResult& r) {
    return out_dir / "traces" / (detail::file_safe(r.puzzle_id) + "_" + r.method + "_" + std::to_string(r.seed) + ".trace");
}

/// Every (item, method, repeat) combination, spread over spec.jobs worker
/// threads. Results come back in item, method, repeat order whatever the
/// thread count. Traces go to <out_dir>/traces when out_dir is set.
inline std::vector<RunResult> run_batch(const RunSpec& spec, const std::vector<Instance>& items,
                                        const LlmBackend* backend = nullptr) {
    validate(spec);
    struct Task {
        const Instance* item;
        Method method;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& item : items) {
        for (auto m : spec.methods) {
            for (int r = 0; r < spec.repeat; ++r) tasks.push_back({&item, m, spec.engine.seed + static_cast<std::uint64_t>(r)});
        }
    }
    if (!spec.out_dir.empty()) std::filesystem::create_directories(std::filesystem::path(spec.out_dir) / "traces");

    std::vector<RunResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            try {
                auto rec = run_one(spec, tasks[k].method, *tasks[k].item, tasks[k].seed, backend);
                if (!spec.out_dir.empty()) {
                    std::ofstream out(trace_path(spec.out_dir, rec.result), std::ios::binary);
                    out << serialize(rec.trace);
                    if (!out) throw std::runtime_error("cannot write trace for " + rec.result.puzzle_id);
                }
                results[k] = std::move(rec.result);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), std::max<std::size_t>(tasks.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

inline std::string describe(const RunSpec& spec) {
    std::ostringstream out;
    out << "adapter=" << to_string(spec.adapter) << " domain=" << llm::to_string(spec.domain)
        << " dataset=" << spec.dataset << " range=" << spec.range.first << "-"
        << (spec.range.last < 0 ? std::string("end") : std::to_string(spec.range.last)) << " L=" << spec.engine.max_steps
        << " n=" << spec.engine.width << " seed=" << spec.engine.seed << " repeat=" << spec.repeat
        << " jobs=" << spec.jobs;
    for (auto m : spec.methods) {
        if (m == Method::ForwardTree) out << " b=" << spec.tree_width;
    }
    if (spec.llm) out << " model=" << spec.llm->model << " temperature=" << spec.llm->temperature;
    return out.str();
}

struct BenchReport {
    std::vector<RunResult> results;
    ResultTable table;
};

/// Loads the dataset, runs the batch and, with out_dir set, writes
/// results.csv and summary.txt next to the traces.
inline BenchReport run_bench(const RunSpec& spec) {
    validate(spec);
    auto items = load_instances(spec);
    std::optional<LlmBackend> backend;
    if (spec.adapter == AdapterKind::Llm) backend = LlmBackend::open(spec);
    BenchReport report;
    report.results = run_batch(spec, items, backend ? &*backend : nullptr);
    if (backend) backend->finish();
    report.table = summarize(report.results, describe(spec));
    if (!spec.out_dir.empty()) {
        std::filesystem::path dir(spec.out_dir);
        std::ofstream csv(dir / "results.csv");
        write_csv(csv, report.results);
        std::ofstream summary(dir / "summary.txt");
        print_table(summary, report.table);
        if (!csv || !summary) throw std::runtime_error("cannot write results under " + spec.out_dir);
    }
    return report;
}

}  // namespace rff::bench

#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rff {

/// How backward decomposition is scheduled relative to forward steps.
///
/// `Pair` interleaves one backward call per forward step. `Single` derives
/// the whole target chain up front and then reasons forward against it.
enum class BackwardMode { Pair, Single };

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EngineConfig {
    int max_steps = 20;  ///< L: deepest step index the search may reach.
    int width = 5;       ///< n: attempts allowed per depth before it counts as exhausted.
    BackwardMode backward_mode = BackwardMode::Pair;
    std::uint64_t seed = 0;
    std::chrono::milliseconds per_call_timeout{60'000};
};

inline void validate(const EngineConfig& cfg) {
    if (cfg.max_steps < 1) {
        throw ConfigError("max_steps must be >= 1, got " + std::to_string(cfg.max_steps));
    }
    if (cfg.width < 1) {
        throw ConfigError("width must be >= 1, got " + std::to_string(cfg.width));
    }
    if (cfg.per_call_timeout.count() <= 0) {
        throw ConfigError("per_call_timeout must be positive");
    }
}

inline EngineConfig set_backward_mode(EngineConfig cfg, BackwardMode mode) {
    cfg.backward_mode = mode;
    return cfg;
}

constexpr std::string_view to_string(BackwardMode mode) {
    return mode == BackwardMode::Pair ? "pair" : "single";
}

inline BackwardMode parse_backward_mode(std::string_view text) {
    if (text == "pair") return BackwardMode::Pair;
    if (text == "single") return BackwardMode::Single;
    throw ConfigError("unknown backward mode '" + std::string(text) + "' (expected pair|single)");
}

}  // namespace rff

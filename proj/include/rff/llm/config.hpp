#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include "rff/core/config.hpp"
#include "rff/core/rational.hpp"

namespace rff::llm {

using rff::to_string;

enum class Domain { Game24, Math };

inline std::string_view to_string(Domain d) { return d == Domain::Game24 ? "game24" : "math"; }

inline Domain parse_domain(std::string_view text) {
    if (text == "game24") return Domain::Game24;
    if (text == "math") return Domain::Math;
    throw ConfigError("unknown domain '" + std::string(text) + "' (expected game24|math)");
}

struct LlmConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string api_key;  ///< Filled from api_key_env when empty.
    double temperature = 0.7;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60'000};
    std::chrono::milliseconds backoff{500};  ///< First retry delay; doubles each retry.
    int shots = 1;
    int max_concurrency = 4;  ///< Requests in flight across all runs sharing a client.

    /// Sampling defaults: 0.7 for the Game of 24, greedy for math.
    static LlmConfig for_domain(Domain d) {
        LlmConfig c;
        c.temperature = d == Domain::Game24 ? 0.7 : 0.0;
        return c;
    }

    [[nodiscard]] std::string resolved_key() const {
        if (!api_key.empty()) return api_key;
        const char* v = api_key_env.empty() ? nullptr : std::getenv(api_key_env.c_str());
        return v ? v : "";
    }
};

inline void validate(const LlmConfig& c) {
    if (c.base_url.rfind("http://", 0) != 0 && c.base_url.rfind("https://", 0) != 0) {
        throw ConfigError("base_url must start with http:// or https://");
    }
    if (c.model.empty()) throw ConfigError("model must be set");
    if (c.temperature < 0) throw ConfigError("temperature must be >= 0");
    if (c.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (c.timeout.count() <= 0) throw ConfigError("timeout must be positive");
    if (c.shots < 0) throw ConfigError("shots must be >= 0");
    if (c.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
}

}  // namespace rff::llm

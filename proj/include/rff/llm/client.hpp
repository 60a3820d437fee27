#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rff/llm/config.hpp"
#include "rff/llm/transport.hpp"

namespace rff::llm {

struct Message {
    std::string role;  ///< "system", "user" or "assistant".
    std::string content;
};

struct ChatResult {
    std::string text;
    int retries = 0;
};

/// Request body in the chat completions wire format. Key order is fixed by
/// nlohmann::json (sorted), so equal requests hash equally.
inline std::string chat_request_body(const LlmConfig& cfg, const std::vector<Message>& messages) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return nlohmann::json{{"model", cfg.model}, {"messages", msgs}, {"temperature", cfg.temperature}}.dump();
}

inline std::string excerpt(const std::string& body, std::size_t limit = 200) {
    return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

/// Pulls choices[0].message.content out of a completion reply.
inline std::string completion_text(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw TransportError("malformed reply body: " + excerpt(body));
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw TransportError("reply has no choices[0].message.content: " + excerpt(body));
    }
}

/// Shareable chat client. Concurrent callers are throttled to
/// `max_concurrency` requests in flight; each caller keeps its own history.
class ChatClient {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    ChatClient(LlmConfig cfg, std::shared_ptr<Transport> transport)
        : cfg_(std::move(cfg)),
          transport_(std::move(transport)),
          slots_(std::min<std::ptrdiff_t>(cfg_.max_concurrency, kMaxConcurrency)) {
        validate(cfg_);
    }

    /// Live client over HTTP for `cfg`.
    static std::shared_ptr<ChatClient> connect(const LlmConfig& cfg) {
        return std::make_shared<ChatClient>(cfg,
                                            std::make_shared<HttpTransport>(cfg.base_url, cfg.resolved_key(), cfg.timeout));
    }

    void set_sleeper(Sleeper s) { sleep_ = std::move(s); }

    [[nodiscard]] const LlmConfig& config() const { return cfg_; }
    [[nodiscard]] long total_retries() const { return total_retries_.load(); }
    [[nodiscard]] long total_requests() const { return total_requests_.load(); }

    /// One completion. Transport errors, timeouts, 429 and 5xx are retried
    /// with doubling delays up to max_retries; 401/403 throw AuthError at once.
    ChatResult chat(const std::vector<Message>& messages) {
        const std::string body = chat_request_body(cfg_, messages);
        auto delay = cfg_.backoff;
        for (int attempt = 0;; ++attempt) {
            const bool last = attempt >= cfg_.max_retries;
            std::string failure;
            bool timed_out = false;
            try {
                HttpReply reply = send(body);
                if (reply.status == 401 || reply.status == 403) {
                    throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(reply.status) + ")");
                }
                if (reply.status == 429 || reply.status >= 500) {
                    failure = "HTTP " + std::to_string(reply.status) + ": " + excerpt(reply.body);
                } else if (reply.status < 200 || reply.status >= 300) {
                    throw TransportError("HTTP " + std::to_string(reply.status) + ": " + excerpt(reply.body));
                } else {
                    return {completion_text(reply.body), attempt};
                }
            } catch (const TimeoutError& e) {
                failure = e.what();
                timed_out = true;
            } catch (const ConnectionError& e) {
                failure = e.what();
            }
            if (last) {
                if (timed_out) throw TimeoutError(failure);
                throw TransportError("giving up after " + std::to_string(attempt) + " retries: " + failure);
            }
            ++total_retries_;
            sleep_(delay);
            delay *= 2;
        }
    }

private:
    static constexpr std::ptrdiff_t kMaxConcurrency = 256;

    HttpReply send(const std::string& body) {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<kMaxConcurrency>& s;
            ~Release() { s.release(); }
        } release{slots_};
        ++total_requests_;
        return transport_->post(body);
    }

    LlmConfig cfg_;
    std::shared_ptr<Transport> transport_;
    std::counting_semaphore<kMaxConcurrency> slots_;
    Sleeper sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    std::atomic<long> total_retries_{0};
    std::atomic<long> total_requests_{0};
};

}  // namespace rff::llm

#pragma once

// A local chat-completions endpoint driven by a callback, for tests.

#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rff/llm/client.hpp"

namespace rff::testing {

inline std::string completion_body(const std::string& text) {
    return nlohmann::json{{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", text}}}}}}}.dump();
}

class StubServer {
public:
    /// Returns the HTTP status and body for a parsed request.
    using Handler = std::function<llm::HttpReply(const std::vector<llm::Message>&)>;

    explicit StubServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post(R"(.*/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
            std::vector<llm::Message> messages;
            auto j = nlohmann::json::parse(req.body);
            for (const auto& m : j.at("messages")) {
                messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
            }
            llm::HttpReply reply;
            {
                std::lock_guard lock(mutex_);
                ++requests_;
                bodies_.push_back(req.body);
                reply = handler_(messages);
            }
            res.status = reply.status;
            res.set_content(reply.body, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("stub server could not bind");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    [[nodiscard]] std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    [[nodiscard]] int requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    Handler handler_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    int requests_ = 0;
    std::vector<std::string> bodies_;
};

/// Endpoint that always answers `text` with HTTP 200.
inline llm::HttpReply ok(const std::string& text) { return {200, completion_body(text)}; }

}  // namespace rff::testing

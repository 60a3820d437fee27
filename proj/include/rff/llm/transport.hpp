#pragma once

// Transports move one serialized chat request to an endpoint and bring back
// the raw HTTP reply. HttpTransport talks to a live server; RecordingTransport
// wraps another transport and stores every reply in a cassette;
// ReplayTransport answers from a cassette alone and never opens a socket.
//
// Cassette file (JSON):
//
//   {"version":1,"entries":{"<sha256 of request body>":[{"status":200,"body":"..."}, ...]}}
//
// Replies for one hash are served in recording order, so a session that sends
// the same request twice replays both answers.

#include <chrono>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace rff::llm {

/// Network-level failure, or a reply the client cannot use.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No reply at all (connection refused, reset, ...). Worth retrying.
class ConnectionError : public TransportError {
public:
    using TransportError::TransportError;
};

class TimeoutError : public ConnectionError {
public:
    using ConnectionError::ConnectionError;
};

/// 401/403 from the endpoint. Never retried.
class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HttpReply {
    int status = 0;
    std::string body;
};

class Transport {
public:
    virtual ~Transport() = default;
    /// POSTs `body` (JSON) to the chat completions endpoint.
    virtual HttpReply post(const std::string& body) = 0;
};

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

class HttpTransport : public Transport {
public:
    /// `base_url` like "https://api.openai.com/v1"; requests go to
    /// <base_url>/chat/completions.
    HttpTransport(const std::string& base_url, std::string api_key, std::chrono::milliseconds timeout)
        : api_key_(std::move(api_key)), timeout_(timeout) {
        auto scheme_end = base_url.find("://");
        if (scheme_end == std::string::npos) throw TransportError("bad base_url '" + base_url + "'");
        auto path_start = base_url.find('/', scheme_end + 3);
        origin_ = base_url.substr(0, path_start);
        prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }

    HttpReply post(const std::string& body) override {
        // httplib::Client is not safe to share between threads, so each call opens its own.
        httplib::Client client(origin_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(prefix_ + "/chat/completions", headers, body, "application/json");
        if (!res) {
            if (res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout) {
                throw TimeoutError("request timed out: " + httplib::to_string(res.error()));
            }
            throw ConnectionError("request failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    std::string origin_;
    std::string prefix_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

class Cassette {
public:
    void add(const std::string& request, HttpReply reply) {
        std::lock_guard lock(mutex_);
        entries_[sha256_hex(request)].push_back(std::move(reply));
    }

    /// Next unplayed reply for this request.
    std::optional<HttpReply> take(const std::string& request) {
        std::lock_guard lock(mutex_);
        const auto hash = sha256_hex(request);
        auto& played = cursor_[hash];
        auto it = entries_.find(hash);
        if (it == entries_.end() || played >= it->second.size()) return std::nullopt;
        return it->second[played++];
    }

    [[nodiscard]] std::size_t size() const {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (const auto& [hash, replies] : entries_) n += replies.size();
        return n;
    }

    [[nodiscard]] nlohmann::json to_json() const {
        std::lock_guard lock(mutex_);
        nlohmann::json entries = nlohmann::json::object();
        for (const auto& [hash, replies] : entries_) {
            auto& list = entries[hash] = nlohmann::json::array();
            for (const auto& r : replies) list.push_back({{"status", r.status}, {"body", r.body}});
        }
        return {{"version", 1}, {"entries", entries}};
    }

    static Cassette from_json(const nlohmann::json& j) {
        if (j.value("version", 0) != 1) throw std::runtime_error("unsupported cassette version");
        Cassette c;
        for (const auto& [hash, replies] : j.at("entries").items()) {
            for (const auto& r : replies) {
                c.entries_[hash].push_back({r.at("status").get<int>(), r.at("body").get<std::string>()});
            }
        }
        return c;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write cassette '" + path + "'");
        out << to_json().dump(1) << '\n';
    }

    static Cassette load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open cassette '" + path + "'");
        return from_json(nlohmann::json::parse(in));
    }

    Cassette() = default;
    Cassette(Cassette&& other) noexcept : entries_(std::move(other.entries_)), cursor_(std::move(other.cursor_)) {}
    Cassette& operator=(Cassette&& other) noexcept {
        entries_ = std::move(other.entries_);
        cursor_ = std::move(other.cursor_);
        return *this;
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::deque<HttpReply>> entries_;
    std::map<std::string, std::size_t> cursor_;
};

class RecordingTransport : public Transport {
public:
    RecordingTransport(std::shared_ptr<Transport> inner, std::shared_ptr<Cassette> cassette)
        : inner_(std::move(inner)), cassette_(std::move(cassette)) {}

    HttpReply post(const std::string& body) override {
        auto reply = inner_->post(body);
        cassette_->add(body, reply);
        return reply;
    }

private:
    std::shared_ptr<Transport> inner_;
    std::shared_ptr<Cassette> cassette_;
};

class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(std::shared_ptr<Cassette> cassette) : cassette_(std::move(cassette)) {}

    HttpReply post(const std::string& body) override {
        auto reply = cassette_->take(body);
        if (!reply) throw TransportError("cassette has no reply for request " + sha256_hex(body).substr(0, 12));
        return *reply;
    }

private:
    std::shared_ptr<Cassette> cassette_;
};

}  // namespace rff::llm

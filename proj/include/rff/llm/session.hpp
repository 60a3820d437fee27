#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rff/llm/client.hpp"
#include "rff/llm/parse.hpp"
#include "rff/llm/templates.hpp"

namespace rff::llm {

/// One prompt/reply round, with a printable log for trace details.
struct Exchange {
    std::string reply;
    std::string log;
};

/// Prompting plumbing shared by the LLM adapters: fills a template, sends
/// it, and optionally gives the model one chance to correct a bad reply.
class Session {
public:
    Session(std::shared_ptr<ChatClient> client, std::shared_ptr<const TemplateSet> templates, Domain domain)
        : client_(std::move(client)), templates_(std::move(templates)), domain_(domain) {
        if (!client_) throw ConfigError("LLM adapter needs a chat client");
        if (!templates_) templates_ = std::make_shared<const TemplateSet>();
    }

    Exchange ask(Role role, const Slots& slots) {
        auto messages = templates_->conversation(domain_, role, slots, client_->config().shots);
        auto result = send(messages);
        return {result.text, log_entry(messages.back().content, result.text)};
    }

    /// Asks, then runs `accept` on the reply. `accept` returns an error
    /// message for replies it rejects; the model is told why and asked once
    /// more. A second rejection throws AdapterError("LocalValidationError: ...").
    /// Parse errors count as rejections.
    template <class T>
    std::pair<T, std::string> ask_checked(Role role, const Slots& slots,
                                          const std::function<std::optional<T>(const std::string&, std::string&)>& accept) {
        auto messages = templates_->conversation(domain_, role, slots, client_->config().shots);
        std::string log;
        std::string why;
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto result = send(messages);
            log += log_entry(messages.back().content, result.text);
            why.clear();
            try {
                if (auto value = accept(result.text, why)) return {std::move(*value), log};
            } catch (const ParseError& e) {
                why = e.what();
            }
            messages.push_back({"assistant", result.text});
            messages.push_back({"user", "That reply was rejected: " + why +
                                            ". Answer again, following the requested line format exactly."});
        }
        throw AdapterError("LocalValidationError: " + why);
    }

    [[nodiscard]] Domain domain() const { return domain_; }

private:
    // Transport failures become adapter failures so the engine records them
    // as the run's outcome. AuthError passes through: no run can succeed.
    ChatResult send(const std::vector<Message>& messages) {
        try {
            return client_->chat(messages);
        } catch (const TimeoutError& e) {
            throw AdapterError(std::string("TimeoutError: ") + e.what());
        } catch (const TransportError& e) {
            throw AdapterError(std::string("TransportError: ") + e.what());
        }
    }

    static std::string log_entry(const std::string& prompt, const std::string& reply) {
        return ">>> " + prompt + "\n<<< " + reply + "\n";
    }

    std::shared_ptr<ChatClient> client_;
    std::shared_ptr<const TemplateSet> templates_;
    Domain domain_;
};

}  // namespace rff::llm

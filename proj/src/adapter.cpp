#include "mcqr/adapter.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <httplib.h>

#include "mcqr/json_io.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

struct ParsedEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/chat/completions
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    const std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw Error("endpoint must start with http:// or https://, got " + endpoint);
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw Error("unsupported endpoint scheme: " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https")
        throw Error("this build lacks TLS support; use an http:// endpoint or rebuild with OpenSSL");
#endif
    const std::size_t path_start = endpoint.find('/', scheme_end + 3);
    ParsedEndpoint parsed;
    if (path_start == std::string::npos) {
        parsed.base = endpoint;
        parsed.path = "/v1/chat/completions";
    } else {
        parsed.base = endpoint.substr(0, path_start);
        parsed.path = endpoint.substr(path_start);
    }
    if (parsed.base.size() == scheme_end + 3) throw Error("endpoint has no host: " + endpoint);
    return parsed;
}

class SyntheticAdapter final : public ModelAdapter {
  public:
    explicit SyntheticAdapter(SyntheticResponder responder) : responder_(std::move(responder)) {}

    ModelResponse infer(const InferenceRequest& request) override {
        return synthetic_respond(responder_, request.view, request.prompt);
    }

    std::string tag() const override { return responder_.tag; }
    bool deterministic() const override { return true; }

  private:
    SyntheticResponder responder_;
};

class HttpChatAdapter final : public ModelAdapter {
  public:
    explicit HttpChatAdapter(HttpModelConfig config)
        : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {
        if (config_.max_retries < 0) throw Error("max_retries must be non-negative");
        if (config_.timeout_s <= 0) throw Error("timeout_s must be positive");
        if (!config_.api_key_env.empty()) {
            const char* value = std::getenv(config_.api_key_env.c_str());
            if (value == nullptr || *value == '\0')
                throw Error("environment variable " + config_.api_key_env +
                            " named in the model config is not set");
            api_key_ = value;
        }
    }

    ModelResponse infer(const InferenceRequest& request) override {
        nlohmann::json body;
        body["model"] = config_.model_tag;
        body["messages"] = nlohmann::json::array(
            {nlohmann::json{{"role", "user"}, {"content", request.prompt}}});
        body["temperature"] = 0.0;  // greedy decoding, always explicit
        body["logprobs"] = true;
        body["top_logprobs"] = config_.top_logprobs;
        body["max_tokens"] = config_.max_tokens;
        const std::string payload = body.dump();

        std::string failure;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                const double delay_s = 0.5 * static_cast<double>(1u << (attempt - 1));
                std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
            }
            // one client per call: httplib clients are not safe to share
            // across threads, and campaigns call infer() concurrently
            httplib::Client client(endpoint_.base);
            client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
            client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
            const httplib::Result res =
                client.Post(endpoint_.path, headers, payload, "application/json");
            if (!res) {
                failure = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) return parse_reply(res->body);
            failure = "HTTP " + std::to_string(res->status) + ": " + snippet(res->body);
            const bool retryable = res->status == 429 || res->status >= 500;
            if (!retryable) break;
        }
        throw Error("model request failed after " + std::to_string(config_.max_retries + 1) +
                    " attempt(s): " + failure);
    }

    std::string tag() const override { return config_.model_tag; }
    bool deterministic() const override { return false; }

  private:
    static std::string snippet(const std::string& body) {
        std::string s = body.substr(0, 200);
        for (char& c : s)
            if (c == '\n' || c == '\r') c = ' ';
        return s;
    }

    ModelResponse parse_reply(const std::string& body) const {
        const nlohmann::json reply = parse_json(body, "model reply");
        if (!reply.contains("choices") || reply["choices"].empty())
            throw Error("model reply has no choices: " + snippet(body));
        const nlohmann::json& choice = reply["choices"][0];

        ModelResponse response;
        response.model_tag = config_.model_tag;
        if (choice.contains("message") && choice["message"].contains("content") &&
            choice["message"]["content"].is_string())
            response.text = choice["message"]["content"].get<std::string>();

        const bool has_logprobs = choice.contains("logprobs") &&
                                  choice["logprobs"].is_object() &&
                                  choice["logprobs"].contains("content") &&
                                  choice["logprobs"]["content"].is_array();
        if (!has_logprobs) {
            std::cerr << "warning: " << config_.model_tag
                      << " returned no token log-probabilities; first-token evaluation will "
                         "be unavailable for this run\n";
            return response;
        }
        int position = 0;
        for (const nlohmann::json& entry : choice["logprobs"]["content"]) {
            if (position >= config_.keep_positions) break;
            TokenLogprobRecord rec;
            rec.position = position;
            if (entry.contains("token") && entry.contains("logprob"))
                rec.candidates[entry["token"].get<std::string>()] =
                    std::min(entry["logprob"].get<double>(), 0.0);
            if (entry.contains("top_logprobs"))
                for (const nlohmann::json& cand : entry["top_logprobs"])
                    if (cand.contains("token") && cand.contains("logprob"))
                        rec.candidates[cand["token"].get<std::string>()] =
                            std::min(cand["logprob"].get<double>(), 0.0);
            if (rec.candidates.empty()) break;  // no gaps allowed
            response.token_logprobs.push_back(std::move(rec));
            ++position;
        }
        validate_response(response);
        return response;
    }

    HttpModelConfig config_;
    ParsedEndpoint endpoint_;
    std::string api_key_;
};

}  // namespace

std::unique_ptr<ModelAdapter> make_http_adapter(const HttpModelConfig& config) {
    return std::make_unique<HttpChatAdapter>(config);
}

std::unique_ptr<ModelAdapter> make_synthetic_adapter(const SyntheticResponder& responder) {
    responder.validate();
    return std::make_unique<SyntheticAdapter>(responder);
}

std::unique_ptr<ModelAdapter> make_adapter(const HttpModelConfig& config) {
    if (config.endpoint.rfind("synthetic:", 0) == 0) {
        SyntheticResponder responder = SyntheticResponder::parse(config.endpoint);
        if (!config.model_tag.empty()) responder.tag = config.model_tag;
        return make_synthetic_adapter(responder);
    }
    return make_http_adapter(config);
}

}  // namespace mcqr

#pragma once

#include <memory>
#include <string>

#include "mcqr/core.hpp"
#include "mcqr/simulation.hpp"

namespace mcqr {

struct InferenceRequest {
    std::string prompt;
    RunView view;  // structured option order, used by the synthetic responder
};

// A source of model responses. infer() must be safe to call from several
// threads at once; each call is independent.
class ModelAdapter {
  public:
    virtual ~ModelAdapter() = default;
    virtual ModelResponse infer(const InferenceRequest& request) = 0;
    virtual std::string tag() const = 0;
    // Deterministic adapters produce identical responses for identical
    // requests; their records are stamped with timestamp 0 so replay logs
    // are byte-reproducible.
    virtual bool deterministic() const = 0;
};

struct HttpModelConfig {
    std::string endpoint;     // http(s)://host[:port]/v1/chat/completions
    std::string model_tag;    // model name sent with each request
    std::string api_key_env;  // NAME of the environment variable holding the key; empty = no auth
    double timeout_s = 60.0;
    int max_retries = 3;       // additional attempts on 429/5xx/transport errors
    int top_logprobs = 20;     // candidates requested per position
    int max_tokens = 64;
    int keep_positions = 8;    // token positions retained in the record
};

// Chat-completions client: one user message carrying the whole prompt,
// temperature 0 (greedy) always sent, token log-probabilities requested.
// Retries 429/5xx/transport failures with exponential backoff. A reply
// without log-probabilities yields a response with empty token_logprobs and
// a warning on stderr; the campaign layer decides whether that is fatal.
std::unique_ptr<ModelAdapter> make_http_adapter(const HttpModelConfig& config);

// Wraps the deterministic synthetic responder as an adapter.
std::unique_ptr<ModelAdapter> make_synthetic_adapter(const SyntheticResponder& responder);

// Dispatch on the endpoint: "synthetic:..." builds a synthetic responder,
// anything starting with http:// or https:// builds the HTTP client.
std::unique_ptr<ModelAdapter> make_adapter(const HttpModelConfig& config);

}  // namespace mcqr

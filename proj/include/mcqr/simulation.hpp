#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

// Deterministic stand-in for a chat model, rich enough to reproduce the
// failure modes the harness measures: position-biased first-token
// probabilities, a text channel that can disagree with them, refusals, and
// the first-token shapes real models emit (bare letter, leading space,
// "Answer:" preamble).
struct SyntheticResponder {
    enum class Style : std::uint8_t {
        BareLetter,     // "B"            letter tokens at position 0
        LetterContent,  // "B. content"   letter tokens at position 0
        AnswerPrefix,   // "Answer: B"    letter tokens at position 2
        LeadingSpace,   // " B"           letter tokens at position 1
        Verbose,        // "The answer is (B) content."  letter tokens at position 2
    };

    std::vector<double> position_bias;      // log-weights per option position
    double last_position_weight = 0.0;      // extra log-weight on the final position
    double content_skill = 1.0;             // P(responder knows the gold content)
    double knowledge_weight = 2.0;          // log-weight the gold gets when known
    double content_noise_sigma = 0.25;      // spread of per-content preference noise
    double mismatch_prob = 0.0;             // P(text answer departs from the first token)
    double refusal_prob = 0.0;              // P(item is answered out-of-option)
    std::array<double, 3> special_pref{1.0, 1.0, 1.0};  // X/Y/Z phrasing weights
    Style style = Style::BareLetter;
    std::uint64_t seed = 0;
    std::string tag = "synthetic";

    void validate() const;

    // Endpoint scheme: "synthetic:key=value;key=value;..." with keys
    // position_bias, last_position_weight, content_skill, knowledge_weight,
    // sigma, mismatch_prob, refusal_prob, special_pref, style, seed, tag.
    static SyntheticResponder parse(std::string_view endpoint);
};

// Pure function of (responder, view, prompt): same inputs, same response.
ModelResponse synthetic_respond(const SyntheticResponder& responder, const RunView& view,
                                std::string_view prompt);

}  // namespace mcqr

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

enum class ExtractionMethod : std::uint8_t {
    LogprobRank,
    PatternId,
    PatternContent,
    SpecialPhrase,
    ExternalClassifier,
    Failed,
};

std::string extraction_method_name(ExtractionMethod method);

struct ExtractionResult {
    AnswerLabel label = AnswerLabel::NaN;
    ExtractionMethod method = ExtractionMethod::Failed;
    std::string evidence;
};

// Where in the response the option-letter token lives. Fixed offsets serve
// models with a known stable shape (e.g. a leading space token pushes the
// letter to position 1, an "Answer:" preamble to position 2); auto picks the
// earliest position whose option-letter probability mass is maximal.
struct TokenOffsetPolicy {
    enum class Mode : std::uint8_t { Fixed, Auto };
    Mode mode = Mode::Auto;
    int fixed_offset = 0;
    std::map<std::string, int> per_model;  // model tag -> offset, overrides mode

    int resolve(const ModelResponse& response, int option_count) const;
};

// Earliest position whose summed option-letter probability mass is maximal.
int resolve_offset_auto(const ModelResponse& response, int option_count);

// Probability of each option letter at the given position; the bare letter
// and its single-leading-space variant count as the same candidate (max of
// the two when both appear). Missing letters get 0.
std::vector<double> option_letter_probs(const ModelResponse& response, int offset,
                                        int option_count);

// Highest-probability option letter at the policy-resolved position; ties go
// to the earliest letter; NaN when no option letter is among the candidates.
ExtractionResult first_token_answer(const ModelResponse& response, int option_count,
                                    const TokenOffsetPolicy& policy);

// Editable phrase lists for rule (3) of the text cascade. Matching is
// case-insensitive substring with word boundaries.
struct SpecialPhraseLexicon {
    std::vector<std::string> refusal;     // -> Y
    std::vector<std::string> no_correct;  // -> X
    std::vector<std::string> dont_know;   // -> Z

    static const SpecialPhraseLexicon& defaults();
    static SpecialPhraseLexicon load(const std::string& refusal_path,
                                     const std::string& no_correct_path,
                                     const std::string& dont_know_path);
};

// Ordered cascade over the response text:
//  (1) explicit option-ID patterns ("answer is (X)", "answer is X",
//      "Answer: X", a lone leading "X." / "(X)" / "X)"), vetoed when the
//      immediately following text quotes a different option's content;
//  (2) longest verbatim case-insensitive option-content match, NaN when two
//      non-nested contents match;
//  (3) special phrases — refusal, no-correct-answer, dont-know — mapped to
//      the option carrying that meaning when one exists (extra-options mode),
//      else to Y / X / Z;
//  (4) NaN.
// Total and deterministic on any input.
ExtractionResult extract_text_answer(std::string_view text,
                                     const std::vector<OptionEntry>& options,
                                     const SpecialPhraseLexicon& lexicon =
                                         SpecialPhraseLexicon::defaults());

}  // namespace mcqr

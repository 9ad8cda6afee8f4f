#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcqr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Answer labels: option IDs A..G plus the out-of-option classes.
// X = claims no correct answer, Y = refuses, Z = says it does not know,
// NaN = nothing parseable.
enum class AnswerLabel : std::uint8_t { A, B, C, D, E, F, G, X, Y, Z, NaN };

bool is_option_label(AnswerLabel label);
int option_index(AnswerLabel label);        // A -> 0 .. G -> 6, throws otherwise
AnswerLabel option_label(int index);        // 0 -> A .. 6 -> G
AnswerLabel label_from_char(char id);       // 'A'..'G','X','Y','Z'
char label_char(AnswerLabel label);         // NaN -> '?'
std::string label_name(AnswerLabel label);  // "A".."G","X","Y","Z","NaN"
std::optional<AnswerLabel> label_from_name(std::string_view name);

enum class OptionKind : std::uint8_t { Regular, NoCorrectAnswer, Refuse, IDoNotKnow };

// X/Y/Z class carried by a non-regular option.
AnswerLabel special_class_of(OptionKind kind);

struct OptionEntry {
    char id = 'A';
    std::string content;
    OptionKind kind = OptionKind::Regular;
};

struct McqItem {
    std::string item_id;
    std::string question;
    std::vector<OptionEntry> options;  // canonical order
    int gold = 0;                      // canonical index of the correct option
    std::string task;                  // e.g. MMLU subject
    std::string subcategory;
};

// Throws Error on malformed items; returns the item untouched otherwise.
const McqItem& validate_item(const McqItem& item);

// Stable content-derived id for items that arrive without one.
std::string stable_item_id(std::string_view question, const std::vector<OptionEntry>& options);

// The identity of an answer once option IDs are stripped away: either a
// concrete option content or one of the out-of-option classes. Needed
// everywhere answers from differently-permuted runs are compared.
class ContentClass {
  public:
    ContentClass() = default;  // NaN
    static ContentClass option(std::string content);
    static ContentClass special(AnswerLabel cls);  // X, Y, Z or NaN

    bool is_option() const { return is_option_; }
    bool is_special() const { return !is_option_; }
    AnswerLabel special_class() const;
    const std::string& option_content() const;
    std::string display() const;  // option content, or "X"/"Y"/"Z"/"NaN"

    friend bool operator==(const ContentClass& a, const ContentClass& b);
    friend bool operator!=(const ContentClass& a, const ContentClass& b) { return !(a == b); }
    friend bool operator<(const ContentClass& a, const ContentClass& b);

  private:
    bool is_option_ = false;
    AnswerLabel special_ = AnswerLabel::NaN;
    std::string content_;
};

// Maps a label to its content class under the given (possibly permuted)
// option list. Option IDs resolve to their content; an injected non-regular
// option resolves to its X/Y/Z class; X/Y/Z/NaN pass through.
ContentClass content_of(AnswerLabel label, const std::vector<OptionEntry>& options);

enum class PerturbationType : std::uint8_t {
    None,
    LetterTypos,
    LetterSwap,
    WordSwap,
    OptionSwap,
    ExtraOptions,
};

std::string perturbation_name(PerturbationType type);
std::optional<PerturbationType> perturbation_from_name(std::string_view name);

// Uniquely identifies one model inference in a campaign.
struct RunKey {
    std::string item_id;
    PerturbationType type = PerturbationType::None;
    int perturbation_index = 0;
    int shuffle_index = 0;

    std::string str() const;  // "item/letter_typos/p0/s3"
    friend bool operator==(const RunKey& a, const RunKey& b);
    friend bool operator<(const RunKey& a, const RunKey& b);
};

// Top-k candidates at one response position. Keyed map so serialization and
// iteration order are stable.
struct TokenLogprobRecord {
    int position = 0;
    std::map<std::string, double> candidates;  // token -> log-probability (natural log, <= 0)
};

struct ModelResponse {
    std::string text;
    std::vector<TokenLogprobRecord> token_logprobs;  // positions 0..P-1, no gaps
    std::string model_tag;
};

// Throws Error when positions have gaps, a candidate map is empty, or a
// log-probability is positive.
const ModelResponse& validate_response(const ModelResponse& response);

// Structured view of one planned run, for adapters that need more than the
// prompt text (the synthetic responder does; HTTP adapters ignore it).
struct RunView {
    std::string item_id;
    std::vector<OptionEntry> options;  // current (permuted) order
    std::vector<int> permutation;      // canonical index -> current position
    int gold_canonical = 0;

    int gold_position() const { return permutation.at(static_cast<std::size_t>(gold_canonical)); }
};

// One fully processed run: prompt, response, and both extraction channels.
struct RunRecord {
    RunKey key;
    std::string prompt;
    std::vector<int> option_permutation;  // canonical index -> position in this run
    std::vector<OptionEntry> options;     // options as shown in this run
    ModelResponse response;
    AnswerLabel first_token_label = AnswerLabel::NaN;
    AnswerLabel text_label = AnswerLabel::NaN;
    ContentClass first_token_content;
    ContentClass text_content;
};

}  // namespace mcqr

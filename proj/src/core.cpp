#include "mcqr/core.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "mcqr/util.hpp"

namespace mcqr {

bool is_option_label(AnswerLabel label) {
    return static_cast<int>(label) <= static_cast<int>(AnswerLabel::G);
}

int option_index(AnswerLabel label) {
    if (!is_option_label(label)) throw Error("label " + label_name(label) + " is not an option id");
    return static_cast<int>(label);
}

AnswerLabel option_label(int index) {
    if (index < 0 || index > 6) throw Error("option index out of range: " + std::to_string(index));
    return static_cast<AnswerLabel>(index);
}

AnswerLabel label_from_char(char id) {
    if (id >= 'A' && id <= 'G') return static_cast<AnswerLabel>(id - 'A');
    if (id == 'X') return AnswerLabel::X;
    if (id == 'Y') return AnswerLabel::Y;
    if (id == 'Z') return AnswerLabel::Z;
    throw Error(std::string("unknown answer label character: ") + id);
}

char label_char(AnswerLabel label) {
    if (is_option_label(label)) return static_cast<char>('A' + static_cast<int>(label));
    switch (label) {
        case AnswerLabel::X: return 'X';
        case AnswerLabel::Y: return 'Y';
        case AnswerLabel::Z: return 'Z';
        default: return '?';
    }
}

std::string label_name(AnswerLabel label) {
    if (label == AnswerLabel::NaN) return "NaN";
    return std::string(1, label_char(label));
}

std::optional<AnswerLabel> label_from_name(std::string_view name) {
    if (name == "NaN") return AnswerLabel::NaN;
    if (name.size() != 1) return std::nullopt;
    char c = name[0];
    if ((c >= 'A' && c <= 'G') || c == 'X' || c == 'Y' || c == 'Z') return label_from_char(c);
    return std::nullopt;
}

AnswerLabel special_class_of(OptionKind kind) {
    switch (kind) {
        case OptionKind::NoCorrectAnswer: return AnswerLabel::X;
        case OptionKind::Refuse: return AnswerLabel::Y;
        case OptionKind::IDoNotKnow: return AnswerLabel::Z;
        default: throw Error("regular option has no special class");
    }
}

const McqItem& validate_item(const McqItem& item) {
    const std::size_t n = item.options.size();
    if (n != 4 && n != 7) throw Error("options length must be 4 or 7, got " + std::to_string(n));
    std::set<std::string> seen;
    int special_counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const OptionEntry& opt = item.options[i];
        if (opt.id != static_cast<char>('A' + i))
            throw Error("option ids must be consecutive letters from A");
        if (opt.content.empty()) throw Error("empty option content");
        if (!seen.insert(opt.content).second) throw Error("duplicate option content");
        if (opt.kind != OptionKind::Regular) {
            if (n == 4) throw Error("non-regular option kind outside extra-options mode");
            ++special_counts[static_cast<int>(opt.kind) - 1];
        }
    }
    if (n == 7) {
        if (special_counts[0] != 1 || special_counts[1] != 1 || special_counts[2] != 1)
            throw Error("extra-options item must carry exactly one option of each special kind");
    }
    if (item.gold < 0 || static_cast<std::size_t>(item.gold) >= n) throw Error("gold out of range");
    if (item.options[static_cast<std::size_t>(item.gold)].kind != OptionKind::Regular)
        throw Error("gold must point at a regular option");
    return item;
}

std::string stable_item_id(std::string_view question, const std::vector<OptionEntry>& options) {
    std::uint64_t h = fnv1a64(question);
    for (const OptionEntry& opt : options) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(opt.content, h);
    }
    return to_hex(h);
}

ContentClass ContentClass::option(std::string content) {
    ContentClass c;
    c.is_option_ = true;
    c.content_ = std::move(content);
    return c;
}

ContentClass ContentClass::special(AnswerLabel cls) {
    if (is_option_label(cls)) throw Error("content class requires X, Y, Z or NaN");
    ContentClass c;
    c.special_ = cls;
    return c;
}

AnswerLabel ContentClass::special_class() const {
    if (is_option_) throw Error("content class holds an option content, not a special class");
    return special_;
}

const std::string& ContentClass::option_content() const {
    if (!is_option_) throw Error("content class holds a special class, not an option content");
    return content_;
}

std::string ContentClass::display() const {
    return is_option_ ? content_ : label_name(special_);
}

bool operator==(const ContentClass& a, const ContentClass& b) {
    if (a.is_option_ != b.is_option_) return false;
    return a.is_option_ ? a.content_ == b.content_ : a.special_ == b.special_;
}

bool operator<(const ContentClass& a, const ContentClass& b) {
    // options sort before specials; specials by class order X < Y < Z < NaN
    if (a.is_option_ != b.is_option_) return a.is_option_;
    if (a.is_option_) return a.content_ < b.content_;
    return static_cast<int>(a.special_) < static_cast<int>(b.special_);
}

ContentClass content_of(AnswerLabel label, const std::vector<OptionEntry>& options) {
    if (!is_option_label(label)) return ContentClass::special(label);
    const int idx = option_index(label);
    if (static_cast<std::size_t>(idx) >= options.size())
        throw Error("label " + label_name(label) + " outside the option set");
    const OptionEntry& opt = options[static_cast<std::size_t>(idx)];
    if (opt.kind != OptionKind::Regular) return ContentClass::special(special_class_of(opt.kind));
    return ContentClass::option(opt.content);
}

std::string perturbation_name(PerturbationType type) {
    switch (type) {
        case PerturbationType::None: return "none";
        case PerturbationType::LetterTypos: return "letter_typos";
        case PerturbationType::LetterSwap: return "letter_swap";
        case PerturbationType::WordSwap: return "word_swap";
        case PerturbationType::OptionSwap: return "option_swap";
        case PerturbationType::ExtraOptions: return "extra_options";
    }
    throw Error("unknown perturbation type");
}

std::optional<PerturbationType> perturbation_from_name(std::string_view name) {
    for (int t = 0; t <= static_cast<int>(PerturbationType::ExtraOptions); ++t) {
        auto type = static_cast<PerturbationType>(t);
        if (perturbation_name(type) == name) return type;
    }
    return std::nullopt;
}

std::string RunKey::str() const {
    return item_id + "/" + perturbation_name(type) + "/p" + std::to_string(perturbation_index) +
           "/s" + std::to_string(shuffle_index);
}

bool operator==(const RunKey& a, const RunKey& b) {
    return a.item_id == b.item_id && a.type == b.type &&
           a.perturbation_index == b.perturbation_index && a.shuffle_index == b.shuffle_index;
}

bool operator<(const RunKey& a, const RunKey& b) {
    return std::tie(a.item_id, a.type, a.perturbation_index, a.shuffle_index) <
           std::tie(b.item_id, b.type, b.perturbation_index, b.shuffle_index);
}

const ModelResponse& validate_response(const ModelResponse& response) {
    for (std::size_t i = 0; i < response.token_logprobs.size(); ++i) {
        const TokenLogprobRecord& rec = response.token_logprobs[i];
        if (rec.position != static_cast<int>(i))
            throw Error("token logprob positions must be 0..P-1 without gaps");
        if (rec.candidates.empty())
            throw Error("empty candidate map at position " + std::to_string(rec.position));
        for (const auto& [token, lp] : rec.candidates) {
            if (lp > 0.0)
                throw Error("positive log-probability for token '" + token + "' at position " +
                            std::to_string(rec.position));
        }
    }
    return response;
}

}  // namespace mcqr

#include "mcqr/extract.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>

#include "mcqr/util.hpp"

namespace mcqr {

namespace {

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// substring match with non-alphanumeric (or edge) boundaries on both sides
std::size_t find_bounded(std::string_view haystack, std::string_view needle, std::size_t from = 0) {
    if (needle.empty()) return std::string_view::npos;
    while (from + needle.size() <= haystack.size()) {
        const std::size_t pos = haystack.find(needle, from);
        if (pos == std::string_view::npos) return std::string_view::npos;
        const bool left_ok = pos == 0 || !is_alnum(haystack[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !is_alnum(haystack[end]);
        if (left_ok && right_ok) return pos;
        from = pos + 1;
    }
    return std::string_view::npos;
}

struct ContentMatch {
    std::size_t option_index;
    std::size_t begin;
    std::size_t end;
};

std::vector<ContentMatch> match_contents(std::string_view lowered_text,
                                         const std::vector<OptionEntry>& options,
                                         const std::vector<std::string>& lowered_contents) {
    std::vector<ContentMatch> matches;
    for (std::size_t i = 0; i < options.size(); ++i) {
        const std::size_t pos = find_bounded(lowered_text, lowered_contents[i]);
        if (pos != std::string_view::npos)
            matches.push_back({i, pos, pos + lowered_contents[i].size()});
    }
    return matches;
}

// Which option's content the text quotes immediately after an ID assertion;
// npos-equivalent (options.size()) when none does.
std::size_t adjacent_content(std::string_view lowered_tail, const std::vector<OptionEntry>& options,
                             const std::vector<std::string>& lowered_contents) {
    std::size_t skip = 0;
    while (skip < lowered_tail.size()) {
        const char c = lowered_tail[skip];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ')' || c == '.' || c == ':' ||
            c == ',' || c == '-' || c == '"' || c == '\'' || c == '*' || c == '(')
            ++skip;
        else
            break;
    }
    const std::string_view at = lowered_tail.substr(skip);
    std::size_t best = options.size();
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        const std::string& content = lowered_contents[i];
        if (content.empty() || content.size() < best_len) continue;
        if (at.size() < content.size()) continue;
        if (at.compare(0, content.size(), content) != 0) continue;
        if (at.size() > content.size() && is_alnum(at[content.size()]) && is_alnum(content.back()))
            continue;  // quoted content must end on a word boundary
        if (content.size() > best_len) {
            best = i;
            best_len = content.size();
        }
    }
    return best;
}

const std::vector<std::regex>& id_patterns() {
    // ordered: "answer is (X)", "answer is X", "Answer: X", lone leading forms
    static const std::vector<std::regex> patterns = {
        std::regex(R"([Aa]nswer\s+is\s*:?\s*\(\s*([A-Ga-g])\s*\))"),
        std::regex(R"([Aa]nswer\s+is\s*:?\s*([A-G])(?![A-Za-z0-9]))"),
        std::regex(R"([Aa]nswers?\s*:\s*\(?([A-G])\)?(?![A-Za-z0-9]))"),
        std::regex(R"(^\s*\(\s*([A-Ga-g])\s*\))"),
        std::regex(R"(^\s*([A-G])\s*[.):,])"),
        std::regex(R"(^\s*([A-G])[ \t]*(?:\r?\n|$))"),
    };
    return patterns;
}

std::vector<std::string> read_phrase_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open phrase file: " + path);
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        phrases.push_back(lower_ascii(t));
    }
    if (phrases.empty()) throw Error("phrase file has no entries: " + path);
    return phrases;
}

}  // namespace

std::string extraction_method_name(ExtractionMethod method) {
    switch (method) {
        case ExtractionMethod::LogprobRank: return "logprob_rank";
        case ExtractionMethod::PatternId: return "pattern_id";
        case ExtractionMethod::PatternContent: return "pattern_content";
        case ExtractionMethod::SpecialPhrase: return "special_phrase";
        case ExtractionMethod::ExternalClassifier: return "external_classifier";
        case ExtractionMethod::Failed: return "failed";
    }
    throw Error("unknown extraction method");
}

int TokenOffsetPolicy::resolve(const ModelResponse& response, int option_count) const {
    if (response.token_logprobs.empty())
        throw Error("response carries no token log-probabilities");
    int offset = -1;
    auto it = per_model.find(response.model_tag);
    if (it != per_model.end())
        offset = it->second;
    else if (mode == Mode::Fixed)
        offset = fixed_offset;
    else
        return resolve_offset_auto(response, option_count);
    if (offset < 0 || static_cast<std::size_t>(offset) >= response.token_logprobs.size())
        throw Error("token offset " + std::to_string(offset) + " out of range: response records " +
                    std::to_string(response.token_logprobs.size()) + " positions, need at least " +
                    std::to_string(offset + 1));
    return offset;
}

std::vector<double> option_letter_probs(const ModelResponse& response, int offset,
                                        int option_count) {
    if (offset < 0 || static_cast<std::size_t>(offset) >= response.token_logprobs.size())
        throw Error("token offset " + std::to_string(offset) + " out of range");
    const auto& candidates = response.token_logprobs[static_cast<std::size_t>(offset)].candidates;
    std::vector<double> probs(static_cast<std::size_t>(option_count), 0.0);
    for (int i = 0; i < option_count; ++i) {
        const std::string bare(1, static_cast<char>('A' + i));
        double lp = -HUGE_VAL;
        if (auto it = candidates.find(bare); it != candidates.end()) lp = it->second;
        if (auto it = candidates.find(" " + bare); it != candidates.end())
            lp = std::max(lp, it->second);
        probs[static_cast<std::size_t>(i)] = lp == -HUGE_VAL ? 0.0 : std::exp(lp);
    }
    return probs;
}

int resolve_offset_auto(const ModelResponse& response, int option_count) {
    if (response.token_logprobs.empty())
        throw Error("response carries no token log-probabilities");
    int best = 0;
    double best_mass = -1.0;
    for (std::size_t pos = 0; pos < response.token_logprobs.size(); ++pos) {
        const std::vector<double> probs =
            option_letter_probs(response, static_cast<int>(pos), option_count);
        double mass = 0.0;
        for (double p : probs) mass += p;
        if (mass > best_mass) {  // strict: earliest position wins ties
            best_mass = mass;
            best = static_cast<int>(pos);
        }
    }
    return best;
}

ExtractionResult first_token_answer(const ModelResponse& response, int option_count,
                                    const TokenOffsetPolicy& policy) {
    const int offset = policy.resolve(response, option_count);
    const std::vector<double> probs = option_letter_probs(response, offset, option_count);
    int best = -1;
    double best_p = 0.0;
    for (int i = 0; i < option_count; ++i) {
        const double p = probs[static_cast<std::size_t>(i)];
        if (p > best_p) {  // strict: ties keep the earliest letter
            best_p = p;
            best = i;
        }
    }
    if (best < 0)
        return {AnswerLabel::NaN, ExtractionMethod::Failed,
                "no option letter among candidates at position " + std::to_string(offset)};
    return {option_label(best), ExtractionMethod::LogprobRank,
            "position " + std::to_string(offset) + ": " +
                std::string(1, static_cast<char>('A' + best))};
}

const SpecialPhraseLexicon& SpecialPhraseLexicon::defaults() {
    static const SpecialPhraseLexicon lex = {
        // refusal -> Y
        {"i cannot", "i can't", "i can not", "i'm not able to", "i am not able to", "as an ai",
         "i refuse", "i must decline", "i won't answer", "i will not answer", "unable to answer",
         "i'm sorry, but", "i am sorry, but", "i apologize, but", "not appropriate to answer",
         "for safety reasons"},
        // no correct answer -> X
        {"no correct answer", "none of the options", "none of the given options",
         "none of the listed options", "none of the above", "no right answer",
         "not a correct answer", "no option is correct", "none of these options"},
        // dont know -> Z
        {"i don't know", "i do not know", "i dont know", "i'm not sure", "i am not sure",
         "i'm unsure", "i am unsure", "hard to say", "it is unclear", "unclear to me"},
    };
    return lex;
}

SpecialPhraseLexicon SpecialPhraseLexicon::load(const std::string& refusal_path,
                                                const std::string& no_correct_path,
                                                const std::string& dont_know_path) {
    return {read_phrase_file(refusal_path), read_phrase_file(no_correct_path),
            read_phrase_file(dont_know_path)};
}

ExtractionResult extract_text_answer(std::string_view text,
                                     const std::vector<OptionEntry>& options,
                                     const SpecialPhraseLexicon& lexicon) {
    const std::string text_str(text);
    const std::string lowered = lower_ascii(text);
    std::vector<std::string> lowered_contents;
    lowered_contents.reserve(options.size());
    for (const OptionEntry& opt : options) lowered_contents.push_back(lower_ascii(opt.content));

    // (1) explicit option-ID patterns
    for (const std::regex& pattern : id_patterns()) {
        for (auto it = std::sregex_iterator(text_str.begin(), text_str.end(), pattern);
             it != std::sregex_iterator(); ++it) {
            const std::smatch& m = *it;
            const char letter =
                static_cast<char>(std::toupper(static_cast<unsigned char>(m.str(1)[0])));
            const std::size_t idx = static_cast<std::size_t>(letter - 'A');
            if (idx >= options.size()) continue;  // not a present option letter
            const std::size_t tail_at = static_cast<std::size_t>(m.position(0) + m.length(0));
            const std::size_t quoted =
                adjacent_content(std::string_view(lowered).substr(tail_at), options,
                                 lowered_contents);
            if (quoted < options.size() && quoted != idx)
                return {AnswerLabel::NaN, ExtractionMethod::Failed,
                        std::string("id ") + letter + " contradicted by adjacent content of " +
                            options[quoted].id};
            return {label_from_char(letter), ExtractionMethod::PatternId, m.str(0)};
        }
    }

    // (2) verbatim option-content match, longest span wins, nested spans fold
    // into their container, two independent matches are ambiguous
    {
        std::vector<ContentMatch> matches = match_contents(lowered, options, lowered_contents);
        std::vector<const ContentMatch*> surviving;
        for (const ContentMatch& m : matches) {
            bool nested = false;
            for (const ContentMatch& other : matches) {
                if (&other == &m) continue;
                if (m.begin >= other.begin && m.end <= other.end &&
                    (other.end - other.begin) > (m.end - m.begin)) {
                    nested = true;
                    break;
                }
            }
            if (!nested) surviving.push_back(&m);
        }
        if (surviving.size() == 1) {
            const std::size_t idx = surviving.front()->option_index;
            return {label_from_char(options[idx].id), ExtractionMethod::PatternContent,
                    "\"" + options[idx].content + "\""};
        }
        if (surviving.size() > 1) {
            std::string evidence = "ambiguous content match:";
            for (const ContentMatch* m : surviving)
                evidence += std::string(" ") + options[m->option_index].id;
            return {AnswerLabel::NaN, ExtractionMethod::Failed, evidence};
        }
    }

    // (3) special phrases; in extra-options mode the option carrying the
    // meaning takes the hit so X/Y/Z never leak out of the label space
    struct PhraseClass {
        const std::vector<std::string>* phrases;
        AnswerLabel label;
        OptionKind kind;
    };
    const PhraseClass classes[3] = {
        {&lexicon.refusal, AnswerLabel::Y, OptionKind::Refuse},
        {&lexicon.no_correct, AnswerLabel::X, OptionKind::NoCorrectAnswer},
        {&lexicon.dont_know, AnswerLabel::Z, OptionKind::IDoNotKnow},
    };
    for (const PhraseClass& cls : classes) {
        for (const std::string& phrase : *cls.phrases) {
            if (find_bounded(lowered, phrase) == std::string_view::npos) continue;
            for (const OptionEntry& opt : options)
                if (opt.kind == cls.kind)
                    return {label_from_char(opt.id), ExtractionMethod::SpecialPhrase,
                            "\"" + phrase + "\""};
            return {cls.label, ExtractionMethod::SpecialPhrase, "\"" + phrase + "\""};
        }
    }

    // (4)
    return {AnswerLabel::NaN, ExtractionMethod::Failed, "no pattern matched"};
}

}  // namespace mcqr

#include "mcqr/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "mcqr/seed.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

constexpr double kMinLogprob = -744.0;  // keeps serialized values finite

double clamped_log(double p) {
    return p > 0.0 ? std::max(std::log(p), kMinLogprob) : kMinLogprob;
}

std::vector<double> softmax(const std::vector<double>& scores) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) z += out[i] = std::exp(scores[i] - peak);
    for (double& v : out) v /= z;
    return out;
}

std::vector<double> split_doubles(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        const std::string piece(trim(text.substr(start, comma - start)));
        if (piece.empty()) throw Error("empty number in list: '" + std::string(text) + "'");
        try {
            out.push_back(std::stod(piece));
        } catch (const std::exception&) {
            throw Error("bad number '" + piece + "' in responder parameter");
        }
        start = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

SyntheticResponder::Style style_from_name(std::string_view name) {
    if (name == "bare_letter") return SyntheticResponder::Style::BareLetter;
    if (name == "letter_content") return SyntheticResponder::Style::LetterContent;
    if (name == "answer_prefix") return SyntheticResponder::Style::AnswerPrefix;
    if (name == "leading_space") return SyntheticResponder::Style::LeadingSpace;
    if (name == "verbose") return SyntheticResponder::Style::Verbose;
    throw Error("unknown responder style: " + std::string(name));
}

struct RefusalShape {
    const char* text;
    const char* first_token;
};

// phrasing per class X, Y, Z; first tokens carry no option letter on purpose
const RefusalShape kRefusals[3] = {
    {"There is no correct answer among the listed options.", "There"},
    {"I cannot answer this question for safety reasons.", "I"},
    {"I do not know the answer to this question.", "I"},
};

TokenLogprobRecord filler(int position, const char* token, double p) {
    TokenLogprobRecord rec;
    rec.position = position;
    rec.candidates[token] = clamped_log(p);
    rec.candidates["\n"] = clamped_log(0.02);
    return rec;
}

std::string render_text(SyntheticResponder::Style style, char letter, const std::string& content) {
    switch (style) {
        case SyntheticResponder::Style::BareLetter: return std::string(1, letter);
        case SyntheticResponder::Style::LetterContent:
            return std::string(1, letter) + ". " + content;
        case SyntheticResponder::Style::AnswerPrefix: return std::string("Answer: ") + letter;
        case SyntheticResponder::Style::LeadingSpace: return std::string(" ") + letter;
        case SyntheticResponder::Style::Verbose:
            return std::string("The answer is (") + letter + ") " + content + ".";
    }
    throw Error("unknown responder style");
}

// position of the option-letter record for each style
int letter_position(SyntheticResponder::Style style) {
    switch (style) {
        case SyntheticResponder::Style::BareLetter:
        case SyntheticResponder::Style::LetterContent: return 0;
        case SyntheticResponder::Style::LeadingSpace: return 1;
        case SyntheticResponder::Style::AnswerPrefix:
        case SyntheticResponder::Style::Verbose: return 2;
    }
    throw Error("unknown responder style");
}

}  // namespace

void SyntheticResponder::validate() const {
    if (position_bias.size() > 7) throw Error("position_bias supports at most 7 positions");
    for (double p : {content_skill, mismatch_prob, refusal_prob})
        if (p < 0.0 || p > 1.0) throw Error("responder probabilities must lie in [0, 1]");
    if (content_noise_sigma < 0.0) throw Error("content noise sigma must be non-negative");
    double pref_sum = 0.0;
    for (double w : special_pref) {
        if (w < 0.0) throw Error("special_pref weights must be non-negative");
        pref_sum += w;
    }
    if (pref_sum <= 0.0) throw Error("special_pref weights must not all be zero");
}

SyntheticResponder SyntheticResponder::parse(std::string_view endpoint) {
    constexpr std::string_view scheme = "synthetic:";
    if (endpoint.substr(0, scheme.size()) != scheme)
        throw Error("not a synthetic endpoint: " + std::string(endpoint));
    SyntheticResponder r;
    std::string_view rest = endpoint.substr(scheme.size());
    while (!rest.empty()) {
        std::size_t semi = rest.find(';');
        const std::string_view entry = trim(rest.substr(0, semi));
        rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string_view::npos)
            throw Error("expected key=value in synthetic endpoint, got '" + std::string(entry) + "'");
        const std::string key(trim(entry.substr(0, eq)));
        const std::string value(trim(entry.substr(eq + 1)));
        if (key == "position_bias") {
            r.position_bias = split_doubles(value);
        } else if (key == "last_position_weight") {
            r.last_position_weight = std::stod(value);
        } else if (key == "content_skill") {
            r.content_skill = std::stod(value);
        } else if (key == "knowledge_weight") {
            r.knowledge_weight = std::stod(value);
        } else if (key == "sigma") {
            r.content_noise_sigma = std::stod(value);
        } else if (key == "mismatch_prob") {
            r.mismatch_prob = std::stod(value);
        } else if (key == "refusal_prob") {
            r.refusal_prob = std::stod(value);
        } else if (key == "special_pref") {
            const std::vector<double> w = split_doubles(value);
            if (w.size() != 3) throw Error("special_pref needs three weights");
            std::copy(w.begin(), w.end(), r.special_pref.begin());
        } else if (key == "style") {
            r.style = style_from_name(value);
        } else if (key == "seed") {
            r.seed = std::stoull(value);
        } else if (key == "tag") {
            r.tag = value;
        } else {
            throw Error("unknown synthetic responder parameter: " + key);
        }
    }
    r.validate();
    return r;
}

ModelResponse synthetic_respond(const SyntheticResponder& responder, const RunView& view,
                                std::string_view prompt) {
    const std::size_t n = view.options.size();
    if (n == 0 || view.permutation.size() != n) throw Error("malformed run view");

    ModelResponse response;
    response.model_tag = responder.tag;

    // refusal decision is a property of the item, stable across perturbations
    SeedStream refusal_stream(responder.seed, {"item", view.item_id, "refusal"});
    if (refusal_stream.chance(responder.refusal_prob)) {
        SeedStream class_stream(responder.seed, {"item", view.item_id, "refusal_class"});
        double total = 0.0;
        for (double w : responder.special_pref) total += w;
        const double draw = class_stream.unit() * total;
        int cls = 0;
        double cum = 0.0;
        for (int i = 0; i < 3; ++i) {
            cum += responder.special_pref[static_cast<std::size_t>(i)];
            if (draw < cum) {
                cls = i;
                break;
            }
        }
        response.text = kRefusals[cls].text;
        TokenLogprobRecord first;
        first.position = 0;
        first.candidates[kRefusals[cls].first_token] = clamped_log(0.9);
        first.candidates["As"] = clamped_log(0.02);
        response.token_logprobs.push_back(first);
        response.token_logprobs.push_back(filler(1, " do", 0.5));
        response.token_logprobs.push_back(filler(2, " not", 0.5));
        return response;
    }

    // content belief over canonical contents: noise everywhere, plus the
    // knowledge weight on the gold when this item is known
    SeedStream content_stream(responder.seed, {"item", view.item_id, "content"});
    std::vector<double> content(n);
    for (std::size_t j = 0; j < n; ++j)
        content[j] = content_stream.gaussian(responder.content_noise_sigma);
    SeedStream knows_stream(responder.seed, {"item", view.item_id, "knows"});
    if (knows_stream.chance(responder.content_skill))
        content[static_cast<std::size_t>(view.gold_canonical)] += responder.knowledge_weight;

    // first-token scores per position: position bias plus the belief about
    // whichever content currently sits there
    std::vector<int> canonical_at(n);
    for (std::size_t c = 0; c < n; ++c)
        canonical_at[static_cast<std::size_t>(view.permutation[c])] = static_cast<int>(c);
    std::vector<double> scores(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        double bias = pos < responder.position_bias.size() ? responder.position_bias[pos] : 0.0;
        if (pos + 1 == n) bias += responder.last_position_weight;
        scores[pos] = bias + content[static_cast<std::size_t>(canonical_at[pos])];
    }
    const std::vector<double> probs = softmax(scores);
    const std::size_t first_pos = static_cast<std::size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());

    // text answer echoes the first token unless corrupted toward the content
    // belief; a corrupted answer always differs from the first-token letter
    std::size_t text_canonical = static_cast<std::size_t>(canonical_at[first_pos]);
    SeedStream mismatch_stream(responder.seed,
                               {"run", view.item_id, to_hex(fnv1a64(prompt)), "mismatch"});
    if (mismatch_stream.chance(responder.mismatch_prob)) {
        std::size_t preferred = 0;
        for (std::size_t j = 1; j < n; ++j)
            if (content[j] > content[preferred]) preferred = j;
        if (preferred == text_canonical) {
            // belief coincides with the first token: take the runner-up
            std::size_t second = preferred == 0 ? 1 : 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != preferred && content[j] > content[second]) second = j;
            preferred = second;
        }
        text_canonical = preferred;
    }
    const std::size_t text_pos = static_cast<std::size_t>(view.permutation[text_canonical]);
    const char text_letter = static_cast<char>('A' + text_pos);
    response.text =
        render_text(responder.style, text_letter, view.options[text_pos].content);

    // letter record: 0.98 of the mass on the option letters (shape-faithful:
    // a sliver always goes to non-letter tokens), style decides the position
    // and whether the letter tokens carry a leading space
    TokenLogprobRecord letters;
    const bool spaced = responder.style == SyntheticResponder::Style::AnswerPrefix ||
                        responder.style == SyntheticResponder::Style::Verbose;
    for (std::size_t pos = 0; pos < n; ++pos) {
        std::string token(1, static_cast<char>('A' + pos));
        if (spaced) token = " " + token;
        letters.candidates[token] = clamped_log(0.98 * probs[pos]);
    }
    letters.candidates["."] = clamped_log(0.01);

    const int lp = letter_position(responder.style);
    letters.position = lp;
    switch (responder.style) {
        case SyntheticResponder::Style::BareLetter:
        case SyntheticResponder::Style::LetterContent:
            response.token_logprobs.push_back(letters);
            response.token_logprobs.push_back(filler(1, ".", 0.9));
            response.token_logprobs.push_back(filler(2, " ", 0.5));
            break;
        case SyntheticResponder::Style::LeadingSpace: {
            TokenLogprobRecord space;
            space.position = 0;
            space.candidates[" "] = clamped_log(0.93);
            space.candidates["Sure"] = clamped_log(0.02);
            response.token_logprobs.push_back(space);
            response.token_logprobs.push_back(letters);
            response.token_logprobs.push_back(filler(2, ".", 0.9));
            break;
        }
        case SyntheticResponder::Style::AnswerPrefix: {
            TokenLogprobRecord head;
            head.position = 0;
            head.candidates["Answer"] = clamped_log(0.95);
            head.candidates["The"] = clamped_log(0.02);
            response.token_logprobs.push_back(head);
            TokenLogprobRecord colon;
            colon.position = 1;
            colon.candidates[":"] = clamped_log(0.97);
            response.token_logprobs.push_back(colon);
            response.token_logprobs.push_back(letters);
            break;
        }
        case SyntheticResponder::Style::Verbose: {
            TokenLogprobRecord head;
            head.position = 0;
            head.candidates["The"] = clamped_log(0.9);
            response.token_logprobs.push_back(head);
            TokenLogprobRecord mid;
            mid.position = 1;
            mid.candidates[" answer"] = clamped_log(0.9);
            response.token_logprobs.push_back(mid);
            response.token_logprobs.push_back(letters);
            break;
        }
    }
    return response;
}

}  // namespace mcqr

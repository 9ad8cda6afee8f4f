#include "mcqr/perturb.hpp"

#include <algorithm>
#include <cctype>

#include "mcqr/util.hpp"

namespace mcqr {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_ascii_letter(const std::string& ch) {
    return ch.size() == 1 && std::isalpha(static_cast<unsigned char>(ch[0])) != 0;
}

// Splits text into words and the whitespace runs around them so the exact
// whitespace structure can be reassembled. gaps has words.size()+1 entries.
struct Tokens {
    std::vector<std::string> words;
    std::vector<std::string> gaps;
};

Tokens tokenize(std::string_view text) {
    Tokens t;
    std::size_t i = 0;
    std::string gap;
    while (i <= text.size()) {
        if (i == text.size() || is_space(text[i])) {
            if (i < text.size()) {
                gap += text[i];
                ++i;
                continue;
            }
            break;
        }
        t.gaps.push_back(gap);
        gap.clear();
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        t.words.emplace_back(text.substr(start, i - start));
    }
    t.gaps.push_back(gap);
    return t;
}

std::string reassemble(const Tokens& t) {
    std::string out = t.gaps.front();
    for (std::size_t i = 0; i < t.words.size(); ++i) {
        out += t.words[i];
        out += t.gaps[i + 1];
    }
    return out;
}

std::string join(const std::vector<std::string>& chars) {
    std::string out;
    for (const std::string& c : chars) out += c;
    return out;
}

const char* kExtraContents[3] = {"No correct answer", "Refuse", "I do not know"};
const OptionKind kExtraKinds[3] = {OptionKind::NoCorrectAnswer, OptionKind::Refuse,
                                   OptionKind::IDoNotKnow};

OptionShuffle apply_permutation(const std::vector<OptionEntry>& options, std::vector<int> perm) {
    OptionShuffle out;
    out.options.resize(options.size());
    for (std::size_t c = 0; c < options.size(); ++c) {
        const int pos = perm[c];
        out.options[static_cast<std::size_t>(pos)] = OptionEntry{
            static_cast<char>('A' + pos), options[c].content, options[c].kind};
    }
    out.permutation = std::move(perm);
    return out;
}

}  // namespace

void PerturbationConfig::validate() const {
    if (typo_word_probability < 0.0 || typo_word_probability > 1.0)
        throw Error("typo_word_probability must lie in [0, 1]");
    if (word_swap_count < 2) throw Error("word_swap_count must be at least 2");
    if (letter_swap_min_word_length < 3) throw Error("letter_swap_min_word_length must be at least 3");
}

std::string letter_typos(std::string_view question, SeedStream& stream, double p) {
    if (p < 0.0 || p > 1.0) throw Error("typo probability must lie in [0, 1]");
    Tokens t = tokenize(question);
    for (std::string& word : t.words) {
        std::vector<std::string> chars = utf8_chars(word);
        std::vector<std::size_t> letter_positions;
        for (std::size_t i = 0; i < chars.size(); ++i)
            if (is_ascii_letter(chars[i])) letter_positions.push_back(i);
        if (letter_positions.empty()) continue;
        if (!stream.chance(p)) continue;
        const std::size_t pos =
            letter_positions[stream.below(static_cast<std::uint32_t>(letter_positions.size()))];
        const char orig = chars[pos][0];
        char replacement;
        if (orig >= 'a' && orig <= 'z') {
            // uniform over the other 25 lowercase letters
            int r = static_cast<int>(stream.below(25));
            replacement = static_cast<char>('a' + (r < orig - 'a' ? r : r + 1));
        } else {
            replacement = static_cast<char>('a' + stream.below(26));
        }
        chars[pos] = std::string(1, replacement);
        word = join(chars);
    }
    return reassemble(t);
}

std::string letter_swap(std::string_view question, SeedStream& stream, int min_word_length) {
    if (min_word_length < 3) throw Error("letter_swap_min_word_length must be at least 3");
    Tokens t = tokenize(question);
    for (std::string& word : t.words) {
        std::vector<std::string> chars = utf8_chars(word);
        const std::size_t n = chars.size();
        if (n < static_cast<std::size_t>(min_word_length)) continue;
        const std::size_t interior = n - 2;
        if (interior < 2) continue;
        // uniform unordered pair of distinct interior positions
        std::size_t i = stream.below(static_cast<std::uint32_t>(interior));
        std::size_t j = stream.below(static_cast<std::uint32_t>(interior - 1));
        if (j >= i) ++j;
        std::swap(chars[1 + i], chars[1 + j]);
        word = join(chars);
    }
    return reassemble(t);
}

WordSwapResult word_swap(std::string_view question, SeedStream& stream, int k) {
    if (k < 2) throw Error("word_swap_count must be at least 2");
    Tokens t = tokenize(question);
    const std::size_t n = t.words.size();
    if (n < static_cast<std::size_t>(k) + 2) return {std::string(question), true};

    std::vector<int> interior;
    for (std::size_t i = 1; i + 1 < n; ++i) interior.push_back(static_cast<int>(i));
    // partial Fisher-Yates: first k entries become the chosen slots
    for (int i = 0; i < k; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) +
            stream.below(static_cast<std::uint32_t>(interior.size() - static_cast<std::size_t>(i)));
        std::swap(interior[static_cast<std::size_t>(i)], interior[j]);
    }
    std::vector<int> slots(interior.begin(), interior.begin() + k);
    std::sort(slots.begin(), slots.end());

    std::vector<int> perm;
    do {
        perm = stream.permutation(k);
    } while (std::is_sorted(perm.begin(), perm.end()));  // reject the identity

    std::vector<std::string> rearranged(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        rearranged[static_cast<std::size_t>(i)] =
            t.words[static_cast<std::size_t>(slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])];
    for (int i = 0; i < k; ++i)
        t.words[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])] =
            rearranged[static_cast<std::size_t>(i)];
    return {reassemble(t), false};
}

OptionShuffle option_swap(const std::vector<OptionEntry>& options, SeedStream& stream) {
    if (options.empty()) throw Error("option_swap needs a non-empty option list");
    return apply_permutation(options, stream.permutation(static_cast<int>(options.size())));
}

OptionShuffle add_extra_options(const std::vector<OptionEntry>& options, SeedStream& stream) {
    if (options.size() != 4) throw Error("add_extra_options requires exactly 4 options");
    for (const OptionEntry& opt : options)
        if (opt.kind != OptionKind::Regular)
            throw Error("add_extra_options requires regular options only");
    std::vector<OptionEntry> augmented = options;
    for (int i = 0; i < 3; ++i)
        augmented.push_back(OptionEntry{static_cast<char>('E' + i), kExtraContents[i], kExtraKinds[i]});
    return apply_permutation(augmented, stream.permutation(7));
}

}  // namespace mcqr

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mcqr/perturb.hpp"
#include "mcqr/util.hpp"

using namespace mcqr;
using test::four_options;

namespace {

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

std::multiset<std::string> char_multiset(const std::string& word) {
    auto chars = utf8_chars(word);
    return {chars.begin(), chars.end()};
}

std::string whitespace_profile(const std::string& text) {
    std::string profile;
    for (char c : text) profile.push_back(c == ' ' || c == '\t' || c == '\n' ? c : 'x');
    return profile;
}

}  // namespace

TEST_SUITE("perturb") {

TEST_CASE("letter_typos changes at most one letter per word") {
    const std::string question =
        "Which of the following statements about the covalent bonding model is accurate?";
    SeedStream stream(3, "item", PerturbationType::LetterTypos, 0, 0, "question");
    std::string out = letter_typos(question, stream, 0.2);

    CHECK(whitespace_profile(out) == whitespace_profile(question));
    auto before = split_words(question);
    auto after = split_words(out);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        REQUIRE(before[i].size() == after[i].size());
        int diffs = 0;
        for (std::size_t j = 0; j < before[i].size(); ++j) {
            if (before[i][j] != after[i][j]) {
                ++diffs;
                // replacement is a lowercase letter and differs from the original
                CHECK(after[i][j] >= 'a');
                CHECK(after[i][j] <= 'z');
            }
        }
        CHECK(diffs <= 1);
    }
}

TEST_CASE("letter_typos hits roughly p of the words") {
    int changed = 0, total = 0;
    for (int q = 0; q < 200; ++q) {
        std::string question;
        for (int w = 0; w < 12; ++w) question += (w ? " " : "") + std::string("umbrella");
        SeedStream stream(q, "item", PerturbationType::LetterTypos, q, 0, "question");
        std::string out = letter_typos(question, stream, 0.2);
        auto before = split_words(question);
        auto after = split_words(out);
        for (std::size_t i = 0; i < before.size(); ++i) {
            ++total;
            if (before[i] != after[i]) ++changed;
        }
    }
    double fraction = static_cast<double>(changed) / total;  // 2400 words
    CHECK(fraction > 0.15);
    CHECK(fraction < 0.25);
}

TEST_CASE("letter_typos leaves letterless tokens and p=0 untouched") {
    const std::string question = "12 + 34 = ?";
    SeedStream stream(5, "item", PerturbationType::LetterTypos, 0, 0, "question");
    CHECK(letter_typos(question, stream, 0.9) == question);

    const std::string prose = "plain words stay intact";
    SeedStream stream2(5, "item", PerturbationType::LetterTypos, 1, 0, "question");
    CHECK(letter_typos(prose, stream2, 0.0) == prose);
}

TEST_CASE("letter_swap preserves endpoints and character multisets") {
    const std::string question = "Which measurement framework описание best explains café prices?";
    SeedStream stream(7, "item", PerturbationType::LetterSwap, 0, 0, "question");
    std::string out = letter_swap(question, stream, 4);

    CHECK(whitespace_profile(out) == whitespace_profile(question));
    auto before = split_words(question);
    auto after = split_words(out);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        auto b = utf8_chars(before[i]);
        auto a = utf8_chars(after[i]);
        REQUIRE(b.size() == a.size());
        CHECK(a.front() == b.front());
        CHECK(a.back() == b.back());
        CHECK(char_multiset(before[i]) == char_multiset(after[i]));
        if (b.size() < 4) CHECK(before[i] == after[i]);
    }
}

TEST_CASE("letter_swap moves something in long words") {
    // one long word with all-distinct characters must visibly change
    const std::string word = "abcdefghij";
    int changed = 0;
    for (int s = 0; s < 50; ++s) {
        SeedStream stream(s, "item", PerturbationType::LetterSwap, 0, 0, "question");
        if (letter_swap(word, stream, 4) != word) ++changed;
    }
    CHECK(changed == 50);  // a transposition of distinct interior chars always shows
}

TEST_CASE("word_swap keeps multiset and endpoints, flags short questions") {
    const std::string question =
        "Which of the recorded values was entered by the second field team yesterday?";
    SeedStream stream(9, "item", PerturbationType::WordSwap, 0, 0, "question");
    WordSwapResult result = word_swap(question, stream, 4);
    CHECK_FALSE(result.degraded);

    auto before = split_words(question);
    auto after = split_words(result.text);
    REQUIRE(before.size() == after.size());
    CHECK(after.front() == before.front());
    CHECK(after.back() == before.back());
    CHECK(std::multiset<std::string>(before.begin(), before.end()) ==
          std::multiset<std::string>(after.begin(), after.end()));
    CHECK(result.text != question);  // distinct words, non-identity rearrangement

    SeedStream stream2(9, "item", PerturbationType::WordSwap, 1, 0, "question");
    WordSwapResult tiny = word_swap("too few words here", stream2, 4);
    CHECK(tiny.degraded);
    CHECK(tiny.text == "too few words here");

    SeedStream stream3(9, "item", PerturbationType::WordSwap, 2, 0, "question");
    WordSwapResult exact = word_swap("one two three four five six", stream3, 4);
    CHECK_FALSE(exact.degraded);  // k+2 = 6 words is just enough
}

TEST_CASE("option_swap permutes and re-letters") {
    auto options = four_options();
    bool saw_identity = false, saw_non_identity = false;
    for (int s = 0; s < 200; ++s) {
        SeedStream stream(s, "item", PerturbationType::OptionSwap, 0, s, "options");
        OptionShuffle shuffled = option_swap(options, stream);
        REQUIRE(shuffled.options.size() == 4);
        REQUIRE(shuffled.permutation.size() == 4);
        std::multiset<std::string> before, after;
        for (const auto& opt : options) before.insert(opt.content);
        for (std::size_t i = 0; i < shuffled.options.size(); ++i) {
            CHECK(shuffled.options[i].id == static_cast<char>('A' + i));
            after.insert(shuffled.options[i].content);
        }
        CHECK(before == after);
        bool identity = true;
        for (std::size_t i = 0; i < 4; ++i) {
            // permutation maps canonical index to current position
            std::size_t pos = static_cast<std::size_t>(shuffled.permutation[i]);
            REQUIRE(pos < 4);
            CHECK(shuffled.options[pos].content == options[i].content);
            if (pos != i) identity = false;
        }
        (identity ? saw_identity : saw_non_identity) = true;
    }
    CHECK(saw_identity);      // identity is allowed (about 1/24 of draws)
    CHECK(saw_non_identity);
}

TEST_CASE("add_extra_options injects one of each special kind") {
    auto options = four_options();
    for (int s = 0; s < 50; ++s) {
        SeedStream stream(s, "item", PerturbationType::ExtraOptions, 1, s, "options");
        OptionShuffle shuffled = add_extra_options(options, stream);
        REQUIRE(shuffled.options.size() == 7);
        int specials[3] = {0, 0, 0};
        std::multiset<std::string> regular_contents;
        for (std::size_t i = 0; i < 7; ++i) {
            CHECK(shuffled.options[i].id == static_cast<char>('A' + i));
            if (shuffled.options[i].kind == OptionKind::Regular)
                regular_contents.insert(shuffled.options[i].content);
            else
                ++specials[static_cast<int>(shuffled.options[i].kind) - 1];
        }
        CHECK(specials[0] == 1);
        CHECK(specials[1] == 1);
        CHECK(specials[2] == 1);
        std::multiset<std::string> before;
        for (const auto& opt : options) before.insert(opt.content);
        CHECK(regular_contents == before);
        // permutation tracks the four canonical contents
        for (std::size_t i = 0; i < 4; ++i) {
            std::size_t pos = static_cast<std::size_t>(shuffled.permutation[i]);
            REQUIRE(pos < 7);
            CHECK(shuffled.options[pos].content == options[i].content);
        }
    }

    std::vector<OptionEntry> seven = four_options();
    seven.push_back({'E', "No correct answer", OptionKind::NoCorrectAnswer});
    seven.push_back({'F', "Refuse", OptionKind::Refuse});
    seven.push_back({'G', "I do not know", OptionKind::IDoNotKnow});
    SeedStream stream(1, "item", PerturbationType::ExtraOptions, 1, 0, "options");
    CHECK_THROWS_AS(add_extra_options(seven, stream), Error);
}

TEST_CASE("perturbations are deterministic per stream key") {
    const std::string question =
        "Deterministic behaviour of every mutation is the whole point of the seeding scheme?";
    for (int variant = 0; variant < 3; ++variant) {
        SeedStream s1(42, "item", PerturbationType::LetterTypos, variant, 0, "question");
        SeedStream s2(42, "item", PerturbationType::LetterTypos, variant, 0, "question");
        CHECK(letter_typos(question, s1, 0.2) == letter_typos(question, s2, 0.2));
    }
    SeedStream s1(42, "item", PerturbationType::WordSwap, 0, 0, "question");
    SeedStream s2(42, "item", PerturbationType::WordSwap, 0, 0, "question");
    CHECK(word_swap(question, s1, 4).text == word_swap(question, s2, 4).text);
}

TEST_CASE("perturbation config validation") {
    PerturbationConfig config;
    CHECK_NOTHROW(config.validate());
    PerturbationConfig bad = config;
    bad.typo_word_probability = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    PerturbationConfig bad2 = config;
    bad2.word_swap_count = 0;
    CHECK_THROWS_AS(bad2.validate(), Error);
}

}  // TEST_SUITE

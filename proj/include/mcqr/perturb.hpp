#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcqr/core.hpp"
#include "mcqr/seed.hpp"

namespace mcqr {

struct PerturbationConfig {
    double typo_word_probability = 0.2;
    int word_swap_count = 4;
    int letter_swap_min_word_length = 4;  // words shorter than this are left alone

    void validate() const;
};

// Each word (maximal run of non-whitespace) is independently hit with
// probability p; a hit replaces one uniformly chosen ASCII-letter position
// with a different lowercase letter. Whitespace structure, word count and
// word lengths are preserved; tokens without any ASCII letter never change.
std::string letter_typos(std::string_view question, SeedStream& stream, double p);

// Words of at least min_word_length characters get one uniformly chosen pair
// of distinct interior positions transposed; first and last character never
// move. Shorter words are untouched.
std::string letter_swap(std::string_view question, SeedStream& stream, int min_word_length);

struct WordSwapResult {
    std::string text;
    bool degraded = false;  // question too short, returned unchanged
};

// Rearranges k uniformly chosen interior words by a uniform non-identity
// permutation; first and last word stay in place. Questions with fewer than
// k+2 words come back unchanged with the degraded flag set.
WordSwapResult word_swap(std::string_view question, SeedStream& stream, int k);

struct OptionShuffle {
    std::vector<OptionEntry> options;  // re-lettered consecutively from A
    std::vector<int> permutation;      // canonical index -> new position
};

// Uniform permutation of the options (identity included), IDs reassigned.
OptionShuffle option_swap(const std::vector<OptionEntry>& options, SeedStream& stream);

// Appends the three out-of-option entries ("No correct answer", "Refuse",
// "I do not know"), shuffles all seven uniformly and re-letters A..G.
// Requires exactly four regular options.
OptionShuffle add_extra_options(const std::vector<OptionEntry>& options, SeedStream& stream);

}  // namespace mcqr

#pragma once

#include <string>

#include "mcqr/core.hpp"

namespace mcqr {

struct PromptTemplate {
    std::string system_text =
        "Please read the multiple-choice question below carefully and select ONE of the listed "
        "options and only give a single letter.";
    std::string question_header = "Question:";
    std::string options_header = "Options:";
};

// Renders the zero-shot prompt: system text, blank line, question line,
// options header, then one "ID. content" line per option. Empty template
// fields drop their block (an all-empty template yields question and options
// only). Distinct option orderings always render distinct prompts.
std::string build_prompt(const McqItem& item, const PromptTemplate& tpl = {});

// "A. content\nB. content\n..." — the option block by itself.
std::string render_option_lines(const std::vector<OptionEntry>& options);

// Option block under a "References:" header; the input format answer
// classifier services are expected to understand.
std::string render_reference_block(const std::vector<OptionEntry>& options);

}  // namespace mcqr

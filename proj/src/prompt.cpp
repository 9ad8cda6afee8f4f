#include "mcqr/prompt.hpp"

namespace mcqr {

std::string render_option_lines(const std::vector<OptionEntry>& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out += '\n';
        out += options[i].id;
        out += ". ";
        out += options[i].content;
    }
    return out;
}

std::string render_reference_block(const std::vector<OptionEntry>& options) {
    return "References:\n" + render_option_lines(options);
}

std::string build_prompt(const McqItem& item, const PromptTemplate& tpl) {
    std::string out;
    if (!tpl.system_text.empty()) {
        out += tpl.system_text;
        out += "\n\n";
    }
    if (!tpl.question_header.empty()) {
        out += tpl.question_header;
        out += ' ';
    }
    out += item.question;
    out += '\n';
    if (!tpl.options_header.empty()) {
        out += tpl.options_header;
        out += '\n';
    }
    out += render_option_lines(item.options);
    return out;
}

}  // namespace mcqr

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "mcqr/adapter.hpp"
#include "mcqr/classifier.hpp"
#include "mcqr/extract.hpp"
#include "mcqr/protocol.hpp"

namespace mcqr {

// Everything a campaign needs, loaded from one JSON file. Relative paths
// resolve against the config file's directory. master_seed is mandatory;
// every referenced path must exist at load time. Credentials never appear
// here — only the NAME of the environment variable that holds the API key.
struct HarnessConfig {
    std::filesystem::path dataset_path;
    std::string dataset_format = "mmlu_csv";
    std::optional<std::filesystem::path> subjects_table;  // subject -> subcategory TSV

    HttpModelConfig model;
    TokenOffsetPolicy offset;
    ClassifierConfig classifier;
    CampaignPlan plan;

    // empty paths = compiled-in default lexicons
    std::filesystem::path refusal_lexicon;
    std::filesystem::path no_correct_lexicon;
    std::filesystem::path dont_know_lexicon;

    std::filesystem::path output_dir = "out";
    std::filesystem::path replay_log;  // defaults to output_dir / "replay.jsonl"

    static HarnessConfig load(const std::filesystem::path& file);

    SpecialPhraseLexicon load_lexicon() const;
};

}  // namespace mcqr

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

// Subject -> subcategory lookup, shipped as a tab-separated data file so the
// grouping can be audited and extended without a rebuild.
struct SubjectMap {
    std::map<std::string, std::string> category_by_subject;

    // Unknown subjects fall into "other".
    std::string lookup(const std::string& subject) const;

    static SubjectMap load(const std::filesystem::path& tsv_path);
};

// One comma-separated file of 4-option questions: columns question,
// option1..option4, answer letter; no header row; RFC-4180 quoting (fields
// may contain commas, quotes and newlines). Task = file stem with a trailing
// _test/_val/_dev suffix dropped; item ids are task#row.
std::vector<McqItem> load_csv_file(const std::filesystem::path& file, const SubjectMap& subjects);

// A single .csv file or a directory scanned for *.csv in filename order.
std::vector<McqItem> load_csv(const std::filesystem::path& path, const SubjectMap& subjects);

// One JSON object per line with the item schema used across the harness
// (question, options, gold, task, subcategory, optional item_id).
std::vector<McqItem> load_jsonl(const std::filesystem::path& file);

// Dispatch on format name: "mmlu_csv" or "jsonl".
std::vector<McqItem> load_dataset(const std::filesystem::path& path, const std::string& format,
                                  const SubjectMap& subjects);

}  // namespace mcqr

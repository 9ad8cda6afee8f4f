#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcqr/protocol.hpp"

namespace mcqr {

// Campaign facts for the manifest. Deliberately free of wall-clock times,
// worker counts and execution mode: the same campaign must produce
// byte-identical bundles whether it ran live or from its replay log, single-
// or multi-threaded.
struct ReportContext {
    std::string harness_version;
    std::string model_tag;
    int dataset_items = 0;
    int planned_runs = 0;
    int completed_runs = 0;
    std::vector<std::string> failures;
};

// Writes the bundle into dir (created if needed):
//   manifest.json                     campaign parameters, counts, failures, notes
//   selection_bias.tsv                accuracy / recall-spread per task and track
//   subcategory_selection_bias.tsv    the same grouped by subcategory
//   perturbation_entropy.tsv          mean answer entropy per task, type, channel
//   mismatch.tsv                      first-token vs text disagreement rates
//   floating.tsv                      voted-answer change rates under injected options
//   answer_distribution.tsv           answer histograms before/after injection
//   priors.json                       estimated position priors per task
void write_report_bundle(const std::filesystem::path& dir, const CampaignPlan& plan,
                         const CampaignScores& scores, const ReportContext& context);

// Short human-readable digest of the same numbers.
void print_summary(std::ostream& out, const CampaignScores& scores);

}  // namespace mcqr

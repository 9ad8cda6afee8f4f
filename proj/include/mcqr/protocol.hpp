#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcqr/adapter.hpp"
#include "mcqr/classifier.hpp"
#include "mcqr/core.hpp"
#include "mcqr/debias.hpp"
#include "mcqr/extract.hpp"
#include "mcqr/metrics.hpp"
#include "mcqr/perturb.hpp"
#include "mcqr/prompt.hpp"
#include "mcqr/replay.hpp"

namespace mcqr {

// Everything that defines a campaign's run set. Two campaigns with equal
// plans and equal datasets plan byte-identical runs.
struct CampaignPlan {
    std::vector<PerturbationType> types{PerturbationType::None};
    int runs_per_perturbation = 4;  // perturbation indices per textual type
    int shuffles_per_run = 5;       // option shuffles per perturbation index
    int option_swap_runs = 20;      // shuffles for the option-swap type
    bool first_token_channel = true;
    bool text_channel = true;
    bool debias_enabled = false;
    double estimation_fraction = 0.05;  // leading share of each task used for priors
    int estimation_min_items = 10;
    int num_cycles = 4;           // content rotations per estimation item
    bool entropy_over_raw = false;  // entropy over raw answers instead of voted
    std::uint64_t master_seed = 0;
    PerturbationConfig perturb;
    PromptTemplate prompt;

    void validate() const;
    bool has_type(PerturbationType type) const;
};

// One planned inference: everything needed to issue, persist, and later
// re-derive the run without re-rolling any randomness.
struct PlannedRun {
    RunKey key;
    std::string question;              // perturbed question text
    std::vector<OptionEntry> options;  // options as presented, re-lettered
    std::vector<int> permutation;      // canonical index -> presented position
    std::string prompt;
    bool degraded = false;  // question too short for the full perturbation
};

RunView view_of(const McqItem& item, const PlannedRun& run);

// Protocol runs for one item, in key order: for each textual type,
// runs_per_perturbation question variants x shuffles_per_run option orders;
// option_swap_runs re-orderings of the unperturbed question; paired
// original/injected arms for the extra-options type; one baseline run for
// the none type. All randomness comes from streams keyed by the RunKey.
std::vector<PlannedRun> plan_runs(const McqItem& item, const CampaignPlan& plan);

// Prior-estimation runs: the unperturbed question asked num_cycles times
// with option contents cyclically rotated (IDs fixed). Keyed as the none
// type with perturbation_index 1 + rotation.
std::vector<PlannedRun> plan_estimation_runs(const McqItem& item, const CampaignPlan& plan);

// Items whose rotations feed prior estimation: per task, the first
// max(estimation_min_items, ceil(estimation_fraction * n)) items in dataset
// order, capped at n. Returns indices into `items`.
std::map<std::string, std::vector<std::size_t>> estimation_subset(
    const std::vector<McqItem>& items, const CampaignPlan& plan);

enum class CampaignMode { Live, Replay, Cache };

std::string campaign_mode_name(CampaignMode mode);
std::optional<CampaignMode> campaign_mode_from_name(std::string_view name);

struct CampaignOutcome {
    ReplayStore store;                  // completed records, plan order
    std::vector<std::string> failures;  // "key: message", plan order
    int planned_runs = 0;
};

// Executes every planned run for every item (estimation rotations first,
// then protocol runs, items in dataset order). Replay mode requires a cache
// holding every key; cache mode serves hits from it and runs misses through
// the adapter; live mode always asks the adapter. The record store comes
// back in plan order whatever the worker count, so persisted logs are
// byte-identical across parallelism degrees. Failed runs become failure
// entries, never records. When log_out is given, records stream to it in
// plan order as they complete. Progress notes go to `progress` when given.
CampaignOutcome run_campaign(const std::vector<McqItem>& items, const CampaignPlan& plan,
                             ModelAdapter* adapter, CampaignMode mode, int workers,
                             const ReplayStore* cache, std::ostream* log_out,
                             std::ostream* progress);

// ---- scoring: a pure pass over (items, plan, record store) ----

struct ScoreInputs {
    TokenOffsetPolicy offset;
    SpecialPhraseLexicon lexicon = SpecialPhraseLexicon::defaults();
    const ClassifierClient* classifier = nullptr;  // when set, handles the text channel
};

// Both channels of one record, resolved to labels and content classes.
struct ExtractedRecord {
    ExtractionResult first_token;
    ExtractionResult text;
    ContentClass first_content;
    ContentClass text_content;
};

ExtractedRecord extract_record(const PlannedRun& run, const ReplayRecord& record,
                               const ScoreInputs& inputs, bool first_token_channel,
                               bool text_channel);

struct TrackStats {
    int items = 0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    RecallVector recalls;
    double rstd = std::numeric_limits<double>::quiet_NaN();
};

struct EntropyCell {
    int items = 0;
    double mean_entropy = std::numeric_limits<double>::quiet_NaN();
};

struct MismatchCell {
    int pairs = 0;
    double rate = std::numeric_limits<double>::quiet_NaN();
};

struct FloatingCell {
    int items = 0;
    double rate = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 8> before{};  // answer distribution over kDistributionBins
    std::array<double, 8> after{};
};

// track name ("first_token" / "text" / "debiased") -> stats
using TrackMap = std::map<std::string, TrackStats>;

struct CampaignScores {
    TrackMap selection_overall;
    std::map<std::string, TrackMap> selection_by_task;
    std::map<std::string, TrackMap> selection_by_subcategory;

    // perturbation type name -> channel -> cell
    std::map<std::string, std::map<std::string, EntropyCell>> entropy_overall;
    std::map<std::string, std::map<std::string, std::map<std::string, EntropyCell>>>
        entropy_by_task;

    MismatchCell mismatch_overall;
    std::map<std::string, MismatchCell> mismatch_by_task;

    // channel -> cell
    std::map<std::string, FloatingCell> floating_overall;
    std::map<std::string, std::map<std::string, FloatingCell>> floating_by_task;

    std::map<std::string, PositionPrior> priors;  // task -> estimated prior

    std::vector<std::string> notes;  // exclusions, skipped tasks, channel problems
};

CampaignScores score_campaign(const std::vector<McqItem>& items, const CampaignPlan& plan,
                              const ReplayStore& store, const ScoreInputs& inputs);

}  // namespace mcqr

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcqr/config.hpp"
#include "mcqr/dataset.hpp"
#include "mcqr/json_io.hpp"
#include "mcqr/report.hpp"
#include "mcqr/seed.hpp"

namespace {

constexpr const char* kVersion = "mcqr 1.0.0";

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string mode = "live";
    int parallel = 1;
};

mcqr::HarnessConfig load_config(const GlobalArgs& args) {
    if (args.config_path.empty()) throw mcqr::Error("--config is required for this command");
    mcqr::HarnessConfig config = mcqr::HarnessConfig::load(args.config_path);
    if (args.seed) config.plan.master_seed = *args.seed;
    return config;
}

std::vector<mcqr::McqItem> load_items(const mcqr::HarnessConfig& config) {
    mcqr::SubjectMap subjects;
    if (config.subjects_table) subjects = mcqr::SubjectMap::load(*config.subjects_table);
    return mcqr::load_dataset(config.dataset_path, config.dataset_format, subjects);
}

mcqr::ScoreInputs score_inputs(const mcqr::HarnessConfig& config,
                               const mcqr::ClassifierClient* classifier) {
    mcqr::ScoreInputs inputs;
    inputs.offset = config.offset;
    inputs.lexicon = config.load_lexicon();
    inputs.classifier = classifier;
    return inputs;
}

// Planned runs in execution order: estimation rotations first (when
// debiasing), then the protocol runs, items in dataset order.
std::vector<mcqr::PlannedRun> all_planned_runs(const std::vector<mcqr::McqItem>& items,
                                               const mcqr::CampaignPlan& plan) {
    std::set<std::size_t> estimation_items;
    if (plan.debias_enabled)
        for (const auto& [task, indices] : mcqr::estimation_subset(items, plan))
            estimation_items.insert(indices.begin(), indices.end());
    std::vector<mcqr::PlannedRun> runs;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (estimation_items.count(i))
            for (mcqr::PlannedRun& run : mcqr::plan_estimation_runs(items[i], plan))
                runs.push_back(std::move(run));
        for (mcqr::PlannedRun& run : mcqr::plan_runs(items[i], plan))
            runs.push_back(std::move(run));
    }
    return runs;
}

std::string sanitize_cell(std::string text) {
    for (char& c : text)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return text;
}

int cmd_perturb(const GlobalArgs& args, const std::string& type_name,
                const std::string& question, const std::vector<std::string>& option_values,
                int variants) {
    const auto type = mcqr::perturbation_from_name(type_name);
    if (!type) throw mcqr::Error("unknown perturbation type: " + type_name);

    std::uint64_t seed = 0;
    mcqr::PerturbationConfig perturb_config;
    if (!args.config_path.empty()) {
        const mcqr::HarnessConfig config = load_config(args);
        seed = config.plan.master_seed;
        perturb_config = config.plan.perturb;
    }
    if (args.seed) seed = *args.seed;

    const bool option_based = *type == mcqr::PerturbationType::OptionSwap ||
                              *type == mcqr::PerturbationType::ExtraOptions;
    if (*type == mcqr::PerturbationType::None)
        throw mcqr::Error("type none has nothing to perturb");
    if (!option_based && question.empty())
        throw mcqr::Error("--question is required for " + type_name);
    if (option_based && option_values.size() != 4)
        throw mcqr::Error("exactly four --option values are required for " + type_name);

    std::vector<mcqr::OptionEntry> options;
    for (std::size_t i = 0; i < option_values.size(); ++i)
        options.push_back(
            mcqr::OptionEntry{static_cast<char>('A' + i), option_values[i],
                              mcqr::OptionKind::Regular});

    for (int p = 0; p < variants; ++p) {
        if (option_based) {
            mcqr::SeedStream stream(seed, "adhoc", *type, 0, p, "options");
            const mcqr::OptionShuffle shuffled =
                *type == mcqr::PerturbationType::OptionSwap
                    ? mcqr::option_swap(options, stream)
                    : mcqr::add_extra_options(options, stream);
            std::cout << "# " << type_name << " s" << p << '\n'
                      << mcqr::render_option_lines(shuffled.options) << '\n';
        } else {
            mcqr::SeedStream stream(seed, "adhoc", *type, p, 0, "question");
            std::string variant;
            if (*type == mcqr::PerturbationType::LetterTypos) {
                variant = mcqr::letter_typos(question, stream,
                                             perturb_config.typo_word_probability);
            } else if (*type == mcqr::PerturbationType::LetterSwap) {
                variant = mcqr::letter_swap(question, stream,
                                            perturb_config.letter_swap_min_word_length);
            } else {
                const mcqr::WordSwapResult result =
                    mcqr::word_swap(question, stream, perturb_config.word_swap_count);
                variant = result.text;
                if (result.degraded)
                    std::cerr << "note: question too short for word_swap, variant " << p
                              << " unchanged\n";
            }
            std::cout << "# " << type_name << " p" << p << '\n' << variant << '\n';
        }
    }
    return 0;
}

int cmd_plan(const GlobalArgs& args) {
    const mcqr::HarnessConfig config = load_config(args);
    const std::vector<mcqr::McqItem> items = load_items(config);
    std::cout << "run_key\tprompt_digest\n";
    for (const mcqr::PlannedRun& run : all_planned_runs(items, config.plan))
        std::cout << run.key.str() << '\t' << mcqr::prompt_digest(run.prompt) << '\n';
    return 0;
}

mcqr::ReportContext make_context(const mcqr::HarnessConfig& config,
                                 const std::vector<mcqr::McqItem>& items, int planned,
                                 int completed, std::vector<std::string> failures) {
    mcqr::ReportContext context;
    context.harness_version = kVersion;
    context.model_tag = config.model.model_tag.empty() ? config.model.endpoint.substr(0, 32)
                                                       : config.model.model_tag;
    context.dataset_items = static_cast<int>(items.size());
    context.planned_runs = planned;
    context.completed_runs = completed;
    context.failures = std::move(failures);
    return context;
}

int cmd_run(const GlobalArgs& args) {
    const mcqr::HarnessConfig config = load_config(args);
    const auto mode = mcqr::campaign_mode_from_name(args.mode);
    if (!mode) throw mcqr::Error("unknown mode: " + args.mode + " (expected live|replay|cache)");
    const std::vector<mcqr::McqItem> items = load_items(config);

    std::optional<mcqr::ReplayStore> cache;
    if (*mode == mcqr::CampaignMode::Replay) {
        cache = mcqr::ReplayStore::load(config.replay_log);
    } else if (*mode == mcqr::CampaignMode::Cache &&
               std::filesystem::exists(config.replay_log)) {
        cache = mcqr::ReplayStore::load(config.replay_log);
    }

    std::unique_ptr<mcqr::ModelAdapter> adapter;
    if (*mode != mcqr::CampaignMode::Replay) adapter = mcqr::make_adapter(config.model);

    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path log_tmp = config.replay_log.string() + ".tmp";
    std::optional<std::ofstream> log_stream;
    if (*mode != mcqr::CampaignMode::Replay) {
        if (config.replay_log.has_parent_path())
            std::filesystem::create_directories(config.replay_log.parent_path());
        log_stream.emplace(log_tmp, std::ios::binary | std::ios::trunc);
        if (!*log_stream) throw mcqr::Error("cannot write replay log " + log_tmp.string());
    }

    const mcqr::CampaignOutcome outcome = mcqr::run_campaign(
        items, config.plan, adapter.get(), *mode, args.parallel,
        cache ? &*cache : nullptr, log_stream ? &*log_stream : nullptr, &std::cerr);

    if (log_stream) {
        log_stream->close();
        if (!*log_stream) throw mcqr::Error("failed writing replay log " + log_tmp.string());
        std::filesystem::rename(log_tmp, config.replay_log);
    }

    mcqr::ClassifierClient classifier(config.classifier, config.load_lexicon());
    const mcqr::ScoreInputs inputs =
        score_inputs(config, classifier.enabled() ? &classifier : nullptr);
    const mcqr::CampaignScores scores =
        mcqr::score_campaign(items, config.plan, outcome.store, inputs);

    write_report_bundle(config.output_dir / "report", config.plan, scores,
                        make_context(config, items, outcome.planned_runs,
                                     static_cast<int>(outcome.store.size()), outcome.failures));

    mcqr::print_summary(std::cout, scores);
    std::cout << "runs: " << outcome.store.size() << "/" << outcome.planned_runs
              << " completed\n";
    if (!outcome.failures.empty()) {
        std::cerr << outcome.failures.size() << " run(s) failed:\n";
        for (const std::string& failure : outcome.failures) std::cerr << "  " << failure << '\n';
    }
    std::cout << "report bundle: " << (config.output_dir / "report").string() << '\n';
    return 0;
}

int cmd_extract(const GlobalArgs& args) {
    const mcqr::HarnessConfig config = load_config(args);
    const std::vector<mcqr::McqItem> items = load_items(config);
    const mcqr::ReplayStore store = mcqr::ReplayStore::load(config.replay_log);
    mcqr::ClassifierClient classifier(config.classifier, config.load_lexicon());
    const mcqr::ScoreInputs inputs =
        score_inputs(config, classifier.enabled() ? &classifier : nullptr);

    std::cout << "run_key\tfirst_token_label\tfirst_token_method\ttext_label\ttext_method"
                 "\tfirst_token_evidence\ttext_evidence\n";
    for (const mcqr::McqItem& item : items) {
        for (const mcqr::PlannedRun& run : mcqr::plan_runs(item, config.plan)) {
            if (!store.contains(run.key)) continue;
            const mcqr::ReplayRecord& record = store.get_verified(run.key, run.prompt);
            const mcqr::ExtractedRecord extracted =
                mcqr::extract_record(run, record, inputs, config.plan.first_token_channel,
                                     config.plan.text_channel);
            std::cout << run.key.str() << '\t' << mcqr::label_name(extracted.first_token.label)
                      << '\t' << mcqr::extraction_method_name(extracted.first_token.method)
                      << '\t' << mcqr::label_name(extracted.text.label) << '\t'
                      << mcqr::extraction_method_name(extracted.text.method) << '\t'
                      << sanitize_cell(extracted.first_token.evidence) << '\t'
                      << sanitize_cell(extracted.text.evidence) << '\n';
        }
    }
    return 0;
}

int score_like(const GlobalArgs& args, bool print_stdout, bool force_debias) {
    mcqr::HarnessConfig config = load_config(args);
    if (force_debias) config.plan.debias_enabled = true;
    const std::vector<mcqr::McqItem> items = load_items(config);
    const mcqr::ReplayStore store = mcqr::ReplayStore::load(config.replay_log);
    mcqr::ClassifierClient classifier(config.classifier, config.load_lexicon());
    const mcqr::ScoreInputs inputs =
        score_inputs(config, classifier.enabled() ? &classifier : nullptr);
    const mcqr::CampaignScores scores =
        mcqr::score_campaign(items, config.plan, store, inputs);

    const std::vector<mcqr::PlannedRun> planned = all_planned_runs(items, config.plan);
    int completed = 0;
    for (const mcqr::PlannedRun& run : planned)
        if (store.contains(run.key)) ++completed;

    write_report_bundle(config.output_dir / "report", config.plan, scores,
                        make_context(config, items, static_cast<int>(planned.size()), completed,
                                     {}));
    if (print_stdout) {
        mcqr::print_summary(std::cout, scores);
        std::cout << "report bundle: " << (config.output_dir / "report").string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalArgs args;
    CLI::App app{"Deterministic robustness harness for multiple-choice model evaluation"};
    app.fallthrough();
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.add_option("-c,--config", args.config_path, "JSON configuration file");
    app.add_option("--seed", args.seed, "override the configured master seed");
    app.add_option("--mode", args.mode, "run mode: live, replay, or cache")
        ->check(CLI::IsMember({"live", "replay", "cache"}));
    app.add_option("--parallel", args.parallel, "worker threads for campaigns")
        ->check(CLI::PositiveNumber);

    std::string perturb_type;
    std::string perturb_question;
    std::vector<std::string> perturb_options;
    int perturb_variants = 4;
    CLI::App* perturb = app.add_subcommand("perturb", "print perturbed variants for inspection");
    perturb->add_option("--type", perturb_type, "perturbation type")->required();
    perturb->add_option("--question", perturb_question, "question text to perturb");
    perturb->add_option("--option", perturb_options,
                        "option content (repeat four times, for option-level types)");
    perturb->add_option("--variants", perturb_variants, "number of variants to print")
        ->check(CLI::PositiveNumber);

    CLI::App* plan = app.add_subcommand("plan", "emit planned run keys without inference");
    CLI::App* run = app.add_subcommand("run", "execute a campaign and score it");
    CLI::App* extract = app.add_subcommand("extract", "re-extract labels from the replay log");
    CLI::App* debias =
        app.add_subcommand("debias", "estimate position priors from the log and rescore");
    CLI::App* score = app.add_subcommand("score", "recompute metrics from the replay log");
    CLI::App* report = app.add_subcommand("report", "emit the report bundle from the replay log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (perturb->parsed())
            return cmd_perturb(args, perturb_type, perturb_question, perturb_options,
                               perturb_variants);
        if (plan->parsed()) return cmd_plan(args);
        if (run->parsed()) return cmd_run(args);
        if (extract->parsed()) return cmd_extract(args);
        if (debias->parsed()) return score_like(args, true, true);
        if (score->parsed()) return score_like(args, true, false);
        if (report->parsed()) return score_like(args, false, false);
        throw mcqr::Error("no subcommand selected");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

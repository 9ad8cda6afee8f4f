#include "mcqr/report.hpp"

#include <fstream>
#include <limits>
#include <ostream>

#include "mcqr/json_io.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

constexpr const char* kOverall = "overall";

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::string recall_or_nan(const RecallVector& rv, int i) {
    if (!rv.defined(i)) return fmt_double(std::numeric_limits<double>::quiet_NaN());
    return fmt_double(rv.recall[static_cast<std::size_t>(i)]);
}

void write_selection_rows(std::ostream& out, const std::string& group, const TrackMap& tracks) {
    for (const auto& [track, stats] : tracks) {
        out << group << '\t' << track << '\t' << stats.items << '\t' << fmt_double(stats.accuracy)
            << '\t' << fmt_double(stats.rstd);
        for (int i = 0; i < 4; ++i) out << '\t' << recall_or_nan(stats.recalls, i);
        for (int i = 0; i < 4; ++i)
            out << '\t' << stats.recalls.support[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

void write_selection_file(const std::filesystem::path& path, const char* group_header,
                          const std::map<std::string, TrackMap>& groups,
                          const TrackMap& overall) {
    std::ofstream out = open_out(path);
    out << group_header
        << "\ttrack\titems\taccuracy\trstd\trecall_a\trecall_b\trecall_c\trecall_d"
           "\tsupport_a\tsupport_b\tsupport_c\tsupport_d\n";
    for (const auto& [group, tracks] : groups) write_selection_rows(out, group, tracks);
    write_selection_rows(out, kOverall, overall);
}

nlohmann::json plan_to_json(const CampaignPlan& plan) {
    nlohmann::json j;
    j["types"] = nlohmann::json::array();
    for (PerturbationType type : plan.types) j["types"].push_back(perturbation_name(type));
    j["runs_per_perturbation"] = plan.runs_per_perturbation;
    j["shuffles_per_run"] = plan.shuffles_per_run;
    j["option_swap_runs"] = plan.option_swap_runs;
    j["first_token_channel"] = plan.first_token_channel;
    j["text_channel"] = plan.text_channel;
    j["debias"] = plan.debias_enabled;
    j["estimation_fraction"] = plan.estimation_fraction;
    j["estimation_min_items"] = plan.estimation_min_items;
    j["num_cycles"] = plan.num_cycles;
    j["entropy_over_raw"] = plan.entropy_over_raw;
    j["master_seed"] = plan.master_seed;
    j["perturb"] = {
        {"typo_word_probability", plan.perturb.typo_word_probability},
        {"word_swap_count", plan.perturb.word_swap_count},
        {"letter_swap_min_word_length", plan.perturb.letter_swap_min_word_length},
    };
    j["prompt"] = {
        {"system_text", plan.prompt.system_text},
        {"question_header", plan.prompt.question_header},
        {"options_header", plan.prompt.options_header},
    };
    return j;
}

}  // namespace

void write_report_bundle(const std::filesystem::path& dir, const CampaignPlan& plan,
                         const CampaignScores& scores, const ReportContext& context) {
    std::filesystem::create_directories(dir);

    {
        nlohmann::json manifest;
        manifest["harness_version"] = context.harness_version;
        manifest["model_tag"] = context.model_tag;
        manifest["dataset_items"] = context.dataset_items;
        manifest["planned_runs"] = context.planned_runs;
        manifest["completed_runs"] = context.completed_runs;
        manifest["failed_runs"] = static_cast<int>(context.failures.size());
        manifest["failures"] = context.failures;
        manifest["notes"] = scores.notes;
        manifest["plan"] = plan_to_json(plan);
        std::ofstream out = open_out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }

    write_selection_file(dir / "selection_bias.tsv", "task", scores.selection_by_task,
                         scores.selection_overall);
    write_selection_file(dir / "subcategory_selection_bias.tsv", "subcategory",
                         scores.selection_by_subcategory, scores.selection_overall);

    {
        std::ofstream out = open_out(dir / "perturbation_entropy.tsv");
        out << "task\tperturbation\tchannel\titems\tmean_entropy\n";
        for (const auto& [task, by_type] : scores.entropy_by_task)
            for (const auto& [type, by_channel] : by_type)
                for (const auto& [channel, cell] : by_channel)
                    out << task << '\t' << type << '\t' << channel << '\t' << cell.items << '\t'
                        << fmt_double(cell.mean_entropy) << '\n';
        for (const auto& [type, by_channel] : scores.entropy_overall)
            for (const auto& [channel, cell] : by_channel)
                out << kOverall << '\t' << type << '\t' << channel << '\t' << cell.items << '\t'
                    << fmt_double(cell.mean_entropy) << '\n';
    }

    {
        std::ofstream out = open_out(dir / "mismatch.tsv");
        out << "task\trecord_pairs\tmismatch_rate\n";
        for (const auto& [task, cell] : scores.mismatch_by_task)
            out << task << '\t' << cell.pairs << '\t' << fmt_double(cell.rate) << '\n';
        out << kOverall << '\t' << scores.mismatch_overall.pairs << '\t'
            << fmt_double(scores.mismatch_overall.rate) << '\n';
    }

    {
        std::ofstream out = open_out(dir / "floating.tsv");
        out << "task\tchannel\titems\tchange_rate\n";
        for (const auto& [task, by_channel] : scores.floating_by_task)
            for (const auto& [channel, cell] : by_channel)
                out << task << '\t' << channel << '\t' << cell.items << '\t'
                    << fmt_double(cell.rate) << '\n';
        for (const auto& [channel, cell] : scores.floating_overall)
            out << kOverall << '\t' << channel << '\t' << cell.items << '\t'
                << fmt_double(cell.rate) << '\n';
    }

    {
        std::ofstream out = open_out(dir / "answer_distribution.tsv");
        out << "channel\tarm\tbin\tfraction\n";
        for (const auto& [channel, cell] : scores.floating_overall) {
            for (std::size_t b = 0; b < kDistributionBins.size(); ++b)
                out << channel << "\toriginal\t" << kDistributionBins[b] << '\t'
                    << fmt_double(cell.before[b]) << '\n';
            for (std::size_t b = 0; b < kDistributionBins.size(); ++b)
                out << channel << "\tinjected\t" << kDistributionBins[b] << '\t'
                    << fmt_double(cell.after[b]) << '\n';
        }
    }

    {
        nlohmann::json priors;
        priors["tasks"] = nlohmann::json::object();
        for (const auto& [task, prior] : scores.priors) {
            nlohmann::json p;
            p["prior"] = prior.prior;
            p["estimation_size"] = prior.estimation_size;
            p["low_confidence"] = prior.low_confidence;
            priors["tasks"][task] = std::move(p);
        }
        std::ofstream out = open_out(dir / "priors.json");
        out << priors.dump(2) << '\n';
    }
}

void print_summary(std::ostream& out, const CampaignScores& scores) {
    if (!scores.selection_overall.empty()) {
        out << "selection bias (overall):\n";
        for (const auto& [track, stats] : scores.selection_overall)
            out << "  " << track << ": items " << stats.items << ", accuracy "
                << fmt_double(stats.accuracy) << ", recall spread " << fmt_double(stats.rstd)
                << '\n';
    }
    if (!scores.entropy_overall.empty()) {
        out << "answer entropy (overall mean, bits):\n";
        for (const auto& [type, by_channel] : scores.entropy_overall)
            for (const auto& [channel, cell] : by_channel)
                out << "  " << type << " / " << channel << ": " << fmt_double(cell.mean_entropy)
                    << " over " << cell.items << " item(s)\n";
    }
    if (scores.mismatch_overall.pairs > 0)
        out << "mismatch rate: " << fmt_double(scores.mismatch_overall.rate) << " over "
            << scores.mismatch_overall.pairs << " record(s)\n";
    for (const auto& [channel, cell] : scores.floating_overall)
        out << "answer change rate under injected options (" << channel
            << "): " << fmt_double(cell.rate) << " over " << cell.items << " item(s)\n";
    for (const auto& [task, prior] : scores.priors) {
        out << "position prior [" << task << "]:";
        for (double p : prior.prior) out << ' ' << fmt_double(p);
        out << " (from " << prior.estimation_size << " item(s))\n";
    }
    if (!scores.notes.empty()) {
        out << "notes:\n";
        for (const std::string& note : scores.notes) out << "  " << note << '\n';
    }
}

}  // namespace mcqr

#include "mcqr/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "mcqr/seed.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

const std::vector<PerturbationType> kKnownTypes = {
    PerturbationType::None,       PerturbationType::LetterTypos, PerturbationType::LetterSwap,
    PerturbationType::WordSwap,   PerturbationType::OptionSwap,  PerturbationType::ExtraOptions,
};

std::vector<int> identity_permutation(std::size_t n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

std::string run_prompt(const McqItem& item, const std::string& question,
                       const std::vector<OptionEntry>& options, const PromptTemplate& tpl) {
    McqItem shown = item;
    shown.question = question;
    shown.options = options;
    return build_prompt(shown, tpl);
}

bool is_textual(PerturbationType type) {
    return type == PerturbationType::LetterTypos || type == PerturbationType::LetterSwap ||
           type == PerturbationType::WordSwap;
}

}  // namespace

void CampaignPlan::validate() const {
    if (types.empty()) throw Error("plan has no perturbation types (use none for a baseline)");
    std::set<PerturbationType> seen;
    for (PerturbationType type : types) {
        if (std::find(kKnownTypes.begin(), kKnownTypes.end(), type) == kKnownTypes.end())
            throw Error("unknown perturbation type in plan");
        if (!seen.insert(type).second)
            throw Error("duplicate perturbation type in plan: " + perturbation_name(type));
    }
    if (runs_per_perturbation < 1) throw Error("runs_per_perturbation must be positive");
    if (shuffles_per_run < 1) throw Error("shuffles_per_run must be positive");
    if (option_swap_runs < 1) throw Error("option_swap_runs must be positive");
    if (!first_token_channel && !text_channel)
        throw Error("at least one extraction channel must be enabled");
    if (debias_enabled) {
        if (estimation_fraction <= 0.0 || estimation_fraction > 1.0)
            throw Error("estimation_fraction must lie in (0, 1]");
        if (estimation_min_items < 1) throw Error("estimation_min_items must be positive");
        if (num_cycles < 1 || num_cycles > 4)
            throw Error("num_cycles must lie in [1, 4]: rotations repeat beyond the option count");
    }
    perturb.validate();
}

bool CampaignPlan::has_type(PerturbationType type) const {
    return std::find(types.begin(), types.end(), type) != types.end();
}

RunView view_of(const McqItem& item, const PlannedRun& run) {
    RunView view;
    view.item_id = item.item_id;
    view.options = run.options;
    view.permutation = run.permutation;
    view.gold_canonical = item.gold;
    return view;
}

std::vector<PlannedRun> plan_runs(const McqItem& item, const CampaignPlan& plan) {
    validate_item(item);
    std::vector<PlannedRun> runs;
    const auto push = [&](PerturbationType type, int p, int s, std::string question,
                          std::vector<OptionEntry> options, std::vector<int> permutation,
                          bool degraded) {
        PlannedRun run;
        run.key = RunKey{item.item_id, type, p, s};
        run.question = std::move(question);
        run.options = std::move(options);
        run.permutation = std::move(permutation);
        run.prompt = run_prompt(item, run.question, run.options, plan.prompt);
        run.degraded = degraded;
        runs.push_back(std::move(run));
    };

    for (PerturbationType type : plan.types) {
        if (type == PerturbationType::None) {
            push(type, 0, 0, item.question, item.options,
                 identity_permutation(item.options.size()), false);
        } else if (is_textual(type)) {
            for (int p = 0; p < plan.runs_per_perturbation; ++p) {
                SeedStream question_stream(plan.master_seed, item.item_id, type, p, 0, "question");
                std::string question;
                bool degraded = false;
                if (type == PerturbationType::LetterTypos) {
                    question = letter_typos(item.question, question_stream,
                                            plan.perturb.typo_word_probability);
                } else if (type == PerturbationType::LetterSwap) {
                    question = letter_swap(item.question, question_stream,
                                           plan.perturb.letter_swap_min_word_length);
                } else {
                    WordSwapResult swapped =
                        word_swap(item.question, question_stream, plan.perturb.word_swap_count);
                    question = std::move(swapped.text);
                    degraded = swapped.degraded;
                }
                for (int s = 0; s < plan.shuffles_per_run; ++s) {
                    SeedStream option_stream(plan.master_seed, item.item_id, type, p, s, "options");
                    OptionShuffle shuffled = option_swap(item.options, option_stream);
                    push(type, p, s, question, std::move(shuffled.options),
                         std::move(shuffled.permutation), degraded);
                }
            }
        } else if (type == PerturbationType::OptionSwap) {
            for (int s = 0; s < plan.option_swap_runs; ++s) {
                SeedStream option_stream(plan.master_seed, item.item_id, type, 0, s, "options");
                OptionShuffle shuffled = option_swap(item.options, option_stream);
                push(type, 0, s, item.question, std::move(shuffled.options),
                     std::move(shuffled.permutation), false);
            }
        } else {  // ExtraOptions: paired original (p=0) / injected (p=1) arms
            for (int arm = 0; arm < 2; ++arm) {
                for (int s = 0; s < plan.shuffles_per_run; ++s) {
                    SeedStream option_stream(plan.master_seed, item.item_id, type, arm, s,
                                             "options");
                    OptionShuffle shuffled = arm == 0 ? option_swap(item.options, option_stream)
                                                      : add_extra_options(item.options,
                                                                          option_stream);
                    push(type, arm, s, item.question, std::move(shuffled.options),
                         std::move(shuffled.permutation), false);
                }
            }
        }
    }
    return runs;
}

std::vector<PlannedRun> plan_estimation_runs(const McqItem& item, const CampaignPlan& plan) {
    validate_item(item);
    std::vector<PlannedRun> runs;
    for (int r = 0; r < plan.num_cycles; ++r) {
        RotatedOptions rotated = rotate_options(item.options, r);
        PlannedRun run;
        run.key = RunKey{item.item_id, PerturbationType::None, 1 + r, 0};
        run.question = item.question;
        run.options = std::move(rotated.options);
        run.permutation = std::move(rotated.permutation);
        run.prompt = run_prompt(item, run.question, run.options, plan.prompt);
        runs.push_back(std::move(run));
    }
    return runs;
}

std::map<std::string, std::vector<std::size_t>> estimation_subset(
    const std::vector<McqItem>& items, const CampaignPlan& plan) {
    std::map<std::string, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < items.size(); ++i) by_task[items[i].task].push_back(i);
    for (auto& [task, indices] : by_task) {
        const std::size_t n = indices.size();
        std::size_t want = static_cast<std::size_t>(
            std::ceil(plan.estimation_fraction * static_cast<double>(n) - 1e-9));
        want = std::max(want, static_cast<std::size_t>(plan.estimation_min_items));
        want = std::min(want, n);
        indices.resize(want);
    }
    return by_task;
}

std::string campaign_mode_name(CampaignMode mode) {
    switch (mode) {
        case CampaignMode::Live: return "live";
        case CampaignMode::Replay: return "replay";
        case CampaignMode::Cache: return "cache";
    }
    throw Error("unknown campaign mode");
}

std::optional<CampaignMode> campaign_mode_from_name(std::string_view name) {
    if (name == "live") return CampaignMode::Live;
    if (name == "replay") return CampaignMode::Replay;
    if (name == "cache") return CampaignMode::Cache;
    return std::nullopt;
}

namespace {

struct Slot {
    const McqItem* item = nullptr;
    PlannedRun run;
    bool ok = false;
    ReplayRecord record;
    std::string error;
};

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void execute_slot(Slot& slot, ModelAdapter* adapter, CampaignMode mode, const ReplayStore* cache,
                  bool need_logprobs) {
    try {
        const RunKey& key = slot.run.key;
        if (mode == CampaignMode::Replay) {
            if (!cache) throw Error("replay mode needs a replay log");
            slot.record = cache->get_verified(key, slot.run.prompt);
            slot.ok = true;
        } else if (mode == CampaignMode::Cache && cache != nullptr && cache->contains(key)) {
            slot.record = cache->get_verified(key, slot.run.prompt);
            slot.ok = true;
        } else {
            if (adapter == nullptr) throw Error("live execution needs a model adapter");
            InferenceRequest request{slot.run.prompt, view_of(*slot.item, slot.run)};
            ModelResponse response = adapter->infer(request);
            validate_response(response);
            slot.record.key = key;
            slot.record.prompt_digest = prompt_digest(slot.run.prompt);
            slot.record.response = std::move(response);
            slot.record.timestamp_ms = adapter->deterministic() ? 0 : now_ms();
            slot.ok = true;
        }
        if (slot.ok && need_logprobs && slot.record.response.token_logprobs.empty()) {
            slot.ok = false;
            slot.error =
                "response carries no token log-probabilities but the first-token channel is "
                "enabled";
            slot.record = ReplayRecord{};
        }
    } catch (const std::exception& e) {
        slot.ok = false;
        slot.error = e.what();
    }
}

}  // namespace

CampaignOutcome run_campaign(const std::vector<McqItem>& items, const CampaignPlan& plan,
                             ModelAdapter* adapter, CampaignMode mode, int workers,
                             const ReplayStore* cache, std::ostream* log_out,
                             std::ostream* progress) {
    plan.validate();
    if (workers < 1) throw Error("worker count must be at least 1");

    std::set<std::size_t> estimation_items;
    if (plan.debias_enabled)
        for (const auto& [task, indices] : estimation_subset(items, plan))
            estimation_items.insert(indices.begin(), indices.end());

    std::vector<Slot> slots;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const McqItem& item = items[i];
        if (estimation_items.count(i))
            for (PlannedRun& run : plan_estimation_runs(item, plan))
                slots.push_back(Slot{&item, std::move(run)});
        for (PlannedRun& run : plan_runs(item, plan))
            slots.push_back(Slot{&item, std::move(run)});
    }

    CampaignOutcome outcome;
    outcome.planned_runs = static_cast<int>(slots.size());
    const bool need_logprobs = plan.first_token_channel;

    std::size_t flushed = 0;
    const auto flush = [&](Slot& slot) {
        if (slot.ok) {
            if (log_out != nullptr) (*log_out) << record_to_line(slot.record) << '\n';
            outcome.store.put(std::move(slot.record));
        } else {
            outcome.failures.push_back(slot.run.key.str() + ": " + slot.error);
        }
        ++flushed;
        if (progress != nullptr && (flushed % 200 == 0 || flushed == slots.size()))
            (*progress) << "progress: " << flushed << "/" << slots.size() << " runs\n";
    };

    if (workers == 1 || slots.size() <= 1) {
        for (Slot& slot : slots) {
            execute_slot(slot, adapter, mode, cache, need_logprobs);
            flush(slot);
        }
        return outcome;
    }

    // Workers fill slots in whatever order; the flusher advances through
    // them strictly in plan order, so store and log bytes never depend on
    // the worker count.
    std::atomic<std::size_t> next{0};
    std::vector<unsigned char> done(slots.size(), 0);
    std::mutex mutex;
    std::condition_variable ready;
    const auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= slots.size()) return;
            execute_slot(slots[i], adapter, mode, cache, need_logprobs);
            {
                std::lock_guard<std::mutex> lock(mutex);
                done[i] = 1;
            }
            ready.notify_all();
        }
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(workers, static_cast<int>(slots.size()));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(work);
    for (std::size_t frontier = 0; frontier < slots.size(); ++frontier) {
        {
            std::unique_lock<std::mutex> lock(mutex);
            ready.wait(lock, [&] { return done[frontier] != 0; });
        }
        flush(slots[frontier]);
    }
    for (std::thread& thread : pool) thread.join();
    return outcome;
}

ExtractedRecord extract_record(const PlannedRun& run, const ReplayRecord& record,
                               const ScoreInputs& inputs, bool first_token_channel,
                               bool text_channel) {
    ExtractedRecord out;
    const int option_count = static_cast<int>(run.options.size());
    if (first_token_channel) {
        try {
            out.first_token = first_token_answer(record.response, option_count, inputs.offset);
        } catch (const Error& e) {
            out.first_token = ExtractionResult{AnswerLabel::NaN, ExtractionMethod::Failed,
                                               std::string("first-token error: ") + e.what()};
        }
        out.first_content = content_of(out.first_token.label, run.options);
    }
    if (text_channel) {
        if (inputs.classifier != nullptr && inputs.classifier->enabled()) {
            try {
                out.text = inputs.classifier->classify(record.response.text, run.options);
            } catch (const Error& e) {
                out.text = ExtractionResult{AnswerLabel::NaN, ExtractionMethod::Failed,
                                            std::string("classifier error: ") + e.what()};
            }
        } else {
            out.text = extract_text_answer(record.response.text, run.options, inputs.lexicon);
        }
        out.text_content = content_of(out.text.label, run.options);
    }
    return out;
}

namespace {

constexpr const char* kFirstTokenTrack = "first_token";
constexpr const char* kTextTrack = "text";
constexpr const char* kDebiasedTrack = "debiased";

double safe_rstd(const RecallVector& rv) {
    try {
        return recall_stddev(rv);
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

TrackStats finish_track(const std::vector<Outcome>& outcomes) {
    TrackStats stats;
    stats.items = static_cast<int>(outcomes.size());
    if (outcomes.empty()) return stats;
    stats.accuracy = accuracy(outcomes);
    stats.recalls = recalls(outcomes);
    stats.rstd = safe_rstd(stats.recalls);
    return stats;
}

struct SelectionAccum {
    std::map<std::string, std::vector<Outcome>> by_track;
};

TrackMap finish_selection(const SelectionAccum& accum) {
    TrackMap tracks;
    for (const auto& [track, outcomes] : accum.by_track) tracks[track] = finish_track(outcomes);
    return tracks;
}

EntropyCell finish_entropy(const std::vector<double>& values) {
    EntropyCell cell;
    cell.items = static_cast<int>(values.size());
    if (!values.empty())
        cell.mean_entropy =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return cell;
}

MismatchCell finish_mismatch(const std::vector<std::pair<ContentClass, ContentClass>>& pairs) {
    MismatchCell cell;
    cell.pairs = static_cast<int>(pairs.size());
    if (!pairs.empty()) cell.rate = mismatch_rate(pairs);
    return cell;
}

struct FloatingAccum {
    std::map<std::string, ContentClass> before;
    std::map<std::string, ContentClass> after;
    std::vector<int> before_bins;
    std::vector<int> after_bins;
};

FloatingCell finish_floating(const FloatingAccum& accum) {
    FloatingCell cell;
    cell.items = static_cast<int>(accum.before.size());
    if (cell.items > 0) {
        cell.rate = answer_change_rate(accum.before, accum.after);
        cell.before = answer_distribution(accum.before_bins);
        cell.after = answer_distribution(accum.after_bins);
    }
    return cell;
}

int argmax_position(const std::vector<double>& values) {
    return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

CampaignScores score_campaign(const std::vector<McqItem>& items, const CampaignPlan& plan,
                              const ReplayStore& store, const ScoreInputs& inputs) {
    plan.validate();
    CampaignScores scores;

    if (plan.debias_enabled && plan.first_token_channel) {
        const auto subsets = estimation_subset(items, plan);
        for (const auto& [task, indices] : subsets) {
            std::vector<McqItem> estimation_items;
            estimation_items.reserve(indices.size());
            for (std::size_t i : indices) estimation_items.push_back(items[i]);
            const RotationProbSource source = [&](const McqItem& item,
                                                  int rotation) -> std::vector<double> {
                const RunKey key{item.item_id, PerturbationType::None, 1 + rotation, 0};
                if (!store.contains(key))
                    throw Error("missing rotation data for item " + item.item_id + " rotation " +
                                std::to_string(rotation));
                const std::vector<PlannedRun> rotations = plan_estimation_runs(item, plan);
                const ReplayRecord& record =
                    store.get_verified(key, rotations[static_cast<std::size_t>(rotation)].prompt);
                const int option_count = static_cast<int>(item.options.size());
                const int offset = inputs.offset.resolve(record.response, option_count);
                return option_letter_probs(record.response, offset, option_count);
            };
            try {
                scores.priors.emplace(task,
                                      estimate_prior(estimation_items, source, plan.num_cycles,
                                                     task));
            } catch (const Error& e) {
                scores.notes.push_back("debiasing skipped for task " + task + ": " + e.what());
            }
        }
    }

    SelectionAccum selection_overall;
    std::map<std::string, SelectionAccum> selection_by_task;
    std::map<std::string, SelectionAccum> selection_by_subcategory;

    std::map<std::string, std::map<std::string, std::vector<double>>> entropy_overall;
    std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>>
        entropy_by_task;

    std::vector<std::pair<ContentClass, ContentClass>> mismatch_overall;
    std::map<std::string, std::vector<std::pair<ContentClass, ContentClass>>> mismatch_by_task;

    std::map<std::string, FloatingAccum> floating_overall;
    std::map<std::string, std::map<std::string, FloatingAccum>> floating_by_task;

    std::vector<std::string> channels;
    if (plan.first_token_channel) channels.push_back(kFirstTokenTrack);
    if (plan.text_channel) channels.push_back(kTextTrack);

    for (const McqItem& item : items) {
        const std::vector<PlannedRun> runs = plan_runs(item, plan);
        // one extraction per found record; missing keys noted per type below
        std::map<RunKey, ExtractedRecord> extracted;
        for (const PlannedRun& run : runs) {
            if (!store.contains(run.key)) continue;
            const ReplayRecord& record = store.get_verified(run.key, run.prompt);
            extracted.emplace(run.key,
                              extract_record(run, record, inputs, plan.first_token_channel,
                                             plan.text_channel));
        }

        const auto content_for = [&](const RunKey& key, const std::string& channel) {
            const ExtractedRecord& ex = extracted.at(key);
            return channel == kFirstTokenTrack ? ex.first_content : ex.text_content;
        };
        const auto complete = [&](PerturbationType type) {
            int missing = 0;
            for (const PlannedRun& run : runs)
                if (run.key.type == type && !extracted.count(run.key)) ++missing;
            if (missing > 0)
                scores.notes.push_back("item " + item.item_id + " excluded from " +
                                       perturbation_name(type) + " scoring: " +
                                       std::to_string(missing) + " missing run(s)");
            return missing == 0;
        };

        // mismatch over every completed protocol record
        if (plan.first_token_channel && plan.text_channel) {
            for (const auto& [key, ex] : extracted) {
                mismatch_overall.emplace_back(ex.first_content, ex.text_content);
                mismatch_by_task[item.task].emplace_back(ex.first_content, ex.text_content);
            }
        }

        const std::vector<ContentClass> tie_order = tie_order_for(item);

        for (PerturbationType type : plan.types) {
            if (type == PerturbationType::None) {
                if (!complete(type)) continue;
                const RunKey baseline{item.item_id, PerturbationType::None, 0, 0};
                const ExtractedRecord& ex = extracted.at(baseline);
                const ContentClass gold =
                    ContentClass::option(item.options[static_cast<std::size_t>(item.gold)].content);
                const int gold_slot = item.gold;  // identity order at baseline
                const auto push_track = [&](const std::string& track, const ContentClass& answer) {
                    const Outcome outcome{answer, gold, gold_slot};
                    selection_overall.by_track[track].push_back(outcome);
                    selection_by_task[item.task].by_track[track].push_back(outcome);
                    selection_by_subcategory[item.subcategory].by_track[track].push_back(outcome);
                };
                if (plan.first_token_channel) push_track(kFirstTokenTrack, ex.first_content);
                if (plan.text_channel) push_track(kTextTrack, ex.text_content);
                if (plan.debias_enabled && plan.first_token_channel &&
                    scores.priors.count(item.task)) {
                    ContentClass answer;  // NaN unless debiasing succeeds
                    try {
                        const ReplayRecord& record = store.get(baseline);
                        const int option_count = static_cast<int>(item.options.size());
                        const int offset = inputs.offset.resolve(record.response, option_count);
                        const std::vector<double> observed =
                            option_letter_probs(record.response, offset, option_count);
                        const std::vector<double> adjusted =
                            debias(observed, scores.priors.at(item.task));
                        const int position = argmax_position(adjusted);
                        answer = ContentClass::option(
                            item.options[static_cast<std::size_t>(position)].content);
                    } catch (const Error&) {
                        answer = ContentClass();
                    }
                    push_track(kDebiasedTrack, answer);
                }
            } else if (is_textual(type)) {
                if (!complete(type)) continue;
                for (const std::string& channel : channels) {
                    std::vector<ContentClass> answers;
                    if (plan.entropy_over_raw) {
                        for (int p = 0; p < plan.runs_per_perturbation; ++p)
                            for (int s = 0; s < plan.shuffles_per_run; ++s)
                                answers.push_back(
                                    content_for(RunKey{item.item_id, type, p, s}, channel));
                    } else {
                        for (int p = 0; p < plan.runs_per_perturbation; ++p) {
                            std::vector<ContentClass> shuffle_answers;
                            for (int s = 0; s < plan.shuffles_per_run; ++s)
                                shuffle_answers.push_back(
                                    content_for(RunKey{item.item_id, type, p, s}, channel));
                            answers.push_back(majority_vote(shuffle_answers, tie_order));
                        }
                    }
                    const double entropy = entropy_bits(answers);
                    entropy_overall[perturbation_name(type)][channel].push_back(entropy);
                    entropy_by_task[item.task][perturbation_name(type)][channel].push_back(
                        entropy);
                }
            } else if (type == PerturbationType::OptionSwap) {
                if (!complete(type)) continue;
                for (const std::string& channel : channels) {
                    std::vector<ContentClass> answers;
                    for (int s = 0; s < plan.option_swap_runs; ++s)
                        answers.push_back(content_for(RunKey{item.item_id, type, 0, s}, channel));
                    const double entropy = entropy_bits(answers);
                    entropy_overall[perturbation_name(type)][channel].push_back(entropy);
                    entropy_by_task[item.task][perturbation_name(type)][channel].push_back(
                        entropy);
                }
            } else {  // ExtraOptions
                if (!complete(type)) continue;
                for (const std::string& channel : channels) {
                    std::vector<ContentClass> original;
                    std::vector<ContentClass> injected;
                    for (int s = 0; s < plan.shuffles_per_run; ++s) {
                        original.push_back(content_for(RunKey{item.item_id, type, 0, s}, channel));
                        injected.push_back(content_for(RunKey{item.item_id, type, 1, s}, channel));
                    }
                    // entropy of the injected arm: sensitivity to the new options
                    const double entropy = entropy_bits(injected);
                    entropy_overall[perturbation_name(type)][channel].push_back(entropy);
                    entropy_by_task[item.task][perturbation_name(type)][channel].push_back(
                        entropy);

                    const ContentClass voted_before = majority_vote(original, tie_order);
                    const ContentClass voted_after = majority_vote(injected, tie_order);
                    const auto fill = [&](FloatingAccum& accum) {
                        accum.before.emplace(item.item_id, voted_before);
                        accum.after.emplace(item.item_id, voted_after);
                        accum.before_bins.push_back(distribution_bin(item, voted_before));
                        accum.after_bins.push_back(distribution_bin(item, voted_after));
                    };
                    fill(floating_overall[channel]);
                    fill(floating_by_task[item.task][channel]);
                }
            }
        }
    }

    scores.selection_overall = finish_selection(selection_overall);
    for (const auto& [task, accum] : selection_by_task)
        scores.selection_by_task[task] = finish_selection(accum);
    for (const auto& [subcategory, accum] : selection_by_subcategory)
        scores.selection_by_subcategory[subcategory] = finish_selection(accum);

    for (const auto& [type, by_channel] : entropy_overall)
        for (const auto& [channel, values] : by_channel)
            scores.entropy_overall[type][channel] = finish_entropy(values);
    for (const auto& [task, by_type] : entropy_by_task)
        for (const auto& [type, by_channel] : by_type)
            for (const auto& [channel, values] : by_channel)
                scores.entropy_by_task[task][type][channel] = finish_entropy(values);

    scores.mismatch_overall = finish_mismatch(mismatch_overall);
    for (const auto& [task, pairs] : mismatch_by_task)
        scores.mismatch_by_task[task] = finish_mismatch(pairs);

    for (const auto& [channel, accum] : floating_overall)
        scores.floating_overall[channel] = finish_floating(accum);
    for (const auto& [task, by_channel] : floating_by_task)
        for (const auto& [channel, accum] : by_channel)
            scores.floating_by_task[task][channel] = finish_floating(accum);

    return scores;
}

}  // namespace mcqr

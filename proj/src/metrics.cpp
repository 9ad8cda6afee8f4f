#include "mcqr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace mcqr {

int RecallVector::defined_count() const {
    int n = 0;
    for (int s : support)
        if (s > 0) ++n;
    return n;
}

void RecallAccumulator::add(int gold_slot, bool ok) {
    if (gold_slot < 0 || gold_slot > 3) throw Error("gold slot out of range for recall bookkeeping");
    ++total[static_cast<std::size_t>(gold_slot)];
    if (ok) ++correct[static_cast<std::size_t>(gold_slot)];
}

RecallVector RecallAccumulator::finish() const {
    RecallVector rv;
    for (std::size_t i = 0; i < 4; ++i) {
        rv.support[i] = total[i];
        rv.recall[i] = total[i] > 0 ? static_cast<double>(correct[i]) / total[i] : 0.0;
    }
    return rv;
}

double recall_stddev(const RecallVector& rv) {
    const int n = rv.defined_count();
    if (n < 2) throw Error("recall_stddev needs at least two defined recalls");
    if (n < 4)
        std::cerr << "warning: recall_stddev over " << n
                  << " of 4 option IDs (zero-support entries excluded)\n";
    double mean = 0.0;
    for (int i = 0; i < 4; ++i)
        if (rv.defined(i)) mean += rv.recall[static_cast<std::size_t>(i)];
    mean /= n;
    double sumsq = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (!rv.defined(i)) continue;
        const double d = rv.recall[static_cast<std::size_t>(i)] - mean;
        sumsq += d * d;
    }
    return std::sqrt(sumsq / n);
}

double entropy_bits(const std::vector<ContentClass>& answers) {
    if (answers.empty()) throw Error("entropy over an empty answer multiset");
    std::map<ContentClass, int> counts;
    for (const ContentClass& a : answers) ++counts[a];
    const double n = static_cast<double>(answers.size());
    double h = 0.0;
    for (const auto& [cls, count] : counts) {
        const double p = count / n;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;  // clamp the -0.0 a single class produces
}

double accuracy(const std::vector<Outcome>& outcomes) {
    if (outcomes.empty()) throw Error("accuracy over zero records");
    std::size_t ok = 0;
    for (const Outcome& o : outcomes)
        if (o.answer.is_option() && o.answer == o.gold) ++ok;
    return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

RecallVector recalls(const std::vector<Outcome>& outcomes) {
    RecallAccumulator acc;
    for (const Outcome& o : outcomes)
        acc.add(o.gold_slot, o.answer.is_option() && o.answer == o.gold);
    return acc.finish();
}

double mismatch_rate(const std::vector<std::pair<ContentClass, ContentClass>>& channel_pairs) {
    if (channel_pairs.empty()) throw Error("mismatch rate over zero records");
    std::size_t diff = 0;
    for (const auto& [a, b] : channel_pairs)
        if (a != b) ++diff;
    return static_cast<double>(diff) / static_cast<double>(channel_pairs.size());
}

ContentClass majority_vote(const std::vector<ContentClass>& answers,
                           const std::vector<ContentClass>& tie_order) {
    if (answers.empty()) throw Error("majority vote over zero answers");
    std::map<ContentClass, int> counts;
    for (const ContentClass& a : answers) ++counts[a];
    int best = 0;
    for (const auto& [cls, count] : counts) best = std::max(best, count);

    auto rank = [&tie_order](const ContentClass& cls) {
        for (std::size_t i = 0; i < tie_order.size(); ++i)
            if (tie_order[i] == cls) return i;
        return tie_order.size();  // unknown classes lose all ties
    };
    const ContentClass* winner = nullptr;
    std::size_t winner_rank = 0;
    for (const auto& [cls, count] : counts) {
        if (count != best) continue;
        const std::size_t r = rank(cls);
        if (!winner || r < winner_rank) {
            winner = &cls;
            winner_rank = r;
        }
    }
    return *winner;
}

std::vector<ContentClass> tie_order_for(const McqItem& item) {
    std::vector<ContentClass> order;
    for (const OptionEntry& opt : item.options)
        if (opt.kind == OptionKind::Regular) order.push_back(ContentClass::option(opt.content));
    order.push_back(ContentClass::special(AnswerLabel::X));
    order.push_back(ContentClass::special(AnswerLabel::Y));
    order.push_back(ContentClass::special(AnswerLabel::Z));
    order.push_back(ContentClass::special(AnswerLabel::NaN));
    return order;
}

double answer_change_rate(const std::map<std::string, ContentClass>& before,
                          const std::map<std::string, ContentClass>& after) {
    if (before.empty()) throw Error("answer change rate over zero items");
    if (before.size() != after.size()) throw Error("misaligned item sets for answer change rate");
    std::size_t changed = 0;
    for (const auto& [id, ans] : before) {
        auto it = after.find(id);
        if (it == after.end()) throw Error("misaligned item sets for answer change rate: " + id);
        if (!(it->second == ans)) ++changed;
    }
    return static_cast<double>(changed) / static_cast<double>(before.size());
}

int distribution_bin(const McqItem& canonical_item, const ContentClass& answer) {
    if (answer.is_option()) {
        for (std::size_t i = 0; i < canonical_item.options.size() && i < 4; ++i)
            if (canonical_item.options[i].content == answer.option_content())
                return static_cast<int>(i);
        throw Error("answer content not among the item's canonical options: " + answer.display());
    }
    switch (answer.special_class()) {
        case AnswerLabel::X: return 4;
        case AnswerLabel::Y: return 5;
        case AnswerLabel::Z: return 6;
        default: return 7;
    }
}

std::array<double, 8> answer_distribution(const std::vector<int>& bins) {
    if (bins.empty()) throw Error("answer distribution over zero answers");
    std::array<double, 8> freq{};
    for (int b : bins) {
        if (b < 0 || b > 7) throw Error("distribution bin out of range");
        freq[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& f : freq) f /= static_cast<double>(bins.size());
    return freq;
}

}  // namespace mcqr

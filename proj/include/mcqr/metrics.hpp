#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

// Per-option-ID recall over 4-option items: recall[i] is the fraction of
// items whose gold content sat at option ID i (after permutation bookkeeping)
// that were answered correctly; support[i] is that denominator.
struct RecallVector {
    std::array<double, 4> recall{};
    std::array<int, 4> support{};

    bool defined(int i) const { return support[static_cast<std::size_t>(i)] > 0; }
    int defined_count() const;
};

struct RecallAccumulator {
    std::array<int, 4> correct{};
    std::array<int, 4> total{};

    void add(int gold_slot, bool ok);
    RecallVector finish() const;
};

// Population standard deviation of the defined recalls: the spread of
// per-position recall around its mean, 0 for a position-indifferent model.
// Needs at least two defined entries; warns on stderr when some are missing.
double recall_stddev(const RecallVector& rv);

// Shannon entropy (base 2) of the empirical answer distribution.
double entropy_bits(const std::vector<ContentClass>& answers);

// One scored run reduced to what the answer-level metrics need.
struct Outcome {
    ContentClass answer;
    ContentClass gold;
    int gold_slot = 0;  // option ID index holding the gold content in that run
};

double accuracy(const std::vector<Outcome>& outcomes);       // specials and NaN count as wrong
RecallVector recalls(const std::vector<Outcome>& outcomes);

// Fraction of runs whose two extraction channels disagree, compared by
// content class so option re-lettering does not register as disagreement.
double mismatch_rate(const std::vector<std::pair<ContentClass, ContentClass>>& channel_pairs);

// Most frequent answer; ties broken by earliest entry in tie_order
// (canonical option contents first, then X, Y, Z, NaN).
ContentClass majority_vote(const std::vector<ContentClass>& answers,
                           const std::vector<ContentClass>& tie_order);

// Canonical tie order for an item: its contents in canonical order, then the
// special classes.
std::vector<ContentClass> tie_order_for(const McqItem& item);

// Fraction of items whose voted answer changed between two aligned campaigns
// (same item_id key sets, error otherwise).
double answer_change_rate(const std::map<std::string, ContentClass>& before,
                          const std::map<std::string, ContentClass>& after);

// Histogram bins for answer distributions: the four regular contents mapped
// back to their canonical slots, then X, Y, Z, NaN.
inline constexpr std::array<const char*, 8> kDistributionBins = {"A", "B", "C", "D",
                                                                 "X", "Y", "Z", "NaN"};

// Bin index of an answer under the item's canonical (default) option order.
int distribution_bin(const McqItem& canonical_item, const ContentClass& answer);

// Normalized histogram over kDistributionBins.
std::array<double, 8> answer_distribution(const std::vector<int>& bins);

}  // namespace mcqr

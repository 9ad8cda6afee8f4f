#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

struct PositionPrior {
    std::string task;
    std::vector<double> prior;  // one entry per option position, positive, sums to 1
    int estimation_size = 0;
    bool low_confidence = false;  // fewer than 2 rotation cycles
};

// Observed option-ID probability vector for an item with its option contents
// cyclically rotated r positions (IDs stay in place).
using RotationProbSource = std::function<std::vector<double>(const McqItem&, int rotation)>;

// Option list with contents rotated forward by r; canonical content j lands
// at position (j + n - r) % n. Returns the permuted entries plus the
// canonical-index -> position map.
struct RotatedOptions {
    std::vector<OptionEntry> options;
    std::vector<int> permutation;
};
RotatedOptions rotate_options(const std::vector<OptionEntry>& options, int rotation);

// Position prior over option IDs: for each position, the softmax (over
// positions) of the mean observed log-probability across items and
// num_cycles content rotations. With full cyclic rotation every content
// visits every position, so content preference cancels and only the
// position term survives.
PositionPrior estimate_prior(const std::vector<McqItem>& items, const RotationProbSource& source,
                             int num_cycles, std::string task = {});

// Divides the observed option-ID probabilities by the prior and
// renormalizes. Mass outside the option letters is discarded by virtue of
// renormalization. Throws on size mismatch, non-positive prior entries, or
// an observed vector with no mass at all.
std::vector<double> debias(const std::vector<double>& observed, const PositionPrior& prior);

}  // namespace mcqr

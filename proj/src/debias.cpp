#include "mcqr/debias.hpp"

#include <algorithm>
#include <cmath>

namespace mcqr {

namespace {
constexpr double kProbFloor = 1e-12;  // keeps log() finite and the prior positive
}

RotatedOptions rotate_options(const std::vector<OptionEntry>& options, int rotation) {
    const int n = static_cast<int>(options.size());
    if (n == 0) throw Error("rotate_options on an empty option list");
    RotatedOptions out;
    out.options.resize(options.size());
    out.permutation.resize(options.size());
    for (int c = 0; c < n; ++c) {
        const int pos = ((c - rotation) % n + n) % n;
        out.options[static_cast<std::size_t>(pos)] =
            OptionEntry{static_cast<char>('A' + pos), options[static_cast<std::size_t>(c)].content,
                        options[static_cast<std::size_t>(c)].kind};
        out.permutation[static_cast<std::size_t>(c)] = pos;
    }
    return out;
}

PositionPrior estimate_prior(const std::vector<McqItem>& items, const RotationProbSource& source,
                             int num_cycles, std::string task) {
    if (items.empty()) throw Error("prior estimation needs at least one item");
    if (num_cycles < 1) throw Error("prior estimation needs at least one rotation cycle");
    const std::size_t n = items.front().options.size();

    std::vector<double> log_sum(n, 0.0);
    std::size_t observations = 0;
    for (const McqItem& item : items) {
        if (item.options.size() != n)
            throw Error("mixed option counts in prior estimation set (item " + item.item_id + ")");
        for (int r = 0; r < num_cycles; ++r) {
            const std::vector<double> probs = source(item, r);
            if (probs.size() != n)
                throw Error("missing rotation data for item " + item.item_id + " rotation " +
                            std::to_string(r));
            for (std::size_t i = 0; i < n; ++i)
                log_sum[i] += std::log(std::max(probs[i], kProbFloor));
            ++observations;
        }
    }

    std::vector<double> mean(n);
    for (std::size_t i = 0; i < n; ++i) mean[i] = log_sum[i] / static_cast<double>(observations);
    const double peak = *std::max_element(mean.begin(), mean.end());
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(mean[i] - peak);

    PositionPrior prior;
    prior.task = std::move(task);
    prior.prior.resize(n);
    for (std::size_t i = 0; i < n; ++i) prior.prior[i] = std::exp(mean[i] - peak) / z;
    prior.estimation_size = static_cast<int>(items.size());
    prior.low_confidence = num_cycles < 2;
    return prior;
}

std::vector<double> debias(const std::vector<double>& observed, const PositionPrior& prior) {
    if (observed.size() != prior.prior.size())
        throw Error("observed vector and prior have different lengths");
    double total = 0.0;
    std::vector<double> out(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (prior.prior[i] <= 0.0) throw Error("zero prior component at position " + std::to_string(i));
        if (observed[i] < 0.0) throw Error("negative observed probability");
        out[i] = observed[i] / prior.prior[i];
        total += out[i];
    }
    if (total <= 0.0) throw Error("observed vector has no mass on option positions");
    for (double& v : out) v /= total;
    return out;
}

}  // namespace mcqr

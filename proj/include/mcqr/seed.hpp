#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

// Deterministic random stream derived from a structured key. Every random
// choice the harness makes flows through one of these, so results never
// depend on execution order, thread count, or platform library details.
// Generator is splitmix64 over a hash of the key string.
class SeedStream {
  public:
    SeedStream(std::uint64_t master_seed, std::string_view item_id, PerturbationType type,
               int perturbation_index, int shuffle_index, std::string_view domain = {});
    // Free-form key for consumers outside the run-key scheme (e.g. simulators).
    SeedStream(std::uint64_t master_seed, std::initializer_list<std::string_view> key_parts);

    std::uint64_t next_u64();
    std::uint32_t below(std::uint32_t bound);  // uniform in [0, bound), unbiased
    double unit();                             // uniform in [0, 1), 53-bit
    bool chance(double p);
    double gaussian(double sigma = 1.0);

    // Uniform permutation of 0..n-1 (Fisher-Yates).
    std::vector<int> permutation(int n);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = below(static_cast<std::uint32_t>(i));
            std::swap(values[i - 1], values[j]);
        }
    }

  private:
    explicit SeedStream(std::uint64_t state) : state_(state) {}
    std::uint64_t state_;
};

}  // namespace mcqr

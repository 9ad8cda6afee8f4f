#include "mcqr/seed.hpp"

#include <cmath>
#include <numbers>

#include "mcqr/util.hpp"

namespace mcqr {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t key_state(std::uint64_t master_seed, std::initializer_list<std::string_view> parts) {
    std::uint64_t h = fnv1a64("mcqr/v1");
    h = fnv1a64(std::to_string(master_seed), h);
    for (std::string_view part : parts) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(part, h);
    }
    return mix64(h);
}

}  // namespace

SeedStream::SeedStream(std::uint64_t master_seed, std::string_view item_id, PerturbationType type,
                       int perturbation_index, int shuffle_index, std::string_view domain)
    : SeedStream(key_state(master_seed,
                           {item_id, perturbation_name(type),
                            std::to_string(perturbation_index), std::to_string(shuffle_index),
                            domain})) {}

SeedStream::SeedStream(std::uint64_t master_seed, std::initializer_list<std::string_view> key_parts)
    : SeedStream(key_state(master_seed, key_parts)) {}

std::uint64_t SeedStream::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint32_t SeedStream::below(std::uint32_t bound) {
    if (bound == 0) throw Error("below(0)");
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t limit = (UINT64_MAX / bound) * bound;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return static_cast<std::uint32_t>(r % bound);
}

double SeedStream::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool SeedStream::chance(double p) {
    return unit() < p;
}

double SeedStream::gaussian(double sigma) {
    // Box-Muller; draws two uniforms, uses one
    double u1 = unit();
    double u2 = unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> SeedStream::permutation(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    shuffle(perm);
    return perm;
}

}  // namespace mcqr

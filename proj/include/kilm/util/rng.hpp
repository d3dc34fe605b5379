#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kilm {

// mt19937_64 is fully specified by the standard; the draws below are written
// out by hand so sequences are identical across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

// Poisson(lambda) by sequential multiplication of uniforms (Knuth).
// Requires 0 < lambda <= 500.
int poisson(Rng& rng, double lambda);

// Per-sample seed derived from the run seed and the sample coordinates, so a
// sample's draws do not depend on which worker produced it.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view doc_id, std::uint64_t slice_index,
                          std::uint64_t epoch, std::uint64_t stream = 0);

}  // namespace kilm

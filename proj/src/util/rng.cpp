#include "kilm/util/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kilm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: empty range");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int poisson(Rng& rng, double lambda) {
  if (!(lambda > 0.0) || lambda > 500.0) throw std::invalid_argument("poisson: lambda out of range");
  const double threshold = std::exp(-lambda);
  int k = 0;
  double p = uniform_unit(rng);
  while (p > threshold) {
    ++k;
    p *= uniform_unit(rng);
  }
  return k;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view doc_id, std::uint64_t slice_index,
                          std::uint64_t epoch, std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a64(doc_id));
  h = splitmix64(h ^ slice_index);
  h = splitmix64(h ^ epoch);
  h = splitmix64(h ^ stream);
  return h;
}

}  // namespace kilm

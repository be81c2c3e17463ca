#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ministan {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a path of
/// indices (stage, step, particle, ...). SplitMix64 mixing keeps streams
/// for neighbouring paths uncorrelated.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t base,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(base, path));
}

double draw_normal(Rng& rng, double mean, double std);
/// Uniform on [lo, hi).
double draw_uniform(Rng& rng, double lo, double hi);
bool draw_bernoulli(Rng& rng, double prob);

}  // namespace ministan

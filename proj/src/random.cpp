#include "ministan/random.hpp"

namespace ministan {

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t p : path) h = mix(h ^ mix(p + 0x632be59bd9b4e019ULL));
  return h;
}

double draw_normal(Rng& rng, double mean, double std) {
  return std::normal_distribution<double>(mean, std)(rng);
}

double draw_uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool draw_bernoulli(Rng& rng, double prob) {
  return std::bernoulli_distribution(prob)(rng);
}

}  // namespace ministan

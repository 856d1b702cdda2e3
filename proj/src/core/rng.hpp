#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rdtlgn {

// Deterministic RNG wrapper. std::mt19937_64 has a standardized sequence,
// but the standard distributions do not, so we derive uniforms and normals
// here to keep results reproducible across compilers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n)
  std::uint64_t index(std::uint64_t n) { return n ? gen_() % n : 0; }

  // Box-Muller, one value per call (second value discarded for simplicity)
  double normal(double mu = 0.0, double sigma = 1.0) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(6.283185307179586 * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

// Mixes a base seed with a stream index so per-item generators are independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rdtlgn

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

// Pinned random number generation. Gaussian draws are produced by
// Box-Muller on top of splitmix64, and every sample is keyed by
// (seed, stream, index), so a batch of draws is reproducible
// bit-for-bit regardless of evaluation order or worker count.

namespace certctrl {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

// Stateless key mix: decorrelates (seed, stream, index) triples.
inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t index) {
  SplitMix64 g{seed};
  g.state ^= g.next() + 0x632be59bd9b4e019ULL * (stream + 1);
  g.state ^= g.next() + 0x9e3779b97f4a7c15ULL * (index + 1);
  return g.next();
}

// Generator for the draws belonging to one logical sample.
inline SplitMix64 sample_rng(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t index) {
  return SplitMix64{mix_key(seed, stream, index)};
}

inline double gaussian(SplitMix64& g) {
  const double u1 = g.uniform01();
  const double u2 = g.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// i.i.d. N(0,1) vector for sample `index` of `stream`. Box-Muller pairs;
// the sine partner of the last pair is dropped for odd dim.
inline Eigen::VectorXd gaussian_vector(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t index, int dim) {
  SplitMix64 g = sample_rng(seed, stream, index);
  Eigen::VectorXd z(dim);
  int i = 0;
  while (i < dim) {
    const double u1 = g.uniform01();
    const double u2 = g.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    z[i++] = r * std::cos(a);
    if (i < dim) z[i++] = r * std::sin(a);
  }
  return z;
}

}  // namespace certctrl

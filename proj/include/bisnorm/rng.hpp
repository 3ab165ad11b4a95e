#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bisnorm {

// Seedable generator whose output is identical on every platform:
// mt19937_64 is fully specified by the standard, and every distribution
// below is implemented here rather than taken from <random>.
//
// A (seed, stream) pair selects an independent sequence; each generator
// operation in the library uses its own stream id (see synthgen.hpp).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform();
  // (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal();
  // Natural log of a Gamma(shape, 1) draw. Working in log space keeps
  // small shapes (Dirichlet alpha = 0.1) from underflowing to zero.
  double log_gamma(double shape);
  double gamma(double shape);
  // Probability vector drawn from a symmetric Dirichlet(alpha).
  std::vector<double> dirichlet(std::size_t k, double alpha);
  // Index drawn with probability proportional to `weights` (nonnegative,
  // positive sum).
  std::size_t categorical(std::span<const double> weights);
  // Counts of `trials` categorical draws.
  std::vector<std::int64_t> multinomial(std::int64_t trials,
                                        std::span<const double> weights);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Independent child seed for a named role within one experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t role);

}  // namespace bisnorm

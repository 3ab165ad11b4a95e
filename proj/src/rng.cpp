#include "bisnorm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bisnorm/errors.hpp"

namespace bisnorm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t role) {
  return splitmix64(seed * 0x2545f4914f6cdd1dULL + splitmix64(role));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ParameterError("Rng::index on empty range");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::log_gamma(double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    const double boosted = log_gamma(shape + 1.0);
    return boosted + std::log(uniform_open()) / shape;
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return std::log(d * v);
    }
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma(shape)); }

std::vector<double> Rng::dirichlet(std::size_t k, double alpha) {
  std::vector<double> logs(k);
  for (auto& l : logs) l = log_gamma(alpha);
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (auto& l : logs) {
    l = std::exp(l - top);
    sum += l;
  }
  for (auto& l : logs) l /= sum;
  return logs;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ParameterError("categorical weights sum to zero");
  const double target = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding left target at the very top; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::vector<std::int64_t> Rng::multinomial(std::int64_t trials,
                                           std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ParameterError("negative multinomial weight");
    acc += weights[i];
    cdf[i] = acc;
  }
  std::vector<std::int64_t> counts(weights.size(), 0);
  if (trials <= 0) return counts;
  if (!(acc > 0.0)) throw ParameterError("multinomial weights sum to zero");
  for (std::int64_t t = 0; t < trials; ++t) {
    const double target = uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    auto idx = static_cast<std::size_t>(it - cdf.begin());
    if (idx >= cdf.size()) {
      idx = cdf.size() - 1;
      while (weights[idx] == 0.0) --idx;
    }
    ++counts[idx];
  }
  return counts;
}

}  // namespace bisnorm

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pdbayes {

// std::mt19937_64 (its output sequence is fixed by the C++ standard) with
// hand-written variate transforms, since the std distributions are
// implementation-defined. Same seed -> same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  // Standard normal, Marsaglia polar method.
  double normal();

  double exponential() { return -std::log(uniform_open_zero()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Counts unit-rate exponential arrivals before time `mean`.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

// Seed for subtask `index` of a run seeded with `seed`: splitmix64 of the
// seed xor the splitmix64 of the index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pdbayes

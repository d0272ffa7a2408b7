#pragma once

#include <cstdint>
#include <random>

namespace ced {

/// Seeded generator with a platform-independent double conversion, so traces
/// depend only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ced

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constitutive input failed the positive-definiteness check.
struct CoercivityError : Error {
  using Error::Error;
};

// A linear solve did not reach the requested tolerance.
struct SolverError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Deterministic 64-bit generator (splitmix64).  Used for all seeded test
// data; identical sequences on every platform, unlike <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace pg

#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace quadsac {

// Deterministic random source for everything training touches.
// The variate transforms live here instead of <random>'s distribution
// classes so the draw sequence is fully reproducible from the serialized
// engine state (std::normal_distribution keeps a hidden spare value and
// its algorithm is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform();
  // uniform in [lo, hi)
  double uniform(double lo, double hi);
  // standard normal via Box-Muller; one value per call, no cached spare
  double normal();
  // uniform integer in [0, n), n >= 1
  std::size_t index(std::size_t n);

  std::string save_state() const;
  void load_state(const std::string& s);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64-style combiner for deriving independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace quadsac

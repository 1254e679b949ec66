// Seeded random source used everywhere randomness is needed.
//
// The generator is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Real values are derived from it with explicit bit arithmetic
// (never the implementation-defined std:: distributions), so a given seed
// yields the same stream on every conforming platform.

#ifndef ACTUBE_RNG_HPP_
#define ACTUBE_RNG_HPP_

#include <cstdint>
#include <random>

namespace actube {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [lo, hi] inclusive (lo <= hi).
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  // Derive an independent child stream, e.g. one per video.
  Rng fork(std::uint64_t salt) {
    return Rng(engine_() ^ (salt * 0x9E3779B97F4A7C15ULL));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace actube

#endif  // ACTUBE_RNG_HPP_

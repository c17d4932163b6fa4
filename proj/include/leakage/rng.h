#ifndef LEAKAGE_RNG_H_
#define LEAKAGE_RNG_H_

#include <cstdint>
#include <random>

namespace leakage {

std::uint64_t splitmix64(std::uint64_t x);

// Seeded generator with derivable substreams. Sampling helpers avoid the
// standard distributions so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent stream for (seed, stream); used for per-episode and per-cell
  // determinism.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);
  static Rng substream(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t sub);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  // P(d) = (1-gamma) gamma^(d-1), d >= 1.
  std::int64_t geometric(double gamma);

 private:
  std::mt19937_64 engine_;
};

}  // namespace leakage

#endif  // LEAKAGE_RNG_H_

#include "leakage/rng.h"

#include <cmath>
#include <limits>

namespace leakage {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t sub) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 1)) ^
             splitmix64(sub + 0x2545f4914f6cdd1dULL));
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

std::int64_t Rng::geometric(double gamma) {
  if (gamma <= 0.0) return 1;
  // Inverse CDF: P(D > d) = gamma^d.
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log(gamma)));
}

}  // namespace leakage

#ifndef LCM_RNG_HPP
#define LCM_RNG_HPP

#include <cstdint>

namespace lcm {

/* Deterministic splitmix64 generator. We deliberately avoid <random>
 * distributions: their output is implementation-defined, and reports must be
 * byte-identical across platforms for the same seed. Not cryptographic. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [a, b) from the top 53 bits.
  double uniform(double a, double b) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  // Uniform integer in [lo, hi]. Modulo bias is negligible for our ranges
  // (hi - lo < 2^32) and determinism matters more than perfect uniformity.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  // Independent stream derived from this generator's seed and a stream tag.
  // Forking does not advance this generator.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    r.next();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace lcm

#endif

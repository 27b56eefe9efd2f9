#ifndef AHTSGD_RNG_HPP
#define AHTSGD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ahtsgd {

inline constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Reserved stream_id values. Every random consumer in a run draws from its
// own (seed, stream_id) stream, so adding draws to one subsystem never
// perturbs another — the backbone of the byte-identical rerun guarantee.
namespace stream_ids {
inline constexpr uint64_t kInit = 1;         // parameter initialization
inline constexpr uint64_t kNoise = 2;        // injected stable/Gaussian noise
inline constexpr uint64_t kProbe = 3;        // Hutchinson probes
inline constexpr uint64_t kLambdaMax = 4;    // power-iteration starts
inline constexpr uint64_t kExperiment = 5;   // experiment-level draws (starting points, ...)
inline constexpr uint64_t kShuffleBase = 1u << 20;  // + epoch, per-epoch batch shuffles
}  // namespace stream_ids

// Splittable deterministic random stream. Every consumer derives its own
// stream from (seed, stream_id), so concurrent runs and concurrent
// subsystems of one run never share state. The underlying engine is
// std::mt19937_64, whose output sequence is fixed by the standard; all
// floating-point transforms below are hand-rolled so the variates are
// identical across standard library implementations.
class RngStream {
 public:
  explicit RngStream(uint64_t seed, uint64_t stream_id = 0) {
    uint64_t s = splitmix64(seed) ^ splitmix64(stream_id * 0x7f4a7c15ULL + 0x9e3779b9ULL);
    std::seed_seq seq{
        static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32),
        static_cast<uint32_t>(splitmix64(s)), static_cast<uint32_t>(splitmix64(s) >> 32),
        static_cast<uint32_t>(stream_id), static_cast<uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Exp(1) via inversion; finite for every engine output.
  double exponential() { return -std::log1p(-uniform01()); }

  // N(0, 1) via Box-Muller, one spare cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // u1 == 0 would give log(0); nudge to the smallest representable draw.
    double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

  // Uniform integer in [0, n), unbiased via rejection.
  uint64_t bounded_u64(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ahtsgd

#endif  // AHTSGD_RNG_HPP

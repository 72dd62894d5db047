#pragma once

#include <cmath>
#include <cstdint>

namespace fsir {

// SplitMix64 finalizer. Counter-based: out_k = mix(base + k*GAMMA), so any
// draw is a pure function of (seed, stream, counter) and streams can be
// generated independently in any order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// One independent random stream, addressed by (seed, stream).  Used with
// stream = sample index so replicates are reproducible and order-free.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(splitmix64(splitmix64(seed) ^
                         (0xD1B54A32D192ED03ull * (stream + 1)))) {}

  std::uint64_t next_u64() {
    return splitmix64(base_ + counter_++ * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on (0,1].
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draws two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fsir

#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams. std::random distributions are not portable
// across standard libraries, and the harness promises byte-identical output
// for a given seed, so sampling is done by hand on top of splitmix64.

namespace kslab::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless mix of several labels into one substream seed.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = seed;
  s ^= splitmix64(a) + 0x165667b19e3779f9ULL;
  std::uint64_t t = s;
  t ^= splitmix64(b) * 0x27d4eb2f165667c5ULL + 1;
  std::uint64_t u = t;
  u ^= splitmix64(c) * 0x9e3779b97f4a7c15ULL + 1;
  return u;
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in (0, 1); never returns 0 so it is safe inside log().
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kslab::rng

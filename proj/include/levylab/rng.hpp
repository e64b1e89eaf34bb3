#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "levylab/types.hpp"

namespace levylab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One independent stream per (root seed, path index, purpose). All variate
// transforms are implemented here so the produced sequences depend only on
// the engine's standard-defined output, not on libstdc++ distribution
// internals.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index,
            std::uint64_t purpose = 0) {
    std::uint64_t s = root_seed;
    std::uint64_t a = splitmix64(s) ^ (0x632be59bd9b4e019ULL * (stream_index + 1));
    std::uint64_t b = a ^ (0x9e6c63d0876a9a47ULL * (purpose + 1));
    engine_.seed(splitmix64(b));
  }

  double uniform() {
    // 53-bit mantissa uniform in [0,1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0,1], safe for logs.
  double uniform_pos() { return 1.0 - uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Exact Poisson draw; Knuth's product method on chunks so the loop count
  // stays bounded for any mean.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 32.0) {
      total += poisson_knuth(32.0);
      mean -= 32.0;
    }
    return total + poisson_knuth(mean);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::uint64_t poisson_knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double floor = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > floor);
    return k - 1;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace levylab

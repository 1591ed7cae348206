#pragma once

// P(X > Y) for independent Beta draws, by brute force with the standard
// library's gamma sampler (independent of the library's own sampler).

#include <cstdint>
#include <random>

namespace oracle {

inline double beta_win_probability(double ax, double bx, double ay, double by, long draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gax(ax), gbx(bx), gay(ay), gby(by);
  long wins = 0;
  for (long i = 0; i < draws; ++i) {
    const double gx = gax(rng);
    const double x = gx / (gx + gbx(rng));
    const double gy = gay(rng);
    const double y = gy / (gy + gby(rng));
    if (x > y) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(draws);
}

// Closed form for Beta(2,1) vs Beta(1,2): integral of 2x (2x - x^2) on [0,1].
inline constexpr double kBeta21Beats12 = 5.0 / 6.0;

inline double harmonic(long n) {
  double h = 0.0;
  for (long i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

}  // namespace oracle

#pragma once

// Independent reference implementations the tests compare against. None of
// these call into the library code they check.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Point {
  double x;
  double y;
};

// Smallest distance from `c` to any of `samples` evenly spaced points on the
// closed segment a-b.
inline double sampled_segment_distance(Point a, Point b, Point c, int samples = 1000) {
  double best = INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    const double x = a.x + t * (b.x - a.x);
    const double y = a.y + t * (b.y - a.y);
    best = std::fmin(best, std::hypot(x - c.x, y - c.y));
  }
  return best;
}

// Discounted returns by explicit summation: for each (t, n), walk forward
// until an episode boundary or the window end, adding the bootstrap value in
// the latter case. Arrays are row-major [rows, n].
inline std::vector<double> brute_force_returns(const std::vector<double>& rewards, const std::vector<double>& masks,
                                               const std::vector<double>& values, int steps, int envs,
                                               double gamma) {
  std::vector<double> out(static_cast<std::size_t>(steps * envs));
  for (int n = 0; n < envs; ++n) {
    for (int t = 0; t < steps; ++t) {
      double total = 0.0;
      double discount = 1.0;
      bool ended = false;
      for (int k = t; k < steps; ++k) {
        total += discount * rewards[static_cast<std::size_t>(k * envs + n)];
        if (masks[static_cast<std::size_t>((k + 1) * envs + n)] == 0.0) {
          ended = true;
          break;
        }
        discount *= gamma;
      }
      if (!ended) total += discount * values[static_cast<std::size_t>(steps * envs + n)];
      out[static_cast<std::size_t>(t * envs + n)] = total;
    }
  }
  return out;
}

// Population standard deviation with separate mean and deviation passes.
inline double two_pass_sigma(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace oracle

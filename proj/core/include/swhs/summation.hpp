#pragma once

#include <cmath>
#include <cstddef>

namespace swhs {

// Neumaier-compensated accumulator. All quadrature reductions go through
// this so reported residuals sit at true round-off scale instead of drifting
// with summation order and magnitude spread.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

inline double compensated_dot(const double* a, const double* b, std::size_t n) {
  NeumaierSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

}  // namespace swhs

#pragma once
#include <cstdint>
#include <vector>

#include "planarpeel/rng.hpp"

namespace planarpeel {

struct ChiSquare {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
};

// goodness of fit of observed counts against expected probabilities; cells
// with zero expectation must have zero observations (DomainError otherwise).
// df = cells - 1 - df_reduction.
ChiSquare chi_square_test(const std::vector<long long>& observed,
                          const std::vector<double>& expected_probs,
                          int df_reduction = 0);

struct KsTest {
  double statistic = 0;  // sup distance of the empirical cdfs
  double p_value = 1;    // asymptotic Kolmogorov tail
};

// two-sample Kolmogorov-Smirnov; samples are copied and sorted internally
KsTest ks_two_sample(std::vector<double> a, std::vector<double> b);

// upper regularized incomplete gamma Q(s, x) (chi-square tail helper)
double gamma_q(double s, double x);

// ordinary least squares y = a + b x; returns b
double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y);

struct SlopeCi {
  double slope = 0;     // point estimate on the full data
  double lo = 0, hi = 0;  // bootstrap percentile interval
};

// percentile bootstrap over (x, y) pairs; deterministic for a fixed seed
SlopeCi bootstrap_slope_ci(const std::vector<double>& x,
                           const std::vector<double>& y, int n_boot,
                           double confidence, uint64_t seed);

}  // namespace planarpeel

#include "planarpeel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "planarpeel/errors.hpp"

namespace planarpeel {

namespace {

// series expansion of the lower regularized gamma P(s, x), for x < s + 1
double gamma_p_series(double s, double x) {
  double sum = 1.0 / s, term = sum, a = s;
  for (int i = 0; i < 1000; ++i) {
    a += 1;
    term *= x / a;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Lentz continued fraction for Q(s, x), for x >= s + 1
double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -(double)i * (i - s);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double slope_of(const double* x, const double* y, int n) {
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, num = 0, den = 0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  if (den == 0) throw DomainError("slope of a vertical point set");
  return num / den;
}

}  // namespace

double gamma_q(double s, double x) {
  if (s <= 0 || x < 0) throw DomainError("gamma_q needs s > 0, x >= 0");
  if (x == 0) return 1;
  return x < s + 1 ? 1 - gamma_p_series(s, x) : gamma_q_cf(s, x);
}

ChiSquare chi_square_test(const std::vector<long long>& observed,
                          const std::vector<double>& expected_probs,
                          int df_reduction) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw DomainError("chi_square_test: size mismatch");
  long long total = 0;
  for (long long o : observed) total += o;
  if (total <= 0) throw DomainError("chi_square_test: empty sample");
  ChiSquare out;
  int cells = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    double e = expected_probs[i] * (double)total;
    if (e <= 0) {
      if (observed[i] != 0)
        throw DomainError("chi_square_test: mass in a null cell");
      continue;
    }
    ++cells;
    double d = (double)observed[i] - e;
    out.statistic += d * d / e;
  }
  out.df = cells - 1 - df_reduction;
  if (out.df < 1) throw DomainError("chi_square_test: no degrees of freedom");
  out.p_value = gamma_q(out.df / 2.0, out.statistic / 2.0);
  return out;
}

KsTest ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs((double)i / a.size() - (double)j / b.size()));
  }
  KsTest out;
  out.statistic = d;
  double ne = (double)a.size() * b.size() / (a.size() + b.size());
  double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0;
  for (int k = 1; k <= 200; ++k) {
    double term = 2 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::fabs(term) < 1e-12) break;
  }
  out.p_value = std::min(1.0, std::max(0.0, p));
  return out;
}

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("least_squares_slope: need >= 2 points");
  return slope_of(x.data(), y.data(), (int)x.size());
}

SlopeCi bootstrap_slope_ci(const std::vector<double>& x,
                           const std::vector<double>& y, int n_boot,
                           double confidence, uint64_t seed) {
  if (n_boot < 2 || confidence <= 0 || confidence >= 1)
    throw DomainError("bootstrap_slope_ci: bad parameters");
  SlopeCi out;
  out.slope = least_squares_slope(x, y);
  int n = (int)x.size();
  Rng rng(seed);
  std::vector<double> bx(n), by(n), slopes;
  slopes.reserve(n_boot);
  for (int t = 0; t < n_boot; ++t) {
    for (int i = 0; i < n; ++i) {
      int k = (int)rng.next_below((uint64_t)n);
      bx[i] = x[k];
      by[i] = y[k];
    }
    try {
      slopes.push_back(slope_of(bx.data(), by.data(), n));
    } catch (const DomainError&) {
      // degenerate resample (all x equal): skip it
    }
  }
  if (slopes.size() < 2) throw Unstable("bootstrap produced no usable resamples");
  std::sort(slopes.begin(), slopes.end());
  double alpha = (1 - confidence) / 2;
  auto pick = [&](double q) {
    double pos = q * (slopes.size() - 1);
    size_t lo = (size_t)pos;
    size_t hi = std::min(lo + 1, slopes.size() - 1);
    double f = pos - lo;
    return slopes[lo] * (1 - f) + slopes[hi] * f;
  };
  out.lo = pick(alpha);
  out.hi = pick(1 - alpha);
  return out;
}

}  // namespace planarpeel

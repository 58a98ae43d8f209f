#pragma once
#include <vector>

#include "planarpeel/quad.hpp"
#include "planarpeel/rational.hpp"

namespace planarpeel {

// Partition function of critical Boltzmann quadrangulations with a simple
// boundary of perimeter 2p:
//   Q_p = 12 (2/3)^p (3p-4)! / ((p-2)! (2p)!)   for p >= 2,
//   Q_1 = 4/3 (the unique value consistent with the one-step peeling
//   identity and with sum_p Q_p (2/9)^p = 1/3).
Rat q_partition(int p);

// Q_p (2/9)^p in double precision (tilted weights used by the samplers)
double q_tilde(int p);

// certified bound on the remainder sum_{k>p} Q_k (2/9)^k; follows from the
// term ratio being at most (p/(p+1))^2, proven for all p by a polynomial
// inequality
double q_tilde_tail_bound(int p);

// exact series coefficients of M(1/12, z) = (1/24) sqrt((18-z)(2-z)^3)
// - 1/2 + z/2 - z^2/24 (partition function of Boltzmann maps with a simple
// boundary of perimeter p)
Rat m_coefficient(int p);

// closed-form evaluation; exact when the radicand is a perfect square,
// otherwise rounded through double precision. DomainError for z > 2.
Rat m_series(const Rat& z);
double m_series_d(double z);

// value plus a certified bound on the truncation error of the series sum
struct SeriesValue {
  Rat value;
  Rat tail_bound;
};

// Q(1/12,z) = sum Q_p z^p and Q_dot(1/12,z) = z^2 d/dz (Q/z); both require
// 0 <= z <= 2/9. At the critical point z = 2/9 the values (1/3 and 1/9) come
// from the algebraic equation satisfied by the series (see q_cubic_residual),
// with zero tail bound.
SeriesValue q_series(const Rat& z);
SeriesValue q_dot_series(const Rat& z);

// J = Q + Q^2 and J_dot = 2 Q Q_dot + Q^2 + Q_dot
SeriesValue j_series(const Rat& z);
SeriesValue j_dot_series(const Rat& z);

// residual of the cubic functional equation W(1+W)^2 = (4/3)z - 12z^2 + 12zW
// satisfied by W(z) = sum Q_p z^p; exact zero at (z, w) on the curve. This is
// the one-step peeling identity summed over p.
Rat q_cubic_residual(const Rat& z, const Rat& w);

// critical sum S = sum_p Q_p (2/9)^p evaluated by direct long-double
// summation to `terms` terms; returns the partial sum and a certified bound
// covering both the series tail and the float rounding
struct CriticalSum {
  double value;
  double error_bound;
};
CriticalSum critical_q_sum(int terms);

// all rooted isomorphism classes of quadrangulations with a simple boundary
// of perimeter 2p and exactly n internal faces (n = 0 admits the trivial
// quadrangulation when p = 1). Generated by exhaustive peeling histories;
// each history yields a distinct map, which the canonical-form dedup test
// cross-checks.
struct EnumOptions {
  bool truncated_only = false;  // prune to truncated-boundary maps
  long long budget = 200000000;
};
std::vector<Quadrangulation> enumerate_quadrangulations(int n, int p,
                                                        const EnumOptions& opts = {});

// counts #Q_{k,p} for k = 0..n in one sweep
std::vector<long long> count_quadrangulations(int n, int p);

// P(m is the sub-map explored by a peeling of the Boltzmann map of perimeter
// p), given the sizes |m \ dt m|, |db m| and |dt m|; and its p -> infinity
// limit 2^{|dt|-|db|} 12^{-|m \ dt m|}
Rat submap_probability(int edges_minus_top, int bottom_len, int top_len, int p);
Rat submap_probability_limit(int edges_minus_top, int bottom_len, int top_len);

// same, reading the sizes off a simple-boundary map whose marked bottom
// segment is the `bottom_len` boundary edges starting at the root dart
Rat submap_probability(const PlanarMap& m, int bottom_len, int p);
Rat submap_probability_limit(const PlanarMap& m, int bottom_len);

// |A(1/12,z) - M_dotdot(1/12, J/z) (J_dot/J)^3| with A enumerated up to
// n <= volume_cutoff internal faces and p <= perim_cutoff, plus a certified
// bound on everything dropped by the truncation
struct ResidualReport {
  double residual;
  double budget;
  double lhs;
  double rhs;
};
ResidualReport core_identity_residual(const Rat& z, int volume_cutoff = 6,
                                      int perim_cutoff = 6);

}  // namespace planarpeel

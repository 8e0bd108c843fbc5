#pragma once

#include <map>
#include <vector>

#include "fluctuator/edgeworth.hpp"
#include "fluctuator/numeric.hpp"
#include "fluctuator/walk.hpp"

/// Local probabilities of the walk conditioned to stay positive:
/// b_n(x) = P(S_n = x, tau_0 > n) ~ Sum_j U_j(x) a_n^(j+1), with
/// B(x, s) = Sum_{n>=1} b_n(x) s^n = Sum_l q_l(x) (1-s)^{l/2}.
namespace fluct::conditioned {

/// Float DP tables shared by the pipeline: p_n(x) and b_n(x) for
/// n = 0..N, x = 0..x_max (strict: bar b_n(x)).
struct Tables {
  long N = 0;
  long x_max = 0;
  bool strict = false;
  std::vector<std::vector<long double>> pmf;  ///< [n][x]
  std::vector<std::vector<long double>> b;    ///< [n][x]
};
Tables make_tables(const walk::LatticeLaw& law, long N, long x_max, bool strict);

/// Coefficients psi_j(x) of Sum_{n>=1} p_n(x) s^{n-1} = Sum_j psi_j(x) (1-s)^{j/2} + ...
/// Odd indices are theta polynomials (psi_{2j-1} = theta_j), even ones are
/// regularised sums.
struct PsiX {
  long x = 0;
  std::map<int, Real> psi;  ///< index -1..j_max
  std::map<int, Real> tail_bound;
  std::map<int, double> summand_exponent;
};

/// psi_{-1}..psi_{j_max} for x = 0..tables.x_max. Throws TailNotDecayed.
std::vector<PsiX> psi_x_range(const walk::LatticeLaw& law, const Tables& tables, int j_max);
PsiX psi_x(const walk::LatticeLaw& law, long x, int j_max, long N);

struct QLadder {
  bool strict = false;
  long x_max = 0;
  int L = 0;
  std::vector<std::vector<Real>> q;  ///< q[l][x], l = 0..L, x = 0..x_max (weak: x = 0 unused)
  std::vector<Real> q0_tail_bound;   ///< per x
  Real theta0 = 0;
  /// U_j(x) = q_{2j-1}(x).
  Real U(int j, long x) const { return q.at(2 * j - 1).at(x); }
  /// V(x) = 1 + Sum_{z<x} q_0(z) (weak, z >= 1) or Sum_{z<=x} q_0(z) + 1 (strict).
  Real V(long x) const;
};

/// q_0 from regularised sums of the DP table, q_1 = -2 theta_0 V, and for
/// l >= 2 the recursion
/// -(l/2) q_l(x) = psi_{l-2}(x) + Sum_y Sum_{j=-1}^{l-2} psi_j(y) q_{l-2-j}(x-y),
/// y = 1..x-1 (weak) or 0..x (strict).
QLadder q_ladder(const walk::LatticeLaw& law, const Tables& tables, int L);
QLadder q_ladder(const walk::LatticeLaw& law, long x_max, int L, long N, bool strict = false);

/// Sum_{j<=J} U_j(x) a_n^(j+1) for each n.
std::vector<Real> u_expansion_eval(const QLadder& ladder, long x, const std::vector<long>& n_grid, int J);

/// Cross-check oracle: least squares of B(x, s) on s in [0.9, 0.999]
/// (Chebyshev nodes) against 1, (1-s)^{1/2}, ..., (1-s)^{(terms-1)/2} with a
/// small ridge. Returns the fitted q_0..q_{terms-1}.
std::vector<Real> gf_fit(const std::vector<long double>& b_of_n, int terms, double ridge = 1e-12, int nodes = 40);

}  // namespace fluct::conditioned

#pragma once

#include <array>
#include <string>
#include <vector>

#include "fluctuator/edgeworth.hpp"
#include "fluctuator/numeric.hpp"
#include "fluctuator/walk.hpp"

/// P(tau_x > n) ~ Sum_j V_j(x) a_n^(j), the killed operator
/// Pf(x) = E[f(x + X); x + X > 0], and polynomial tails of V_j.
namespace fluct::taux {

struct VLadder {
  std::string route;  ///< "ladder" or "leftcont"
  long x_max = 0;
  int J = 0;
  std::vector<std::vector<Real>> V;  ///< V[j - 1][x], x = 0..x_max
  std::array<Real, 5> m{};           ///< e^{psi_0} mu_k (ladder route)
  std::vector<std::vector<Real>> Qtilde;  ///< Qtilde[l][x] (ladder route)
  Real at(int j, long x) const { return V.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(x)); }
};

/// Duality route: V_j = Q_{2j-3} with
/// Q_j(x) = m_{j+1} + Sum_{k=-1}^{j} m_{k+1} Qtilde_{j-k}(x),
/// Qtilde_l(x) = Sum_{y<x} tilde q_l(y) from the reversed walk under strict
/// killing. J <= 3.
VLadder v_ladder(const walk::LatticeLaw& law, long x_max, int J, long N = 8192);

/// Left-continuous closed form V_j(x) = x theta_{j-1}(-x) / (j - 1/2).
/// Throws NotLeftContinuous.
VLadder v_leftcont(const walk::LatticeLaw& law, long x_max, int J);

/// f[y] holds f(y) for y = 1..f.size()-1; f[0] is never read.
/// Throws DomainGap when x + X leaves the known range.
Real apply_killed(const walk::LatticeLaw& law, const std::vector<Real>& f, long x);

/// sup over x in [x_lo, x_hi] of |(P - I)^k f(x)|. Throws DomainGap when f
/// does not reach x_hi + k * max_step.
Real polyharm_defect(const walk::LatticeLaw& law, const std::vector<Real>& f, int k, long x_lo, long x_hi);

/// (P - I) V_2 against c V_1: c by least squares, its sign, and the
/// relative sup residual for that sign; plus the relative (P - I)^2 V_2 defect.
struct SignReport {
  Real coefficient = 0;
  int sign = 0;
  Real relative_residual = 0;
  Real second_defect_relative = 0;
};
SignReport v2_sign_check(const walk::LatticeLaw& law, const std::vector<Real>& V2, const std::vector<Real>& V1,
                         long x_lo, long x_hi);

struct PolyTailFit {
  edgeworth::Polynomial poly;
  std::vector<long> xs;
  std::vector<Real> residuals;  ///< values - poly, every grid point
  Real scale = 0;               ///< sup |values|
  Real last_quartile_max = 0;   ///< sup |residual| on the last quartile
  bool decaying = false;        ///< last quartile no larger than the first half
  bool pass = false;            ///< last_quartile_max <= 1e-3 scale
};

/// Degree-d least squares on the upper half of the grid. Throws GridTooShort.
PolyTailFit poly_tail_fit(const std::vector<long>& xs, const std::vector<Real>& values, int degree);

}  // namespace fluct::taux

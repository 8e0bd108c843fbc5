#pragma once

#include <array>
#include <string>
#include <vector>

#include "fluctuator/edgeworth.hpp"
#include "fluctuator/halfpow.hpp"
#include "fluctuator/numeric.hpp"
#include "fluctuator/walk.hpp"

/// Three-term expansion P(tau_0 > n) = Sum_{j<=3} nu_j a_n^(j) + O(n^{-7/2}).
namespace fluct::tau0 {

/// One regularised scalar sum with its diagnostics.
struct PsiValue {
  Real value = 0;
  Real tail = 0;        ///< analytic tail added past the horizon
  Real tail_bound = 0;  ///< spread between fit orders
  double summand_exponent = 0;
  bool summand_zero = false;
};

struct PsiScalars {
  PsiValue psi0, psi1, psi2;
  long horizon = 0;
};

/// psi_0 = Sum f_n, psi_1 = -Sum n (f_n - theta_1 a_{n-1}^(2)),
/// psi_2 = Sum n(n-1)/2 (f_n - theta_1 a_{n-1}^(2) - theta_2 a_{n-1}^(3)),
/// for f_n = Delta_n / n, n = 0..N (entry 0 ignored). Throws TailNotDecayed
/// when a nonzero summand decays slower than n^{-1.2}.
PsiScalars psi_scalars_from_sequence(const std::vector<Real>& f, const Real& theta1, const Real& theta2);

/// mu_0..mu_4: coefficients of exp(theta_1 u + psi_1 u^2 + (theta_2 - theta_1) u^3 + psi_2 u^4), u = (1-s)^{1/2}.
std::array<Real, 5> mu_coeffs(const Real& theta1, const Real& theta2, const Real& psi1, const Real& psi2);
/// Same numbers read off exp_poly of the half-power series.
std::array<Real, 5> mu_coeffs_series(const Real& theta1, const Real& theta2, const Real& psi1, const Real& psi2);

struct Tau0Coefficients {
  bool strict = false;
  edgeworth::DeltaMode theta_mode = edgeworth::DeltaMode::Fit;
  Real theta1 = 0, theta2 = 0;
  PsiScalars psi;
  std::array<Real, 5> mu{};
  std::array<Real, 3> nu{};  ///< nu_1, nu_2, nu_3
  /// First-order propagation of the psi tail bounds (theta taken as exact).
  std::array<Real, 3> nu_error{};
  long horizon = 0;
};

/// Delta_n / n from a float DP of length N (strict: Delta bar).
std::vector<Real> delta_over_n(const walk::LatticeLaw& law, long N, bool strict);

/// Full pipeline. Analytic theta is available for the weak branch only;
/// the strict branch always fits.
Tau0Coefficients tau0_coeffs(const walk::LatticeLaw& law, long N = 8192,
                             edgeworth::DeltaMode mode = edgeworth::DeltaMode::Fit, bool strict = false);
/// Same, from a supplied f_n = Delta_n / n sequence (theta fitted on it).
Tau0Coefficients tau0_coeffs_from_sequence(const std::vector<Real>& f, bool strict = false);

/// Sum_{j<=terms} nu_j a_n^(j) for each n.
std::vector<Real> evaluate_tau0(const Tau0Coefficients& c, const std::vector<long>& n_grid, int terms);

/// Fitted decay exponents of |tail_n - Sum_{j<=t} nu_j a_n^(j)| for t = 1..3
/// over a geometric grid in [n_lo, n_hi]. Points are dropped when the error
/// is within DP rounding (1e-15 of the tail) plus the coefficient uncertainty
/// Sum_{j<=t} nu_error_j |a_n^(j)|; `at_floor` marks a fit left with fewer
/// than 8 points.
struct DecayLadder {
  std::array<double, 3> exponent{};
  std::array<bool, 3> at_floor{};
  std::array<double, 3> max_error{};
};
DecayLadder decay_ladder(const Tau0Coefficients& c, const std::vector<long double>& tail, long n_lo, long n_hi);

/// Series route: Q(s) = Sum f_n s^n split into its half-power part (from the
/// coefficients) and a remainder; E = exp(Q) / sqrt(1-s).
struct HalfPowRoute {
  std::array<Real, 3> nu{};             ///< read from E's poly part
  double extract_gap = 0;               ///< max_n |[s^n] E - P(tau_0 > n)|
  halfpow::Classification q_remainder;  ///< should sit in class 4: defects ~ 0
  halfpow::Classification e_remainder;
};
/// `tail` holds P(tau_0 > n) (or the strict tail), n = 0..N, matching f.
HalfPowRoute halfpow_route(const Tau0Coefficients& c, const std::vector<Real>& f, const std::vector<long double>& tail);

}  // namespace fluct::tau0

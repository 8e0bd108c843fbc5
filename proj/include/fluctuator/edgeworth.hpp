#pragma once

#include <map>
#include <string>
#include <vector>

#include "fluctuator/numeric.hpp"
#include "fluctuator/walk.hpp"

namespace fluct::edgeworth {

/// Dense polynomial, c[i] is the coefficient of x^i. Trailing zeros trimmed.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Real> c);
  static Polynomial monomial(int power, const Real& coef);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  ///< -1 for zero
  const std::vector<Real>& coefficients() const { return c_; }
  Real coef(int i) const { return (i < 0 || i > degree()) ? Real(0) : c_[i]; }
  Real operator()(const Real& x) const;
  long double eval(long double x) const;
  Polynomial derivative() const;
  Polynomial reflected() const;  ///< x -> -x

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Real& s) const;
  bool is_zero() const { return c_.empty(); }

 private:
  void trim();
  std::vector<Real> c_;
};

/// poly(x) e^{-x^2/2} / sqrt(2 pi).
struct GaussPoly {
  Polynomial poly;
  GaussPoly derivative() const;  ///< (p' - x p) phi
  Real operator()(const Real& x) const;
};

/// Probabilists' Hermite polynomial H_m.
Polynomial hermite(int m);

/// All (k_1..k_nu) >= 0 with k_1 + 2 k_2 + ... + nu k_nu = nu.
std::vector<std::vector<int>> partitions(int nu);

/// Q_nu for P(S_n <= x sigma sqrt n); `cumulants` holds gamma_1.. and must
/// reach order nu + 2. Throws MissingCumulant.
GaussPoly edgeworth_Q(int nu, const std::vector<Rational>& cumulants, const Real& sigma);
/// q_nu for sigma sqrt(n) p_n(x), t = x / (sigma sqrt n).
GaussPoly local_edgeworth_q(int nu, const std::vector<Rational>& cumulants, const Real& sigma);

/// S_nu(0): 2 zeta(nu) / (2 pi)^nu for even nu, 0 for odd nu. Exact.
Rational s_nu_zero(int nu);

/// pi_0..pi_L with p_n(x) = Sum_L pi_L(x) n^{-(L+1/2)} + O(n^{-(L+3/2)}),
/// collected from the local expansion with the Gaussian factor expanded in x^2/n.
std::vector<Polynomial> local_power_ladder(const walk::LatticeLaw& law, int L);

/// theta_0..theta_{floor(r/2)} with p_n(x) ~ Sum_j theta_j(x) a_{n-1}^(j+1).
/// Throws SpanNotOne.
std::vector<Polynomial> theta_polys(const walk::LatticeLaw& law, int r);

enum class DeltaMode { Analytic, Fit, NonLattice };
std::string to_string(DeltaMode mode);

/// Delta_n / n ~ theta_1 a_{n-1}^(2) + theta_2 a_{n-1}^(3).
struct CdfExpansionAtZero {
  DeltaMode mode = DeltaMode::Fit;
  /// c_nu with P(S_n <= 0) - 1/2 = Sum_nu c_nu n^{-nu/2}; analytic modes only.
  std::map<int, Real> cdf_power;
  Real theta1 = 0;
  Real theta2 = 0;
  Real condition = 0;           ///< fit mode: condition of the two-column design
  double residual_exponent = 0;  ///< fit mode: decay of the residual after both terms
  long n_fit = 0;
  /// a_n convention: Delta_n / n ~ theta_1 a_n^(2) + theta2_prime a_n^(3).
  Real theta2_prime() const { return theta2 - theta1; }
};

/// Analytic: CLT terms plus lattice corrections at the midpoint, plus p_n(0)/2.
/// Fit: regression of exact DP values on the a-basis over [N_fit/8, N_fit].
/// NonLattice: CLT terms only (continuous laws with the same cumulants).
/// Throws FitUnstable when the two-column condition number exceeds 1e6.
CdfExpansionAtZero delta_coeffs(const walk::LatticeLaw& law, DeltaMode mode, long N_fit = 8192);

/// Fit mode on a given sequence Delta_n / n, n = 0..N (entry 0 ignored).
CdfExpansionAtZero delta_coeffs_from_sequence(const std::vector<Real>& delta_over_n);

}  // namespace fluct::edgeworth

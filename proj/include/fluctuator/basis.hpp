#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "fluctuator/numeric.hpp"

/// The binomial sequences a_n^(j) = (-1)^n C(j - 3/2, n), i.e. the
/// coefficients of (1-s)^{j-3/2}, and conversions between them and the
/// powers n^{-(k-1/2)}.
namespace fluct::basis {

/// a_0^(j) .. a_N^(j), exact.
std::vector<Rational> a_seq(int j, std::size_t N);

/// Single exact value; zero for n < 0.
Rational a_exact(int j, long n);

/// a_0^(j) .. a_N^(j) by the ratio recurrence a_n = a_{n-1} (n - j + 1/2)/n.
/// Instantiated for double, long double and Real.
template <class T>
std::vector<T> a_seq_float(int j, std::size_t N);

/// Coefficients of (1-s)^alpha for any real exponent, n = 0..N.
template <class T>
std::vector<T> binom_seq_float(const T& alpha, std::size_t N);

/// Sum_{k>=n} a_k^(j) = -a_{n-1}^(j-1). Rejects j < 2 (divergent tail).
Rational tail_sum(int j, long n);

/// Sum_{m>=M} m(m-1)...(m-i+1) a_m^(k), exact. Requires k - i >= 2.
Rational falling_tail_sum(int k, int i, long M);

/// Bernoulli numbers B_0..B_K (B_1 = -1/2).
std::vector<Rational> bernoulli_numbers(int K);

/// c_0..c_K with Gamma(n+alpha)/Gamma(n+beta) ~ n^{alpha-beta} Sum_i c_i n^{-i}.
std::vector<Rational> gamma_ratio_coeffs(const Rational& alpha, const Rational& beta, int K);

/// Exact conversion table. value(k) = rational(k) * pi^{sqrt_pi_power/2}.
struct ExactConversion {
  int j = 0;
  int m = 0;
  int shift = 0;
  int sqrt_pi_power = 0;
  std::map<int, Rational> rational;
  Real value(int k) const;
};

/// n^{-(j-1/2)} = Sum_{k=j..m} gamma_k a_{n-shift}^(k) + O(n^{-(m+1/2)}).
ExactConversion power_to_basis_exact(int j, int m, int shift = 0);

/// a_{n-shift}^(j) = Sum_{k=j..m} beta_k n^{-(k-1/2)} + O(n^{-(m+1/2)}).
/// The leading entry is beta_j = (-1)^{j-1} Gamma(j-1/2)/pi.
ExactConversion basis_to_power_exact(int j, int m, int shift = 0);

/// Fitted conversion of n^{-(j-1/2)} onto a_n^(j..m).
struct BasisConversion {
  int j = 0;
  int m = 0;
  long n_fit = 0;
  std::map<int, Real> coefficients;
  double residual_exponent = 0;  ///< decay exponent of the truncated remainder
  Real condition = 0;
};

/// Least-squares fit on a geometric grid in [N_fit/8, N_fit] with two extra
/// absorbing columns. Throws FitDiagnostic if the remainder decays slower
/// than n^{-(m+1/4)}.
BasisConversion power_to_basis(int j, int m, long N_fit);

/// Sum_{n>=n0} w(n) f_n for data f_0..f_N whose continuation is
/// f_n ~ Sum_{k=k_lo..k_hi} c_k a_{n-shift}^(k). The c_k are fitted on a
/// geometric grid over [window_lo, N] and the tail past N is summed exactly.
/// Every tail must converge: k_lo - deg(w) >= 2.
struct RegularizedSum {
  Real value = 0;
  Real partial = 0;
  Real tail = 0;
  Real tail_bound = 0;  ///< |tail - tail with two fewer fitted columns|
  std::map<int, Real> coefficients;
  Real condition = 0;
  double summand_exponent = 0;  ///< decay of |w(n) f_n| over the window
  bool summand_zero = false;    ///< summand vanishes on the window
};

RegularizedSum regularized_sum(const std::vector<Real>& f, long n0, int shift, const std::vector<Rational>& weight,
                               int k_lo, int k_hi, long window_lo, int grid_points = 160);

/// Sum_{n>=M} w(n) a_{n-shift}^(k), exact; w given by coefficients in n.
Rational weighted_tail(int k, int shift, const std::vector<Rational>& weight, long M);

}  // namespace fluct::basis

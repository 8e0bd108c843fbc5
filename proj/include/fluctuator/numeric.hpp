#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "fluctuator/error.hpp"

namespace fluct {

using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
/// 50 significant decimal digits; used for coefficient assembly and fits.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                           boost::multiprecision::et_off>;

long double to_ld(const Rational& q);
Real to_real(const Rational& q);
Real real_pi();

/// Parses "p/q", "-3", or a decimal like "0.25" exactly.
Rational parse_rational(const std::string& text);
/// Exact binary value of a double.
Rational rational_from_double(double v);

/// 17 significant digits, as written to CSV.
std::string format17(long double v);
std::string format17(const Real& v);

/// Compensated (Neumaier) summation.
template <class T>
class CompensatedSum {
 public:
  void add(T v) {
    T t = sum_ + v;
    if (abs_(sum_) >= abs_(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static T abs_(const T& v) { return v < 0 ? T(-v) : v; }
  T sum_{0};
  T comp_{0};
};

struct LsqResult {
  std::vector<Real> coef;
  Real condition;  ///< condition number of the column-scaled design
  Real rms_residual;
};

/// Least squares on columns (each a vector of the same length as y).
/// Columns are scaled to unit norm before a Householder QR.
LsqResult least_squares(const std::vector<std::vector<Real>>& columns, const std::vector<Real>& y);

/// Result of a log-log regression |v| ~ C n^{-exponent}.
struct DecayFit {
  double exponent = 0;  ///< minus the fitted slope
  double log_c = 0;
  int used = 0;          ///< points above the noise floor
  int total = 0;
  bool below_floor = false;  ///< every point at or under the floor
};

/// Fits log|v| against log n using the points with |v| > floor[i].
/// `floor` may be empty (no floor).
DecayFit decay_fit(const std::vector<double>& n, const std::vector<double>& v,
                   const std::vector<double>& floor = {});

/// Geometric grid of distinct integers in [lo, hi], at most `count` points.
std::vector<long> geometric_grid(long lo, long hi, int count);

}  // namespace fluct

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "fluctuator/numeric.hpp"

/// Formal series Sum_i c_i (1-s)^{i/2} plus a numeric remainder sequence,
/// with an advisory decay-class tag (m, r): |h_n| <~ log^r n / n^{(m+3)/2} and
/// h orthogonal to polynomials of degree <= m/2.
namespace fluct::halfpow {

inline constexpr long kDefaultLength = 8192;

struct ClassTag {
  int m = 0;
  int r = 0;
  bool operator==(const ClassTag&) const = default;
};

class HalfPowSeries {
 public:
  /// Zero series with coefficients n = 0..N.
  explicit HalfPowSeries(long N = kDefaultLength);
  static HalfPowSeries poly(const std::map<int, Real>& coeffs, long N = kDefaultLength);
  static HalfPowSeries half_power(int i, const Real& c, long N = kDefaultLength);
  static HalfPowSeries from_remainder(std::vector<long double> h, std::optional<ClassTag> tag);

  long length() const { return static_cast<long>(rem_.size()) - 1; }
  const std::map<int, Real>& poly_part() const { return poly_; }
  Real coefficient(int i) const;
  const std::vector<long double>& remainder() const { return rem_; }
  std::optional<ClassTag> tag() const { return tag_; }
  void set_tag(std::optional<ClassTag> t) { tag_ = t; }
  std::optional<int> min_index() const;

  /// [s^n] for n = 0..N: Sum_i c_i kappa(i, n) + h_n.
  std::vector<long double> extract() const;

  HalfPowSeries operator+(const HalfPowSeries& o) const;
  HalfPowSeries operator*(const Real& s) const;

 private:
  std::map<int, Real> poly_;
  std::vector<long double> rem_;
  std::optional<ClassTag> tag_;
};

/// Coefficients of (1-s)^{i/2}, n = 0..N (terminating for even i >= 0).
std::vector<long double> kappa(int i, long N);

/// Throws TruncationMismatch on different lengths.
HalfPowSeries mul(const HalfPowSeries& a, const HalfPowSeries& b);
/// Multiplication by (1-s)^{-1/2}.
HalfPowSeries div_sqrt(const HalfPowSeries& a);
/// exp(a) keeping half-indices <= m in the poly part. Throws NegativeIndex
/// if a has a (1-s)^{-1/2} part.
HalfPowSeries exp_poly(const HalfPowSeries& a, int m);
/// d/ds; the result has length N - 1.
HalfPowSeries derivative(const HalfPowSeries& a);

/// Tag rules for products and division by sqrt(1-s).
std::optional<ClassTag> product_tag(std::optional<int> ka, std::optional<ClassTag> ta, std::optional<int> kb,
                                    std::optional<ClassTag> tb);
ClassTag div_sqrt_tag(ClassTag t);

struct Classification {
  double exponent = 0;  ///< fitted decay exponent of |h_n|
  int m = 0;            ///< round(2 exponent - 3)
  int r = 0;            ///< fitted log power, clamped at 0
  double log_slope = 0;
  /// Sum_n n^k h_n for k = 0..floor(m/2), partial sums plus a power-law tail.
  std::vector<double> defects;
  /// Same sums normalised by Sum_n n^k |h_n|.
  std::vector<double> relative_defects;
  double horizon_norm = 0;  ///< max_n |h_n| n^{(m+3)/2} / max(1, log^r n)
  bool zero = false;        ///< remainder identically zero
};

/// Throws InsufficientLength below 256 terms. With `assume`, m and r are
/// taken from the tag (exponent and log_slope are still fitted) so the
/// moments and horizon norm test membership in that class.
Classification classify(const std::vector<long double>& h, std::optional<ClassTag> assume = std::nullopt);
/// Uses the series' tag when it has one.
Classification classify(const HalfPowSeries& a);

}  // namespace fluct::halfpow

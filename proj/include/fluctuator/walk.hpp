#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fluctuator/numeric.hpp"

namespace fluct::walk {

struct WalkTag {
  bool left_continuous = false;  ///< support in {-1, 0, 1, ...} and -1 charged
  bool symmetric = false;
};

/// Finite-support integer increment law with exact probabilities.
class LatticeLaw {
 public:
  /// Validates and caches moments. Zero atoms are dropped.
  /// Throws NonProbability or EmptySupport.
  static LatticeLaw make(const std::map<long, Rational>& atoms);

  const std::map<long, Rational>& atoms() const { return atoms_; }
  /// Same atoms as (step, probability) pairs in long double.
  const std::vector<std::pair<long, long double>>& float_atoms() const { return float_atoms_; }
  Rational prob(long v) const;

  long min_step() const { return atoms_.begin()->first; }
  long max_step() const { return atoms_.rbegin()->first; }
  long max_abs_step() const;

  Rational moment(int k) const;
  const Rational& mean() const { return cumulants_[0]; }
  const Rational& variance() const { return cumulants_[1]; }
  Real sigma() const;

  /// gamma_1..gamma_k (k <= 8).
  std::vector<Rational> cumulants(int k) const;

  /// gcd of differences of support points; 0 for a point mass.
  long span() const { return span_; }
  WalkTag tag() const;

  /// Law of -X.
  LatticeLaw reverse() const;

  /// Mean zero, positive variance and span one, else throws.
  void require_expansion_ready() const;
  void require_left_continuous() const;

  bool operator==(const LatticeLaw& other) const { return atoms_ == other.atoms_; }

 private:
  std::map<long, Rational> atoms_;
  std::vector<std::pair<long, long double>> float_atoms_;
  std::vector<Rational> cumulants_;
  long span_ = 0;
};

inline constexpr int kMaxCumulant = 8;

/// Parses {"atoms": {"-1": "1/4", ...}, "tolerance": 1e-12}. Numeric
/// (non-string) probabilities need "tolerance"; the law is then renormalized
/// when the total is within tolerance of 1.
LatticeLaw law_from_json_text(const std::string& text);
LatticeLaw load_law(const std::string& path);
std::string law_to_json_text(const LatticeLaw& law);

/// {-1: 1/4, 0: 1/2, 1: 1/4}
LatticeLaw lazy_walk();
/// {-1: 1/2, 0: 1/4, 2: 1/4}
LatticeLaw skew_walk();

}  // namespace fluct::walk

#include "fluctuator/numeric.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace fluct {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonProbability: return "NonProbability";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::ResourceCap: return "ResourceCap";
    case ErrorKind::TailNotDecayed: return "TailNotDecayed";
    case ErrorKind::NotLeftContinuous: return "NotLeftContinuous";
    case ErrorKind::SpanNotOne: return "SpanNotOne";
    case ErrorKind::MissingCumulant: return "MissingCumulant";
    case ErrorKind::FitUnstable: return "FitUnstable";
    case ErrorKind::FitDiagnostic: return "FitDiagnostic";
    case ErrorKind::TruncationMismatch: return "TruncationMismatch";
    case ErrorKind::NegativeIndex: return "NegativeIndex";
    case ErrorKind::InsufficientLength: return "InsufficientLength";
    case ErrorKind::DomainGap: return "DomainGap";
    case ErrorKind::GridTooShort: return "GridTooShort";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

Real to_real(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  return Real(num.str()) / Real(den.str());
}

long double to_ld(const Rational& q) { return to_real(q).convert_to<long double>(); }

Real real_pi() { return boost::math::constants::pi<Real>(); }

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw Error(ErrorKind::InvalidArgument, "empty number");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + raw + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  BigInt digits = 0;
  long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      if (seen_point) ++scale;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw Error(ErrorKind::InvalidArgument, "not a number: '" + raw + "'");
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E')
      throw Error(ErrorKind::InvalidArgument, "not a number: '" + raw + "'");
    try {
      std::size_t used = 0;
      exponent = std::stol(text.substr(pos + 1), &used);
      if (pos + 1 + used != text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad exponent in '" + raw + "'");
    }
  }
  exponent -= scale;
  Rational value(digits);
  BigInt ten_pow = 1;
  for (long i = 0; i < std::labs(exponent); ++i) ten_pow *= 10;
  if (exponent >= 0)
    value *= Rational(ten_pow);
  else
    value /= Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite probability");
  int exp2 = 0;
  const double mant = std::frexp(v, &exp2);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  const Rational r{BigInt(scaled)};
  const int shift = exp2 - 53;
  BigInt p = 1;
  for (int i = 0; i < std::abs(shift); ++i) p *= 2;
  return shift >= 0 ? Rational(r * Rational(p)) : Rational(r / Rational(p));
}

std::string format17(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

std::string format17(const Real& v) { return format17(v.convert_to<long double>()); }

LsqResult least_squares(const std::vector<std::vector<Real>>& columns, const std::vector<Real>& y) {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const auto k = static_cast<Eigen::Index>(columns.size());
  const auto m = static_cast<Eigen::Index>(y.size());
  if (k == 0 || m < k) throw Error(ErrorKind::InvalidArgument, "least squares needs rows >= columns > 0");
  Mat a(m, k);
  Vec b(m);
  std::vector<Real> scale(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (static_cast<Eigen::Index>(columns[c].size()) != m)
      throw Error(ErrorKind::InvalidArgument, "column length mismatch");
    Real norm = 0;
    for (Eigen::Index r = 0; r < m; ++r) norm += columns[c][r] * columns[c][r];
    norm = sqrt(norm);
    scale[c] = norm == 0 ? Real(1) : norm;
    for (Eigen::Index r = 0; r < m; ++r) a(r, c) = columns[c][r] / scale[c];
  }
  for (Eigen::Index r = 0; r < m; ++r) b(r) = y[r];
  Eigen::HouseholderQR<Mat> qr(a);
  Vec x = qr.solve(b);
  Mat rmat = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Mat> svd(rmat);
  const auto& sv = svd.singularValues();
  LsqResult out;
  out.condition = sv(k - 1) == 0 ? Real(std::numeric_limits<double>::infinity()) : Real(sv(0) / sv(k - 1));
  Vec resid = a * x - b;
  out.rms_residual = sqrt(resid.squaredNorm() / Real(m));
  out.coef.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) out.coef[c] = x(c) / scale[c];
  return out;
}

DecayFit decay_fit(const std::vector<double>& n, const std::vector<double>& v,
                   const std::vector<double>& floor) {
  DecayFit fit;
  fit.total = static_cast<int>(n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double a = std::fabs(v[i]);
    const double f = floor.empty() ? 0.0 : floor[i];
    if (!(a > f) || a == 0) continue;
    const double x = std::log(n[i]);
    const double yv = std::log(a);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++used;
  }
  fit.used = used;
  fit.below_floor = used == 0;
  if (used >= 2) {
    const double denom = used * sxx - sx * sx;
    const double slope = (used * sxy - sx * sy) / denom;
    fit.exponent = -slope;
    fit.log_c = (sy - slope * sx) / used;
  }
  return fit;
}

std::vector<long> geometric_grid(long lo, long hi, int count) {
  std::vector<long> out;
  if (hi < lo || count <= 0) return out;
  if (count == 1 || hi == lo) return {lo};
  const double r = std::log(static_cast<double>(hi) / static_cast<double>(lo));
  for (int i = 0; i < count; ++i) {
    const long v = std::lround(static_cast<double>(lo) * std::exp(r * i / (count - 1)));
    const long c = std::clamp(v, lo, hi);
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

}  // namespace fluct

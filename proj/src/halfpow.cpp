#include "fluctuator/halfpow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fluctuator/basis.hpp"

namespace fluct::halfpow {

namespace {

// Stand-in class index for an exact (remainder-free) series.
constexpr int kExactM = 1 << 20;

bool all_zero(const std::vector<long double>& v) {
  return std::all_of(v.begin(), v.end(), [](long double x) { return x == 0.0L; });
}

void require_same_length(const HalfPowSeries& a, const HalfPowSeries& b) {
  if (a.length() != b.length())
    throw Error(ErrorKind::TruncationMismatch,
                "lengths " + std::to_string(a.length()) + " and " + std::to_string(b.length()));
}

std::vector<long double> poly_extract(const std::map<int, Real>& poly, long N) {
  std::vector<long double> out(N + 1, 0.0L);
  for (const auto& [i, c] : poly) {
    const auto k = kappa(i, N);
    const long double cl = c.convert_to<long double>();
    for (long n = 0; n <= N; ++n) out[n] += cl * k[n];
  }
  return out;
}

// Truncated Cauchy product, n = 0..N.
std::vector<long double> convolve(const std::vector<long double>& a, const std::vector<long double>& b) {
  const std::size_t N = a.size() - 1;
  std::vector<long double> out(N + 1, 0.0L);
  for (std::size_t i = 0; i <= N; ++i) {
    if (a[i] == 0.0L) continue;
    const long double ai = a[i];
    for (std::size_t j = 0; i + j <= N; ++j) out[i + j] += ai * b[j];
  }
  return out;
}

void add_term(std::map<int, Real>& poly, int i, const Real& c) {
  Real& slot = poly[i];
  slot += c;
  if (slot == 0) poly.erase(i);
}

// Tag used in the product rule: an exact series behaves like an infinite class.
ClassTag effective(const std::optional<ClassTag>& t, bool exact) {
  if (exact) return {kExactM, 0};
  return t.value_or(ClassTag{kExactM, 0});
}

}  // namespace

std::vector<long double> kappa(int i, long N) {
  if (N < 0) throw Error(ErrorKind::InvalidArgument, "kappa needs N >= 0");
  return basis::binom_seq_float<long double>(static_cast<long double>(i) / 2.0L, static_cast<std::size_t>(N));
}

HalfPowSeries::HalfPowSeries(long N) : rem_(static_cast<std::size_t>(N) + 1, 0.0L) {
  if (N < 0) throw Error(ErrorKind::InvalidArgument, "series length must be >= 0");
}

HalfPowSeries HalfPowSeries::poly(const std::map<int, Real>& coeffs, long N) {
  HalfPowSeries s(N);
  for (const auto& [i, c] : coeffs)
    if (c != 0) s.poly_[i] = c;
  return s;
}

HalfPowSeries HalfPowSeries::half_power(int i, const Real& c, long N) { return poly({{i, c}}, N); }

HalfPowSeries HalfPowSeries::from_remainder(std::vector<long double> h, std::optional<ClassTag> tag) {
  if (h.empty()) throw Error(ErrorKind::InvalidArgument, "empty remainder");
  HalfPowSeries s(static_cast<long>(h.size()) - 1);
  s.rem_ = std::move(h);
  s.tag_ = tag;
  return s;
}

Real HalfPowSeries::coefficient(int i) const {
  const auto it = poly_.find(i);
  return it == poly_.end() ? Real(0) : it->second;
}

std::optional<int> HalfPowSeries::min_index() const {
  if (poly_.empty()) return std::nullopt;
  return poly_.begin()->first;
}

std::vector<long double> HalfPowSeries::extract() const {
  auto out = poly_extract(poly_, length());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += rem_[n];
  return out;
}

HalfPowSeries HalfPowSeries::operator+(const HalfPowSeries& o) const {
  require_same_length(*this, o);
  HalfPowSeries s(length());
  s.poly_ = poly_;
  for (const auto& [i, c] : o.poly_) add_term(s.poly_, i, c);
  for (std::size_t n = 0; n < rem_.size(); ++n) s.rem_[n] = rem_[n] + o.rem_[n];
  const bool ea = all_zero(rem_) && !tag_;
  const bool eb = all_zero(o.rem_) && !o.tag_;
  if (!(ea && eb)) {
    const ClassTag ta = effective(tag_, ea);
    const ClassTag tb = effective(o.tag_, eb);
    const ClassTag t{std::min(ta.m, tb.m), std::max(ta.r, tb.r)};
    if (t.m < kExactM) s.tag_ = t;
  }
  return s;
}

HalfPowSeries HalfPowSeries::operator*(const Real& f) const {
  HalfPowSeries s(length());
  if (f == 0) return s;
  for (const auto& [i, c] : poly_) s.poly_[i] = c * f;
  const long double fl = f.convert_to<long double>();
  for (std::size_t n = 0; n < rem_.size(); ++n) s.rem_[n] = rem_[n] * fl;
  s.tag_ = tag_;
  return s;
}

std::optional<ClassTag> product_tag(std::optional<int> ka, std::optional<ClassTag> ta, std::optional<int> kb,
                                    std::optional<ClassTag> tb) {
  const ClassTag a = ta.value_or(ClassTag{kExactM, 0});
  const ClassTag b = tb.value_or(ClassTag{kExactM, 0});
  const bool neg_a = ka && *ka < 0;
  const bool neg_b = kb && *kb < 0;
  if ((ka && *ka < -1) || (kb && *kb < -1) || (neg_a && neg_b)) return std::nullopt;
  ClassTag out;
  if (!neg_a && !neg_b) {
    out = {std::min(a.m, b.m), std::max(a.r, b.r)};
  } else {
    // h carries the (1-s)^{-1/2} term, g starts at a nonnegative index.
    const ClassTag h = neg_a ? a : b;
    const ClassTag g = neg_a ? b : a;
    const int gm = g.m >= kExactM ? kExactM : g.m - 1;
    out.m = std::min(h.m, gm);
    out.r = std::max(h.r, g.r) + ((g.m < kExactM && g.m % 2 != 0 && g.m - 1 <= h.m) ? 1 : 0);
  }
  if (out.m >= kExactM) return std::nullopt;
  return out;
}

ClassTag div_sqrt_tag(ClassTag t) { return {t.m - 1, t.r + (t.m % 2 != 0 ? 1 : 0)}; }

HalfPowSeries mul(const HalfPowSeries& a, const HalfPowSeries& b) {
  require_same_length(a, b);
  const long N = a.length();
  HalfPowSeries out(N);
  std::map<int, Real> poly;
  for (const auto& [i, ci] : a.poly_part())
    for (const auto& [j, cj] : b.poly_part()) add_term(poly, i + j, ci * cj);

  // Cross terms only; poly x poly is kept symbolic, so nothing cancels.
  const bool a_exact = all_zero(a.remainder());
  const bool b_exact = all_zero(b.remainder());
  std::vector<long double> rem(N + 1, 0.0L);
  if (!a_exact) {
    const auto r = convolve(a.remainder(), b.extract());
    for (long n = 0; n <= N; ++n) rem[n] += r[n];
  }
  if (!b_exact) {
    const auto r = convolve(poly_extract(a.poly_part(), N), b.remainder());
    for (long n = 0; n <= N; ++n) rem[n] += r[n];
  }
  out = HalfPowSeries::from_remainder(std::move(rem), std::nullopt);
  HalfPowSeries result = HalfPowSeries::poly(poly, N) + out;
  if (a_exact && b_exact && !a.tag() && !b.tag()) {
    result.set_tag(std::nullopt);
  } else {
    result.set_tag(product_tag(a.min_index(), a_exact && !a.tag() ? std::nullopt : std::optional(effective(a.tag(), false)),
                               b.min_index(), b_exact && !b.tag() ? std::nullopt : std::optional(effective(b.tag(), false))));
  }
  return result;
}

HalfPowSeries div_sqrt(const HalfPowSeries& a) {
  const long N = a.length();
  std::map<int, Real> poly;
  for (const auto& [i, c] : a.poly_part()) poly[i - 1] = c;
  auto result = HalfPowSeries::poly(poly, N);
  if (!all_zero(a.remainder()) || a.tag()) {
    auto rem = convolve(a.remainder(), kappa(-1, N));
    std::optional<ClassTag> t;
    if (a.tag()) t = div_sqrt_tag(*a.tag());
    result = result + HalfPowSeries::from_remainder(std::move(rem), std::nullopt);
    result.set_tag(t);
  }
  return result;
}

HalfPowSeries exp_poly(const HalfPowSeries& a, int m) {
  if (a.min_index() && *a.min_index() < 0)
    throw Error(ErrorKind::NegativeIndex, "exp of a series with a (1-s)^{-1/2} term");
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "exp_poly needs m >= 0");
  const long N = a.length();

  // exp(c_0) exp(Sum_{i>=1} c_i u^i) truncated at u^m, u = (1-s)^{1/2}.
  std::vector<Real> p(m + 1, Real(0));
  for (const auto& [i, c] : a.poly_part())
    if (i >= 1 && i <= m) p[i] = c;
  std::vector<Real> e(m + 1, Real(0));
  e[0] = 1;
  for (int k = 1; k <= m; ++k) {
    Real acc = 0;
    for (int j = 1; j <= k; ++j) acc += Real(j) * p[j] * e[k - j];
    e[k] = acc / Real(k);
  }
  const Real scale = exp(a.coefficient(0));
  std::map<int, Real> poly;
  for (int k = 0; k <= m; ++k)
    if (e[k] != 0) poly[k] = scale * e[k];

  // Coefficients of exp(A(s)) by n F_n = Sum_k k f_k F_{n-k}.
  const auto f = a.extract();
  std::vector<long double> F(N + 1, 0.0L);
  F[0] = std::exp(f[0]);
  for (long n = 1; n <= N; ++n) {
    CompensatedSum<long double> acc;
    for (long k = 1; k <= n; ++k) acc.add(static_cast<long double>(k) * f[k] * F[n - k]);
    F[n] = acc.value() / static_cast<long double>(n);
  }
  const auto pe = poly_extract(poly, N);
  std::vector<long double> rem(N + 1);
  for (long n = 0; n <= N; ++n) rem[n] = F[n] - pe[n];

  ClassTag t{m, 0};
  if (a.tag()) t = {std::min(m, a.tag()->m), a.tag()->r};
  auto result = HalfPowSeries::poly(poly, N) + HalfPowSeries::from_remainder(std::move(rem), std::nullopt);
  result.set_tag(t);
  return result;
}

HalfPowSeries derivative(const HalfPowSeries& a) {
  const long N = a.length();
  if (N < 1) throw Error(ErrorKind::InsufficientLength, "derivative needs N >= 1");
  std::map<int, Real> poly;
  for (const auto& [i, c] : a.poly_part())
    if (i != 0) poly[i - 2] = -Real(i) / 2 * c;
  auto result = HalfPowSeries::poly(poly, N - 1);
  std::vector<long double> rem(N);
  for (long n = 0; n < N; ++n) rem[n] = static_cast<long double>(n + 1) * a.remainder()[n + 1];
  if (!all_zero(rem) || a.tag()) {
    result = result + HalfPowSeries::from_remainder(std::move(rem), std::nullopt);
    if (a.tag()) result.set_tag(ClassTag{a.tag()->m - 2, a.tag()->r});
    else result.set_tag(std::nullopt);
  }
  return result;
}

Classification classify(const std::vector<long double>& h, std::optional<ClassTag> assume) {
  if (h.size() < 256) throw Error(ErrorKind::InsufficientLength, "classify needs at least 256 terms");
  const long N = static_cast<long>(h.size()) - 1;
  Classification c;
  if (all_zero(h)) {
    c.zero = true;
    return c;
  }
  // Values under 64 ulp of the largest term are rounding noise.
  long double peak = 0;
  for (long double v : h) peak = std::max(peak, std::fabs(v));
  const double noise = static_cast<double>(64.0L * std::numeric_limits<long double>::epsilon() * peak);
  const auto grid = geometric_grid(std::max(8L, N / 8), N, 64);
  std::vector<double> ns, vs, floor;
  for (long n : grid) {
    ns.push_back(static_cast<double>(n));
    vs.push_back(static_cast<double>(std::fabs(h[n])));
    floor.push_back(std::max(noise, 1e-300));
  }
  const DecayFit fit = decay_fit(ns, vs, floor);
  if (fit.below_floor) {
    c.zero = true;
    return c;
  }
  c.exponent = fit.exponent;
  c.m = static_cast<int>(std::lround(2.0 * fit.exponent - 3.0));
  double e = (c.m + 3) / 2.0;

  // Slope of log(|h_n| n^e) against log log n.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (vs[k] <= floor[k]) continue;
    const double x = std::log(std::log(ns[k]));
    const double y = std::log(vs[k]) + e * std::log(ns[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 0) c.log_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  c.r = std::max(0, static_cast<int>(std::lround(c.log_slope)));
  if (assume) {
    c.m = assume->m;
    c.r = assume->r;
    e = (c.m + 3) / 2.0;
  }

  for (long n = 1; n <= N; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double den = c.r > 0 ? std::max(1.0, std::pow(ln, c.r)) : 1.0;
    c.horizon_norm =
        std::max(c.horizon_norm, static_cast<double>(std::fabs(h[n])) * std::pow(static_cast<double>(n), e) / den);
  }

  // Tail past N from h_n ~ Sum_{p, i} beta n^{-p} log^i n, p in {e, e + 1/2, e + 1},
  // i <= r + 1, fitted over [N/4, N]; a pure power law misjudges log tails.
  const auto tail_grid = geometric_grid(std::max(8L, N / 4), N, 96);
  std::vector<std::pair<double, int>> shape;
  for (double p : {e, e + 0.5, e + 1.0})
    for (int i = 0; i <= c.r + 1; ++i) shape.emplace_back(p, i);
  std::vector<std::vector<Real>> cols(shape.size());
  std::vector<Real> y;
  for (long n : tail_grid) {
    const double ln = std::log(static_cast<double>(n));
    for (std::size_t s = 0; s < shape.size(); ++s)
      cols[s].push_back(Real(std::pow(static_cast<double>(n), -shape[s].first) * std::pow(ln, shape[s].second)));
    y.push_back(Real(h[n]));
  }
  std::vector<Real> beta(shape.size(), Real(0));
  if (tail_grid.size() > shape.size()) beta = least_squares(cols, y).coef;

  const double M = static_cast<double>(N) + 0.5;
  const double lM = std::log(M);
  for (int k = 0; k <= c.m / 2 && c.m >= 0; ++k) {
    CompensatedSum<long double> s, sa;
    for (long n = 0; n <= N; ++n) {
      const long double w = std::pow(static_cast<long double>(n), k) * h[n];
      s.add(w);
      sa.add(std::fabs(w));
    }
    // Int_M^inf x^{-q-1} log^i x dx = M^{-q} Sum_{j<=i} i!/(i-j)! log^{i-j} M / q^{j+1}
    double tail = 0;
    for (std::size_t t = 0; t < shape.size(); ++t) {
      const double q = shape[t].first - k - 1;
      if (q <= 0) continue;
      const int i = shape[t].second;
      double acc = 0, fall = 1;
      for (int j = 0; j <= i; ++j) {
        acc += fall * std::pow(lM, i - j) / std::pow(q, j + 1);
        fall *= i - j;
      }
      tail += beta[t].convert_to<double>() * std::pow(M, -q) * acc;
    }
    const double d = static_cast<double>(s.value()) + tail;
    c.defects.push_back(d);
    c.relative_defects.push_back(d / (static_cast<double>(sa.value()) + std::fabs(tail)));
  }
  return c;
}

Classification classify(const HalfPowSeries& a) { return classify(a.remainder(), a.tag()); }

}  // namespace fluct::halfpow

#include "fluctuator/taux.hpp"

#include <algorithm>
#include <string>

#include "fluctuator/conditioned.hpp"
#include "fluctuator/tau0.hpp"

namespace fluct::taux {

VLadder v_ladder(const walk::LatticeLaw& law, long x_max, int J, long N) {
  law.require_expansion_ready();
  if (J < 1 || J > 3) throw Error(ErrorKind::InvalidArgument, "v_ladder supports 1 <= J <= 3");
  if (x_max < 0) throw Error(ErrorKind::InvalidArgument, "x_max must be >= 0");
  const auto c = tau0::tau0_coeffs(law, N);
  VLadder out;
  out.route = "ladder";
  out.x_max = x_max;
  out.J = J;
  const Real e = exp(c.psi.psi0.value);
  for (int k = 0; k <= 4; ++k) out.m[k] = e * c.mu[k];

  const int L = 2 * J - 2;
  out.Qtilde.assign(static_cast<std::size_t>(L + 1), std::vector<Real>(static_cast<std::size_t>(x_max + 1), Real(0)));
  if (x_max >= 1) {
    const auto q = conditioned::q_ladder(law.reverse(), x_max - 1, std::max(L, 1), N, true);
    for (int l = 0; l <= L; ++l)
      for (long x = 1; x <= x_max; ++x) out.Qtilde[l][x] = out.Qtilde[l][x - 1] + q.q[l][x - 1];
  }
  auto m = [&](int i) { return out.m.at(static_cast<std::size_t>(i)); };
  for (int j = 1; j <= J; ++j) {
    const int idx = 2 * j - 3;
    std::vector<Real> v(static_cast<std::size_t>(x_max + 1));
    for (long x = 0; x <= x_max; ++x) {
      Real s = m(idx + 1);
      for (int k = -1; k <= idx; ++k) s += m(k + 1) * out.Qtilde[idx - k][x];
      v[x] = s;
    }
    out.V.push_back(std::move(v));
  }
  return out;
}

VLadder v_leftcont(const walk::LatticeLaw& law, long x_max, int J) {
  law.require_left_continuous();
  law.require_expansion_ready();
  if (J < 1) throw Error(ErrorKind::InvalidArgument, "v_leftcont needs J >= 1");
  const auto theta = edgeworth::theta_polys(law, 2 * (J - 1));
  VLadder out;
  out.route = "leftcont";
  out.x_max = x_max;
  out.J = J;
  for (int j = 1; j <= J; ++j) {
    const auto poly = theta[j - 1].reflected() * edgeworth::Polynomial::monomial(1, Real(2) / (2 * j - 1));
    std::vector<Real> v(static_cast<std::size_t>(x_max + 1));
    for (long x = 0; x <= x_max; ++x) v[x] = poly(Real(x));
    out.V.push_back(std::move(v));
  }
  return out;
}

Real apply_killed(const walk::LatticeLaw& law, const std::vector<Real>& f, long x) {
  Real s = 0;
  for (const auto& [v, p] : law.atoms()) {
    const long y = x + v;
    if (y <= 0) continue;
    if (y >= static_cast<long>(f.size()))
      throw Error(ErrorKind::DomainGap, "f(" + std::to_string(y) + ") is needed but not supplied");
    s += f[y] * to_real(p);
  }
  return s;
}

namespace {

// (P - I) f on 1..hi, where hi is the largest point whose neighbours are known.
std::vector<Real> harmonic_defect(const walk::LatticeLaw& law, const std::vector<Real>& f) {
  const long hi = static_cast<long>(f.size()) - 1 - std::max(0L, law.max_step());
  std::vector<Real> g(static_cast<std::size_t>(std::max(hi + 1, 1L)), Real(0));
  for (long x = 1; x <= hi; ++x) g[x] = apply_killed(law, f, x) - f[x];
  return g;
}

}  // namespace

Real polyharm_defect(const walk::LatticeLaw& law, const std::vector<Real>& f, int k, long x_lo, long x_hi) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "polyharm_defect needs k >= 1");
  if (x_lo < 1 || x_hi < x_lo) throw Error(ErrorKind::InvalidArgument, "bad x window");
  const long need = x_hi + k * std::max(0L, law.max_step());
  if (need >= static_cast<long>(f.size()))
    throw Error(ErrorKind::DomainGap, "f must reach x = " + std::to_string(need));
  std::vector<Real> g = f;
  for (int i = 0; i < k; ++i) g = harmonic_defect(law, g);
  Real worst = 0;
  for (long x = x_lo; x <= x_hi; ++x) worst = std::max(worst, Real(abs(g[x])));
  return worst;
}

SignReport v2_sign_check(const walk::LatticeLaw& law, const std::vector<Real>& V2, const std::vector<Real>& V1,
                         long x_lo, long x_hi) {
  const long need = x_hi + 2 * std::max(0L, law.max_step());
  if (need >= static_cast<long>(V2.size()) || x_hi >= static_cast<long>(V1.size()))
    throw Error(ErrorKind::DomainGap, "V_2 must reach x = " + std::to_string(need));
  const auto g = harmonic_defect(law, V2);
  Real num = 0, den = 0, v1max = 0;
  for (long x = x_lo; x <= x_hi; ++x) {
    num += g[x] * V1[x];
    den += V1[x] * V1[x];
    v1max = std::max(v1max, Real(abs(V1[x])));
  }
  SignReport r;
  r.coefficient = den == 0 ? Real(0) : Real(num / den);
  r.sign = r.coefficient >= 0 ? 1 : -1;
  Real worst = 0;
  for (long x = x_lo; x <= x_hi; ++x) worst = std::max(worst, Real(abs(g[x] - r.sign * V1[x])));
  r.relative_residual = v1max == 0 ? worst : Real(worst / v1max);
  const auto g2 = harmonic_defect(law, g);
  Real worst2 = 0;
  for (long x = x_lo; x <= x_hi; ++x) worst2 = std::max(worst2, Real(abs(g2[x])));
  r.second_defect_relative = v1max == 0 ? worst2 : Real(worst2 / v1max);
  return r;
}

PolyTailFit poly_tail_fit(const std::vector<long>& xs, const std::vector<Real>& values, int degree) {
  if (xs.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "grid and values differ in length");
  if (degree < 0) throw Error(ErrorKind::InvalidArgument, "degree must be >= 0");
  const std::size_t n = xs.size();
  const std::size_t half = n / 2;
  if (n < 8 || n - half < static_cast<std::size_t>(2 * (degree + 1)))
    throw Error(ErrorKind::GridTooShort, "need at least " + std::to_string(2 * (degree + 1)) +
                                             " points in the upper half of the grid");
  // fit in t = (x - c) / h for conditioning
  const Real x0(xs[half]), x1(xs[n - 1]);
  const Real c = (x0 + x1) / 2;
  const Real h = std::max(Real((x1 - x0) / 2), Real(1));
  std::vector<std::vector<Real>> cols(static_cast<std::size_t>(degree + 1));
  std::vector<Real> y;
  for (std::size_t i = half; i < n; ++i) {
    const Real t = (Real(xs[i]) - c) / h;
    Real tp = 1;
    for (int d = 0; d <= degree; ++d, tp *= t) cols[d].push_back(tp);
    y.push_back(values[i]);
  }
  const auto fit = least_squares(cols, y);
  const edgeworth::Polynomial t(std::vector<Real>{-c / h, Real(1) / h});
  edgeworth::Polynomial p, tp(std::vector<Real>{Real(1)});
  for (int d = 0; d <= degree; ++d) {
    p = p + tp * fit.coef[d];
    tp = tp * t;
  }
  PolyTailFit out;
  out.poly = p;
  out.xs = xs;
  Real first_half = 0;
  const std::size_t q3 = n - n / 4;
  for (std::size_t i = 0; i < n; ++i) {
    const Real r = values[i] - p(Real(xs[i]));
    out.residuals.push_back(r);
    out.scale = std::max(out.scale, Real(abs(values[i])));
    if (i < half) first_half = std::max(first_half, Real(abs(r)));
    if (i >= q3) out.last_quartile_max = std::max(out.last_quartile_max, Real(abs(r)));
  }
  out.decaying = out.last_quartile_max <= first_half;
  out.pass = out.last_quartile_max <= out.scale * Real("1e-3");
  return out;
}

}  // namespace fluct::taux

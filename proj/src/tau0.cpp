#include "fluctuator/tau0.hpp"

#include <algorithm>
#include <cmath>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"

namespace fluct::tau0 {

namespace {

constexpr int kTailColumns = 10;
constexpr double kMinSummandDecay = 1.2;

PsiValue regularized(const std::vector<Real>& g, const std::vector<Rational>& weight, int k_lo, const char* name) {
  const long N = static_cast<long>(g.size()) - 1;
  const auto s = basis::regularized_sum(g, 1, 1, weight, k_lo, k_lo + kTailColumns - 1, N / 4);
  PsiValue v;
  v.value = s.value;
  v.tail = s.tail;
  v.tail_bound = s.tail_bound;
  v.summand_exponent = s.summand_exponent;
  v.summand_zero = s.summand_zero;
  if (!s.summand_zero && s.summand_exponent < kMinSummandDecay)
    throw Error(ErrorKind::TailNotDecayed, std::string(name) + " summand decays like n^-" +
                                               std::to_string(s.summand_exponent) + "; theta inputs look wrong");
  if (s.summand_zero) v.value = s.partial;
  return v;
}

}  // namespace

PsiScalars psi_scalars_from_sequence(const std::vector<Real>& f, const Real& theta1, const Real& theta2) {
  const long N = static_cast<long>(f.size()) - 1;
  if (N < 512) throw Error(ErrorKind::InsufficientLength, "psi sums need a horizon of at least 512");
  const auto a2 = basis::a_seq_float<Real>(2, static_cast<std::size_t>(N));
  const auto a3 = basis::a_seq_float<Real>(3, static_cast<std::size_t>(N));
  std::vector<Real> g1(N + 1, Real(0)), g2(N + 1, Real(0));
  for (long n = 1; n <= N; ++n) {
    g1[n] = f[n] - theta1 * a2[n - 1];
    g2[n] = g1[n] - theta2 * a3[n - 1];
  }
  std::vector<Real> f0 = f;
  f0[0] = 0;
  PsiScalars out;
  out.horizon = N;
  out.psi0 = regularized(f0, {Rational(1)}, 2, "psi_0");
  out.psi1 = regularized(g1, {Rational(0), Rational(-1)}, 3, "psi_1");
  out.psi2 = regularized(g2, {Rational(0), Rational(-1, 2), Rational(1, 2)}, 4, "psi_2");
  return out;
}

std::array<Real, 5> mu_coeffs(const Real& theta1, const Real& theta2, const Real& psi1, const Real& psi2) {
  const Real q3 = theta2 - theta1;
  const Real t2 = theta1 * theta1;
  std::array<Real, 5> mu;
  mu[0] = 1;
  mu[1] = theta1;
  mu[2] = psi1 + t2 / 2;
  mu[3] = q3 + theta1 * psi1 + t2 * theta1 / 6;
  mu[4] = psi2 + theta1 * q3 + psi1 * psi1 / 2 + t2 * psi1 / 2 + t2 * t2 / 24;
  return mu;
}

std::array<Real, 5> mu_coeffs_series(const Real& theta1, const Real& theta2, const Real& psi1, const Real& psi2) {
  const auto q = halfpow::HalfPowSeries::poly({{1, theta1}, {2, psi1}, {3, theta2 - theta1}, {4, psi2}}, 64);
  const auto e = halfpow::exp_poly(q, 4);
  std::array<Real, 5> mu;
  for (int i = 0; i <= 4; ++i) mu[i] = e.coefficient(i);
  return mu;
}

std::vector<Real> delta_over_n(const walk::LatticeLaw& law, long N, bool strict) {
  const auto delta = oracle::delta_seq<long double>(law, N, strict);
  std::vector<Real> f(delta.size(), Real(0));
  for (std::size_t n = 1; n < delta.size(); ++n) f[n] = Real(delta[n]) / static_cast<long>(n);
  return f;
}

namespace {

Tau0Coefficients assemble(const std::vector<Real>& f, const edgeworth::CdfExpansionAtZero& th, bool strict) {
  Tau0Coefficients c;
  c.strict = strict;
  c.theta_mode = th.mode;
  c.theta1 = th.theta1;
  c.theta2 = th.theta2;
  c.psi = psi_scalars_from_sequence(f, c.theta1, c.theta2);
  c.mu = mu_coeffs(c.theta1, c.theta2, c.psi.psi1.value, c.psi.psi2.value);
  const Real e = exp(c.psi.psi0.value);
  c.nu = {e * c.mu[0], e * c.mu[2], e * c.mu[4]};
  const Real b0 = c.psi.psi0.tail_bound, b1 = c.psi.psi1.tail_bound, b2 = c.psi.psi2.tail_bound;
  c.nu_error = {abs(c.nu[0]) * b0, abs(c.nu[1]) * b0 + e * b1, abs(c.nu[2]) * b0 + e * (b2 + abs(c.mu[2]) * b1)};
  c.horizon = static_cast<long>(f.size()) - 1;
  return c;
}

}  // namespace

Tau0Coefficients tau0_coeffs_from_sequence(const std::vector<Real>& f, bool strict) {
  return assemble(f, edgeworth::delta_coeffs_from_sequence(f), strict);
}

Tau0Coefficients tau0_coeffs(const walk::LatticeLaw& law, long N, edgeworth::DeltaMode mode, bool strict) {
  law.require_expansion_ready();
  const auto f = delta_over_n(law, N, strict);
  if (strict || mode == edgeworth::DeltaMode::Fit) return tau0_coeffs_from_sequence(f, strict);
  return assemble(f, edgeworth::delta_coeffs(law, mode), strict);
}

std::vector<Real> evaluate_tau0(const Tau0Coefficients& c, const std::vector<long>& n_grid, int terms) {
  if (terms < 1 || terms > 3) throw Error(ErrorKind::InvalidArgument, "tau0 expansion has 1 to 3 terms");
  long n_max = 0;
  for (long n : n_grid) {
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative n");
    n_max = std::max(n_max, n);
  }
  std::vector<std::vector<Real>> a;
  for (int j = 1; j <= terms; ++j) a.push_back(basis::a_seq_float<Real>(j, static_cast<std::size_t>(n_max)));
  std::vector<Real> out;
  for (long n : n_grid) {
    Real v = 0;
    for (int j = 0; j < terms; ++j) v += c.nu[j] * a[j][n];
    out.push_back(v);
  }
  return out;
}

DecayLadder decay_ladder(const Tau0Coefficients& c, const std::vector<long double>& tail, long n_lo, long n_hi) {
  if (n_hi >= static_cast<long>(tail.size()) || n_lo < 1 || n_lo >= n_hi)
    throw Error(ErrorKind::InvalidArgument, "decay window outside the tail data");
  const auto grid = geometric_grid(n_lo, n_hi, 60);
  std::array<std::vector<long double>, 3> a;
  for (int j = 1; j <= 3; ++j) a[j - 1] = basis::a_seq_float<long double>(j, static_cast<std::size_t>(n_hi));
  DecayLadder out;
  for (int t = 1; t <= 3; ++t) {
    const auto approx = evaluate_tau0(c, grid, t);
    std::vector<double> ns, errs, floor;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const long n = grid[i];
      const long double dp = tail[n];
      const double e = static_cast<double>(std::fabs(dp - approx[i].convert_to<long double>()));
      long double unresolved = 1e-15L * dp;
      for (int j = 0; j < t; ++j) unresolved += c.nu_error[j].convert_to<long double>() * std::fabs(a[j][n]);
      ns.push_back(static_cast<double>(n));
      errs.push_back(e);
      floor.push_back(static_cast<double>(unresolved));
      out.max_error[t - 1] = std::max(out.max_error[t - 1], e);
    }
    const auto fit = decay_fit(ns, errs, floor);
    out.at_floor[t - 1] = fit.used < 8;
    out.exponent[t - 1] = fit.exponent;
  }
  return out;
}

HalfPowRoute halfpow_route(const Tau0Coefficients& c, const std::vector<Real>& f, const std::vector<long double>& tail) {
  const long N = static_cast<long>(f.size()) - 1;
  if (static_cast<long>(tail.size()) != N + 1)
    throw Error(ErrorKind::TruncationMismatch, "tail and Delta sequences differ in length");
  using halfpow::HalfPowSeries;
  const auto poly = HalfPowSeries::poly({{0, c.psi.psi0.value},
                                         {1, c.theta1},
                                         {2, c.psi.psi1.value},
                                         {3, c.theta2 - c.theta1},
                                         {4, c.psi.psi2.value}},
                                        N);
  const auto pe = poly.extract();
  std::vector<long double> r(N + 1);
  for (long n = 0; n <= N; ++n) r[n] = (n == 0 ? 0.0L : f[n].convert_to<long double>()) - pe[n];
  HalfPowRoute out;
  out.q_remainder = halfpow::classify(r);
  const auto q = poly + HalfPowSeries::from_remainder(std::move(r), halfpow::ClassTag{4, 0});
  const auto e = halfpow::div_sqrt(halfpow::exp_poly(q, 4));
  out.nu = {e.coefficient(-1), e.coefficient(1), e.coefficient(3)};
  const auto x = e.extract();
  for (long n = 0; n <= N; ++n) out.extract_gap = std::max(out.extract_gap, static_cast<double>(std::fabs(x[n] - tail[n])));
  out.e_remainder = halfpow::classify(e);
  return out;
}

}  // namespace fluct::tau0

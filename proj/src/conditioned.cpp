#include "fluctuator/conditioned.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"

namespace fluct::conditioned {

namespace {

constexpr int kTailColumns = 10;
// Wrong theta input leaves an n^{-1/2} summand. Large x stays pre-asymptotic
// (n ~ x^2 / sigma^2) over the window, so the threshold sits below 3/2.
constexpr double kMinSummandDecay = 1.0;

std::vector<Real> column(const std::vector<std::vector<long double>>& table, long x) {
  std::vector<Real> out;
  out.reserve(table.size());
  for (const auto& row : table) out.emplace_back(row[static_cast<std::size_t>(x)]);
  return out;
}

// Coefficients in n of ((-1)^j / j!) (n-1)(n-2)...(n-j).
std::vector<Rational> falling_weight(int j) {
  std::vector<Rational> w{Rational(1)};
  for (int l = 1; l <= j; ++l) {
    std::vector<Rational> next(w.size() + 1, Rational(0));
    for (std::size_t i = 0; i < w.size(); ++i) {
      next[i + 1] += w[i];
      next[i] -= w[i] * l;
    }
    w = std::move(next);
  }
  Rational scale = 1;
  for (int l = 2; l <= j; ++l) scale *= l;
  scale = Rational(j % 2 == 0 ? 1 : -1) / scale;
  for (auto& c : w) c *= scale;
  return w;
}

}  // namespace

Tables make_tables(const walk::LatticeLaw& law, long N, long x_max, bool strict) {
  if (x_max < 0) throw Error(ErrorKind::InvalidArgument, "x_max must be >= 0");
  Tables t;
  t.N = N;
  t.x_max = x_max;
  t.strict = strict;
  t.pmf = oracle::pmf_table<long double>(law, N, 0, x_max);
  t.b = oracle::conditioned_table<long double>(law, N, strict, x_max);
  return t;
}

std::vector<PsiX> psi_x_range(const walk::LatticeLaw& law, const Tables& tables, int j_max) {
  if (j_max < -1) throw Error(ErrorKind::InvalidArgument, "j_max must be >= -1");
  const auto theta = edgeworth::theta_polys(law, 2 * ((j_max + 1) / 2));
  const long N = tables.N;
  std::vector<std::vector<Real>> a;  // a[i] = a^(i+1)
  for (int i = 0; i <= j_max / 2; ++i) a.push_back(basis::a_seq_float<Real>(i + 1, static_cast<std::size_t>(N)));

  std::vector<PsiX> out;
  for (long x = 0; x <= tables.x_max; ++x) {
    PsiX p;
    p.x = x;
    const Real xr(x);
    for (int j = -1; j <= j_max; j += 2) p.psi[j] = theta[(j + 1) / 2](xr);
    const auto pn = column(tables.pmf, x);
    for (int j = 0; j <= j_max; j += 2) {
      const int jj = j / 2;
      std::vector<Real> th;
      for (int i = 0; i <= jj; ++i) th.push_back(theta[i](xr));
      std::vector<Real> f(N + 1, Real(0));
      for (long n = 1; n <= N; ++n) {
        Real v = pn[n];
        for (int i = 0; i <= jj; ++i) v -= th[i] * a[i][n - 1];
        f[n] = v;
      }
      const auto s = basis::regularized_sum(f, 1, 1, falling_weight(jj), jj + 2, jj + 1 + kTailColumns, N / 4);
      if (!s.summand_zero && s.summand_exponent < kMinSummandDecay)
        throw Error(ErrorKind::TailNotDecayed, "psi_" + std::to_string(j) + "(" + std::to_string(x) +
                                                   ") summand decays like n^-" + std::to_string(s.summand_exponent));
      p.psi[j] = s.summand_zero ? s.partial : s.value;
      p.tail_bound[j] = s.tail_bound;
      p.summand_exponent[j] = s.summand_exponent;
    }
    out.push_back(std::move(p));
  }
  return out;
}

PsiX psi_x(const walk::LatticeLaw& law, long x, int j_max, long N) {
  const auto t = make_tables(law, N, x, false);
  return psi_x_range(law, t, j_max).back();
}

Real QLadder::V(long x) const {
  Real v = 1;
  if (strict) {
    for (long z = 0; z <= x; ++z) v += q[0].at(z);
  } else {
    for (long z = 1; z < x; ++z) v += q[0].at(z);
  }
  return v;
}

QLadder q_ladder(const walk::LatticeLaw& law, const Tables& tables, int L) {
  law.require_expansion_ready();
  if (L < 1) throw Error(ErrorKind::InvalidArgument, "q ladder needs L >= 1");
  const long X = tables.x_max;
  const long N = tables.N;
  const long x_lo = tables.strict ? 0 : 1;
  QLadder out;
  out.strict = tables.strict;
  out.x_max = X;
  out.L = L;
  out.q.assign(static_cast<std::size_t>(L + 1), std::vector<Real>(static_cast<std::size_t>(X + 1), Real(0)));
  out.q0_tail_bound.assign(static_cast<std::size_t>(X + 1), Real(0));

  for (long x = x_lo; x <= X; ++x) {
    auto f = column(tables.b, x);
    f[0] = 0;
    const auto s = basis::regularized_sum(f, 1, 0, {Rational(1)}, 2, 1 + kTailColumns, N / 4);
    if (!s.summand_zero && s.summand_exponent < kMinSummandDecay)
      throw Error(ErrorKind::TailNotDecayed, "b_n(" + std::to_string(x) + ") decays like n^-" +
                                                 std::to_string(s.summand_exponent));
    out.q[0][x] = s.value;
    out.q0_tail_bound[x] = s.tail_bound;
  }

  const auto psi = psi_x_range(law, tables, L - 2);
  out.theta0 = psi.front().psi.at(-1);
  for (long x = x_lo; x <= X; ++x) out.q[1][x] = -2 * out.theta0 * out.V(x);

  for (int l = 2; l <= L; ++l) {
    for (long x = x_lo; x <= X; ++x) {
      Real rhs = psi[x].psi.at(l - 2);
      const long y_lo = tables.strict ? 0 : 1;
      const long y_hi = tables.strict ? x : x - 1;
      for (long y = y_lo; y <= y_hi; ++y)
        for (int j = -1; j <= l - 2; ++j) rhs += psi[y].psi.at(j) * out.q[l - 2 - j][x - y];
      out.q[l][x] = -2 * rhs / l;
    }
  }
  return out;
}

QLadder q_ladder(const walk::LatticeLaw& law, long x_max, int L, long N, bool strict) {
  return q_ladder(law, make_tables(law, N, x_max, strict), L);
}

std::vector<Real> u_expansion_eval(const QLadder& ladder, long x, const std::vector<long>& n_grid, int J) {
  if (J < 1 || 2 * J - 1 > ladder.L) throw Error(ErrorKind::InvalidArgument, "ladder too short for J terms");
  long n_max = 0;
  for (long n : n_grid) n_max = std::max(n_max, n);
  std::vector<std::vector<Real>> a;
  for (int j = 1; j <= J; ++j) a.push_back(basis::a_seq_float<Real>(j + 1, static_cast<std::size_t>(n_max)));
  std::vector<Real> out;
  for (long n : n_grid) {
    Real v = 0;
    for (int j = 1; j <= J; ++j) v += ladder.U(j, x) * a[j - 1][n];
    out.push_back(v);
  }
  return out;
}

std::vector<Real> gf_fit(const std::vector<long double>& b_of_n, int terms, double ridge, int nodes) {
  if (terms < 1 || nodes < terms) throw Error(ErrorKind::InvalidArgument, "gf_fit needs nodes >= terms >= 1");
  const double lo = 0.9, hi = 0.999;
  std::vector<std::vector<Real>> cols(terms);
  std::vector<Real> y;
  for (int k = 0; k < nodes; ++k) {
    const double c = std::cos((2.0 * k + 1) * std::numbers::pi / (2.0 * nodes));
    const long double s = 0.5L * (lo + hi) + 0.5L * (hi - lo) * c;
    long double sn = 1, acc = 0;
    for (std::size_t n = 0; n < b_of_n.size(); ++n, sn *= s) acc += b_of_n[n] * sn;
    y.emplace_back(acc);
    const long double u = std::sqrt(1.0L - s);
    long double up = 1;
    for (int i = 0; i < terms; ++i, up *= u) cols[i].emplace_back(up);
  }
  // ridge rows
  const Real lam = sqrt(Real(ridge));
  for (int r = 0; r < terms; ++r) {
    y.emplace_back(0);
    for (int i = 0; i < terms; ++i) cols[i].push_back(i == r ? lam : Real(0));
  }
  return least_squares(cols, y).coef;
}

}  // namespace fluct::conditioned

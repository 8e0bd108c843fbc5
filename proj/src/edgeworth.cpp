#include "fluctuator/edgeworth.hpp"

#include <cmath>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"

namespace fluct::edgeworth {

Polynomial::Polynomial(std::vector<Real> c) : c_(std::move(c)) { trim(); }

Polynomial Polynomial::monomial(int power, const Real& coef) {
  std::vector<Real> c(static_cast<std::size_t>(power + 1), Real(0));
  c[power] = coef;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Real Polynomial::operator()(const Real& x) const {
  Real v = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

long double Polynomial::eval(long double x) const { return (*this)(Real(x)).convert_to<long double>(); }

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Real> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::reflected() const {
  std::vector<Real> d = c_;
  for (std::size_t i = 1; i < d.size(); i += 2) d[i] = -d[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<Real> d(std::max(c_.size(), o.c_.size()), Real(0));
  for (std::size_t i = 0; i < c_.size(); ++i) d[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) d[i] += o.c_[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * Real(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Real> d(c_.size() + o.c_.size() - 1, Real(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator*(const Real& s) const {
  std::vector<Real> d = c_;
  for (auto& v : d) v *= s;
  return Polynomial(std::move(d));
}

GaussPoly GaussPoly::derivative() const { return {poly.derivative() - Polynomial::monomial(1, Real(1)) * poly}; }

Real GaussPoly::operator()(const Real& x) const {
  return poly(x) * exp(-x * x / 2) / sqrt(2 * real_pi());
}

Polynomial hermite(int m) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "hermite needs m >= 0");
  // H_{m+1} = x H_m - m H_{m-1}
  Polynomial prev({Real(1)});
  if (m == 0) return prev;
  Polynomial cur({Real(0), Real(1)});
  const Polynomial x = Polynomial::monomial(1, Real(1));
  for (int k = 1; k < m; ++k) {
    Polynomial next = x * cur - prev * Real(k);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::vector<int>> partitions(int nu) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(nu), 0);
  // depth-first over part sizes nu, nu-1, ..., 1
  auto rec = [&](auto&& self, int part, int remaining) -> void {
    if (part == 0) {
      if (remaining == 0) out.push_back(k);
      return;
    }
    for (int c = remaining / part; c >= 0; --c) {
      k[part - 1] = c;
      self(self, part - 1, remaining - c * part);
    }
    k[part - 1] = 0;
  };
  if (nu == 0) return {{}};
  rec(rec, nu, nu);
  return out;
}

namespace {

Real factorial(int n) {
  Real f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Product over m of (1/k_m!) (gamma_{m+2} / ((m+2)! sigma^{m+2}))^{k_m}, and s = Sum k_m.
Real partition_weight(const std::vector<int>& k, const std::vector<Rational>& cumulants, const Real& sigma, int* s) {
  Real w = 1;
  *s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    const int m = static_cast<int>(i) + 1;
    const Real base = to_real(cumulants[m + 1]) / (factorial(m + 2) * pow(sigma, m + 2));
    w *= pow(base, k[i]) / factorial(k[i]);
    *s += k[i];
  }
  return w;
}

void require_cumulants(int order, const std::vector<Rational>& cumulants) {
  if (static_cast<int>(cumulants.size()) < order)
    throw Error(ErrorKind::MissingCumulant, "need cumulants up to order " + std::to_string(order) + ", have " +
                                                std::to_string(cumulants.size()));
}

GaussPoly partition_sum(int nu, const std::vector<Rational>& cumulants, const Real& sigma, int hermite_shift) {
  if (nu < 1) throw Error(ErrorKind::InvalidArgument, "Edgeworth terms start at nu = 1");
  require_cumulants(nu + 2, cumulants);
  Polynomial sum;
  for (const auto& k : partitions(nu)) {
    int s = 0;
    const Real w = partition_weight(k, cumulants, sigma, &s);
    sum = sum + hermite(nu + 2 * s + hermite_shift) * w;
  }
  return {sum};
}

}  // namespace

GaussPoly edgeworth_Q(int nu, const std::vector<Rational>& cumulants, const Real& sigma) {
  auto g = partition_sum(nu, cumulants, sigma, -1);
  g.poly = g.poly * Real(-1);
  return g;
}

GaussPoly local_edgeworth_q(int nu, const std::vector<Rational>& cumulants, const Real& sigma) {
  return partition_sum(nu, cumulants, sigma, 0);
}

Rational s_nu_zero(int nu) {
  if (nu < 2) throw Error(ErrorKind::InvalidArgument, "S_nu(0) needs nu >= 2");
  if (nu % 2 == 1) return 0;
  // 2 zeta(2k) / (2 pi)^{2k} = (-1)^{k+1} B_{2k} / (2k)!
  const int k = nu / 2;
  const auto b = basis::bernoulli_numbers(nu);
  Rational f = 1;
  for (int i = 2; i <= nu; ++i) f *= i;
  Rational v = b[nu] / f;
  return k % 2 == 1 ? v : Rational(-v);
}

std::vector<Polynomial> local_power_ladder(const walk::LatticeLaw& law, int L) {
  law.require_expansion_ready();
  if (L < 0) throw Error(ErrorKind::InvalidArgument, "ladder order must be >= 0");
  const auto cum = law.cumulants(std::min(walk::kMaxCumulant, 2 * L + 2));
  require_cumulants(2 * L + 2, cum);
  const Real sigma = law.sigma();
  const Real two_sigma2 = 2 * sigma * sigma;
  const Real pre = 1 / (sigma * sqrt(2 * real_pi()));
  std::vector<Polynomial> out;
  for (int ell = 0; ell <= L; ++ell) {
    std::vector<Real> c(static_cast<std::size_t>(2 * ell + 1), Real(0));
    for (int nu = 0; nu <= 2 * ell; ++nu) {
      for (const auto& k : partitions(nu)) {
        int s = 0;
        const Real w = nu == 0 ? Real(1) : partition_weight(k, cum, sigma, &s);
        const int m = nu + 2 * s;
        for (int kk = 0; kk <= m / 2; ++kk) {
          const int a = m - 2 * kk;
          const int twice_l = 2 * ell - nu - a;
          if (twice_l < 0 || twice_l % 2 != 0) continue;
          const int l = twice_l / 2;
          // w_{kk,m} coefficient of x^a, times d_l
          Real term = factorial(m) / (factorial(kk) * factorial(a) * pow(Real(2), kk) * pow(sigma, a));
          if (kk % 2 == 1) term = -term;
          Real d = 1 / (factorial(l) * pow(two_sigma2, l));
          if (l % 2 == 1) d = -d;
          c[static_cast<std::size_t>(a + 2 * l)] += pre * w * term * d;
        }
      }
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<Polynomial> theta_polys(const walk::LatticeLaw& law, int r) {
  law.require_expansion_ready();
  if (r < 0) throw Error(ErrorKind::InvalidArgument, "theta_polys needs r >= 0");
  const int J = r / 2;
  const auto ladder = local_power_ladder(law, J);
  std::vector<Polynomial> theta(static_cast<std::size_t>(J + 1));
  for (int L = 0; L <= J; ++L) {
    // n^{-(L+1/2)} = Sum_{k >= L+1} g_k a_{n-1}^(k)
    const auto conv = basis::power_to_basis_exact(L + 1, J + 1, 1);
    for (int j = L; j <= J; ++j) theta[j] = theta[j] + ladder[L] * conv.value(j + 1);
  }
  return theta;
}

std::string to_string(DeltaMode mode) {
  switch (mode) {
    case DeltaMode::Analytic: return "analytic";
    case DeltaMode::Fit: return "fit";
    case DeltaMode::NonLattice: return "nonlattice";
  }
  return "?";
}

namespace {

constexpr int kFitColumns = 8;

CdfExpansionAtZero analytic_delta(const walk::LatticeLaw& law, bool lattice) {
  law.require_expansion_ready();
  const int J = 2;  // theta_1, theta_2
  const auto cum = law.cumulants(2 * J + 1);
  const Real sigma = law.sigma();
  CdfExpansionAtZero out;
  out.mode = lattice ? DeltaMode::Analytic : DeltaMode::NonLattice;
  // P(S_n <= 0) - 1/2 over odd nu (even nu vanish by parity)
  std::map<int, GaussPoly> Q;
  for (int nu = 1; nu <= 2 * J - 1; ++nu) Q[nu] = edgeworth_Q(nu, cum, sigma);
  for (int nu = 1; nu <= 2 * J - 1; nu += 2) {
    Real c = Q[nu](Real(0));
    if (lattice) {
      // midpoint lattice corrections: delta_mu sigma^{-mu} S_mu(0) Q_j^{(mu)}(0), mu + j = nu
      for (int mu = 2; mu < nu; mu += 2) {
        const int j = nu - mu;
        GaussPoly d = Q[j];
        for (int i = 0; i < mu; ++i) d = d.derivative();
        const int sign = (mu % 4 == 1 || mu % 4 == 2) ? 1 : -1;
        c += Real(sign) * to_real(s_nu_zero(mu)) / pow(sigma, mu) * d(Real(0));
      }
    }
    out.cdf_power[nu] = c;
  }
  // Delta_n / n on n^{-(k-1/2)}, k = 2..J+1
  std::map<int, Real> power;
  for (int k = 2; k <= J + 1; ++k) power[k] = -out.cdf_power[2 * k - 3];
  if (lattice) {
    // the midpoint misses half the atom at 0: P(S_n <= 0) = midpoint + p_n(0)/2
    const auto ladder = local_power_ladder(law, J - 1);
    for (int L = 0; L <= J - 1; ++L) {
      const Real p0 = ladder[L](Real(0));
      out.cdf_power[2 * L + 1] += p0 / 2;
      power[L + 2] -= p0 / 2;
    }
  }
  std::map<int, Real> theta;
  for (const auto& [k, v] : power) {
    const auto conv = basis::power_to_basis_exact(k, J + 1, 1);
    for (int i = k; i <= J + 1; ++i) theta[i] += v * conv.value(i);
  }
  out.theta1 = theta[2];
  out.theta2 = theta[3];
  return out;
}

}  // namespace

CdfExpansionAtZero delta_coeffs_from_sequence(const std::vector<Real>& y) {
  const long N = static_cast<long>(y.size()) - 1;
  if (N < 512) throw Error(ErrorKind::InsufficientLength, "delta fit needs a horizon of at least 512");
  const auto grid = geometric_grid(N / 8, N, 200);
  std::vector<std::vector<Real>> cols(kFitColumns);
  std::vector<std::vector<Real>> seqs;
  for (int k = 2; k < 2 + kFitColumns; ++k) seqs.push_back(basis::a_seq_float<Real>(k, static_cast<std::size_t>(N)));
  std::vector<Real> rhs;
  for (long n : grid) {
    rhs.push_back(y[n]);
    for (int c = 0; c < kFitColumns; ++c) cols[c].push_back(seqs[c][n - 1]);
  }
  const auto fit = least_squares(cols, rhs);
  const auto two = least_squares({cols[0], cols[1]}, rhs);
  CdfExpansionAtZero out;
  out.mode = DeltaMode::Fit;
  out.theta1 = fit.coef[0];
  out.theta2 = fit.coef[1];
  out.condition = two.condition;
  out.n_fit = N;
  std::vector<double> ns, rs, floor;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ns.push_back(static_cast<double>(grid[i]));
    rs.push_back((rhs[i] - out.theta1 * cols[0][i] - out.theta2 * cols[1][i]).convert_to<double>());
    floor.push_back(1e-300);
  }
  out.residual_exponent = decay_fit(ns, rs, floor).exponent;
  if (out.condition > 1e6)
    throw Error(ErrorKind::FitUnstable, "two-column condition number " + format17(out.condition) + " exceeds 1e6");
  return out;
}

CdfExpansionAtZero delta_coeffs(const walk::LatticeLaw& law, DeltaMode mode, long N_fit) {
  law.require_expansion_ready();
  if (mode == DeltaMode::Analytic) return analytic_delta(law, true);
  if (mode == DeltaMode::NonLattice) return analytic_delta(law, false);
  const auto delta = oracle::delta_seq<long double>(law, N_fit);
  std::vector<Real> y(delta.size(), Real(0));
  for (std::size_t n = 1; n < delta.size(); ++n) y[n] = Real(delta[n]) / static_cast<long>(n);
  return delta_coeffs_from_sequence(y);
}

}  // namespace fluct::edgeworth

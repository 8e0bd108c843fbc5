#include "fluctuator/basis.hpp"

#include <cmath>
#include <memory>
#include <mutex>

namespace fluct::basis {

namespace {

Rational half_offset(int j) { return Rational(2 * j - 3, 2); }

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Gamma(3/2 - j) / sqrt(pi) for j >= 1.
Rational gamma_half_over_sqrt_pi(int j) {
  Rational r = 1;
  for (int k = 1; k < j; ++k) r /= Rational(1, 2) - Rational(k);
  return r;
}

Rational bernoulli_poly(int m, const Rational& x, const std::vector<Rational>& b) {
  Rational out = 0;
  Rational xp = 1;
  // sum_{k} C(m,k) B_k x^{m-k}, accumulated from k = m downwards
  for (int k = m; k >= 0; --k) {
    out += Rational(binomial(m, k)) * b[k] * xp;
    xp *= x;
  }
  return out;
}

}  // namespace

std::vector<Rational> a_seq(int j, std::size_t N) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "a_seq needs j >= 1");
  std::vector<Rational> out(N + 1);
  out[0] = 1;
  const Rational alpha = half_offset(j);
  for (std::size_t n = 1; n <= N; ++n)
    out[n] = out[n - 1] * (Rational(static_cast<long>(n) - 1) - alpha) / Rational(static_cast<long>(n));
  return out;
}

Rational a_exact(int j, long n) {
  if (n < 0) return 0;
  Rational v = 1;
  const Rational alpha = Rational(2 * j - 3, 2);
  for (long k = 1; k <= n; ++k) v = v * (Rational(k - 1) - alpha) / Rational(k);
  return v;
}

template <class T>
std::vector<T> binom_seq_float(const T& alpha, std::size_t N) {
  std::vector<T> out(N + 1);
  out[0] = T(1);
  for (std::size_t n = 1; n <= N; ++n) out[n] = out[n - 1] * (T(static_cast<long>(n) - 1) - alpha) / T(static_cast<long>(n));
  return out;
}

template <class T>
std::vector<T> a_seq_float(int j, std::size_t N) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "a_seq needs j >= 1");
  return binom_seq_float<T>(T(2 * j - 3) / T(2), N);
}

template std::vector<double> binom_seq_float<double>(const double&, std::size_t);
template std::vector<long double> binom_seq_float<long double>(const long double&, std::size_t);
template std::vector<Real> binom_seq_float<Real>(const Real&, std::size_t);
template std::vector<double> a_seq_float<double>(int, std::size_t);
template std::vector<long double> a_seq_float<long double>(int, std::size_t);
template std::vector<Real> a_seq_float<Real>(int, std::size_t);

Rational tail_sum(int j, long n) {
  if (j < 2) throw Error(ErrorKind::InvalidArgument, "tail_sum diverges for j < 2");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "tail_sum needs n >= 0");
  return -a_exact(j - 1, n - 1);
}

Rational falling_tail_sum(int k, int i, long M) {
  if (k - i < 2) throw Error(ErrorKind::InvalidArgument, "falling_tail_sum needs k - i >= 2");
  Rational p = 1;
  for (int l = 0; l < i; ++l) p *= Rational(2 * k - 3 - 2 * l, 2);
  if (i % 2 == 1) p = -p;
  const long start = M - i;
  // terms with m < i vanish, and a_l = 0 for l < 0, so the shifted tail from max(start, 0)
  // equals the full shifted tail.
  return p * tail_sum(k - i, start < 0 ? 0 : start);
}

std::vector<Rational> bernoulli_numbers(int K) {
  std::vector<Rational> b(K + 1);
  b[0] = 1;
  for (int m = 1; m <= K; ++m) {
    Rational s = 0;
    for (int k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * b[k];
    b[m] = -s / Rational(m + 1);
  }
  return b;
}

std::vector<Rational> gamma_ratio_coeffs(const Rational& alpha, const Rational& beta, int K) {
  const auto b = bernoulli_numbers(K + 1);
  std::vector<Rational> l(K + 1, Rational(0));
  for (int k = 1; k <= K; ++k) {
    Rational d = bernoulli_poly(k + 1, alpha, b) - bernoulli_poly(k + 1, beta, b);
    d /= Rational(k * (k + 1));
    l[k] = (k % 2 == 1) ? d : Rational(-d);
  }
  std::vector<Rational> e(K + 1, Rational(0));
  e[0] = 1;
  for (int i = 1; i <= K; ++i) {
    Rational s = 0;
    for (int k = 1; k <= i; ++k) s += Rational(k) * l[k] * e[i - k];
    e[i] = s / Rational(i);
  }
  return e;
}

Real ExactConversion::value(int k) const {
  auto it = rational.find(k);
  if (it == rational.end()) return Real(0);
  Real v = to_real(it->second);
  if (sqrt_pi_power != 0) {
    const Real sp = sqrt(real_pi());
    v = sqrt_pi_power > 0 ? Real(v * sp) : Real(v / sp);
  }
  return v;
}

ExactConversion basis_to_power_exact(int j, int m, int shift) {
  if (j < 1 || m < j) throw Error(ErrorKind::InvalidArgument, "basis_to_power_exact needs m >= j >= 1");
  // a_{n-shift}^(j) = Gamma(n - shift + 3/2 - j) / (Gamma(3/2 - j) Gamma(n - shift + 1))
  const Rational alpha = Rational(3, 2) - Rational(j) - Rational(shift);
  const Rational beta = Rational(1) - Rational(shift);
  const auto c = gamma_ratio_coeffs(alpha, beta, m - j);
  const Rational r = gamma_half_over_sqrt_pi(j);
  ExactConversion out;
  out.j = j;
  out.m = m;
  out.shift = shift;
  out.sqrt_pi_power = -1;
  for (int k = j; k <= m; ++k) out.rational[k] = c[k - j] / r;
  return out;
}

ExactConversion power_to_basis_exact(int j, int m, int shift) {
  if (j < 1 || m < j) throw Error(ErrorKind::InvalidArgument, "power_to_basis_exact needs m >= j >= 1");
  const int size = m - j + 1;
  // M[k][l]: a^(k) = (1/sqrt(pi)) Sum_l M[k][l] n^{-(l-1/2)}
  std::vector<std::vector<Rational>> mat(size, std::vector<Rational>(size, Rational(0)));
  for (int k = j; k <= m; ++k) {
    const auto row = basis_to_power_exact(k, m, shift);
    for (int l = k; l <= m; ++l) mat[k - j][l - j] = row.rational.at(l);
  }
  // invert the upper-triangular matrix
  std::vector<std::vector<Rational>> inv(size, std::vector<Rational>(size, Rational(0)));
  for (int col = 0; col < size; ++col) {
    for (int row = col; row >= 0; --row) {
      Rational s = (row == col) ? Rational(1) : Rational(0);
      for (int t = row + 1; t <= col; ++t) s -= mat[row][t] * inv[t][col];
      inv[row][col] = s / mat[row][row];
    }
  }
  ExactConversion out;
  out.j = j;
  out.m = m;
  out.shift = shift;
  out.sqrt_pi_power = 1;
  for (int k = j; k <= m; ++k) out.rational[k] = inv[0][k - j];
  return out;
}

BasisConversion power_to_basis(int j, int m, long N_fit) {
  if (j < 1 || m < j) throw Error(ErrorKind::InvalidArgument, "power_to_basis needs m >= j >= 1");
  if (N_fit < 4096) throw Error(ErrorKind::InvalidArgument, "power_to_basis needs N_fit >= 2^12");
  const int extra = 2;
  const int kmax = m + extra;
  std::vector<std::vector<Real>> seqs;
  for (int k = j; k <= kmax; ++k) seqs.push_back(a_seq_float<Real>(k, static_cast<std::size_t>(N_fit)));
  const auto grid = geometric_grid(N_fit / 8, N_fit, 240);
  std::vector<std::vector<Real>> cols(seqs.size());
  std::vector<Real> y;
  const Real expo = Real(2 * j - 1) / 2;
  for (long n : grid) {
    y.push_back(pow(Real(n), -expo));
    for (std::size_t c = 0; c < seqs.size(); ++c) cols[c].push_back(seqs[c][n]);
  }
  const auto fit = least_squares(cols, y);
  BasisConversion out;
  out.j = j;
  out.m = m;
  out.n_fit = N_fit;
  out.condition = fit.condition;
  for (int k = j; k <= m; ++k) out.coefficients[k] = fit.coef[k - j];
  std::vector<double> ns, rs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Real r = y[i];
    for (int k = j; k <= m; ++k) r -= fit.coef[k - j] * cols[k - j][i];
    ns.push_back(static_cast<double>(grid[i]));
    rs.push_back(r.convert_to<double>());
  }
  out.residual_exponent = decay_fit(ns, rs).exponent;
  if (out.residual_exponent < m + 0.25)
    throw Error(ErrorKind::FitDiagnostic, "power_to_basis remainder decays with exponent " +
                                              std::to_string(out.residual_exponent) + " < m + 1/4");
  return out;
}

}  // namespace fluct::basis

namespace fluct::basis {

namespace {

// w(m + shift) = Sum_i out[i] m^(i falling)
std::vector<Rational> falling_weights(int shift, const std::vector<Rational>& weight) {
  const int deg = static_cast<int>(weight.size()) - 1;
  std::vector<Rational> mono(deg + 1, Rational(0));
  for (int p = 0; p <= deg; ++p) {
    Rational sp = 1;
    for (int q = p; q >= 0; --q) {
      mono[q] += weight[p] * Rational(binomial(p, q)) * sp;
      sp *= shift;
    }
  }
  // Stirling numbers of the second kind, m^q = Sum_i S(q, i) m^(i falling)
  std::vector<std::vector<Rational>> st(deg + 1, std::vector<Rational>(deg + 1, Rational(0)));
  st[0][0] = 1;
  for (int q = 1; q <= deg; ++q)
    for (int i = 1; i <= q; ++i) st[q][i] = st[q - 1][i - 1] + Rational(i) * st[q - 1][i];
  std::vector<Rational> out(deg + 1, Rational(0));
  for (int q = 0; q <= deg; ++q)
    for (int i = 0; i <= q; ++i) out[i] += mono[q] * st[q][i];
  return out;
}

Rational falling_prefactor(int k, int i) {
  Rational p = 1;
  for (int l = 0; l < i; ++l) p *= Rational(2 * k - 3 - 2 * l, 2);
  return i % 2 == 1 ? Rational(-p) : p;
}

}  // namespace

Rational weighted_tail(int k, int shift, const std::vector<Rational>& weight, long M) {
  const auto fw = falling_weights(shift, weight);
  Rational out = 0;
  for (std::size_t i = 0; i < fw.size(); ++i)
    if (fw[i] != 0) out += fw[i] * falling_tail_sum(k, static_cast<int>(i), M - shift);
  return out;
}

namespace {

// Real-precision columns are reused across many fits; keep the longest per j.
std::shared_ptr<const std::vector<Real>> cached_columns(int j, std::size_t N) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const std::vector<Real>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[j];
  if (!slot || slot->size() < N + 1) slot = std::make_shared<const std::vector<Real>>(a_seq_float<Real>(j, N));
  return slot;
}

}  // namespace

RegularizedSum regularized_sum(const std::vector<Real>& f, long n0, int shift, const std::vector<Rational>& weight,
                               int k_lo, int k_hi, long window_lo, int grid_points) {
  if (f.empty()) throw Error(ErrorKind::InsufficientLength, "regularized_sum needs data");
  const long N = static_cast<long>(f.size()) - 1;
  if (k_hi < k_lo || k_lo < 1) throw Error(ErrorKind::InvalidArgument, "regularized_sum needs 1 <= k_lo <= k_hi");
  if (k_lo - (static_cast<int>(weight.size()) - 1) < 2)
    throw Error(ErrorKind::InvalidArgument, "weighted tail diverges for the lowest fitted column");
  const auto grid = geometric_grid(std::max(window_lo, n0 + shift + 1), N, grid_points);
  if (static_cast<int>(grid.size()) < 2 * (k_hi - k_lo + 1) + 4)
    throw Error(ErrorKind::InsufficientLength, "fit window too short for the requested columns");

  std::vector<Real> wr;
  for (const auto& c : weight) wr.push_back(to_real(c));
  auto weight_at = [&](long n) {
    Real w = 0, np = 1;
    for (const auto& c : wr) {
      w += c * np;
      np *= n;
    }
    return w;
  };

  RegularizedSum out;
  for (long n = n0; n <= N; ++n) out.partial += weight_at(n) * f[n];

  std::vector<std::shared_ptr<const std::vector<Real>>> seqs;
  for (int k = k_lo; k <= k_hi; ++k) seqs.push_back(cached_columns(k, static_cast<std::size_t>(N)));
  std::vector<Real> tails;
  {
    // same closed form as weighted_tail, with the a-values read in Real precision
    const auto fw = falling_weights(shift, weight);
    for (int k = k_lo; k <= k_hi; ++k) {
      Real t = 0;
      for (std::size_t i = 0; i < fw.size(); ++i) {
        if (fw[i] == 0) continue;
        const int ii = static_cast<int>(i);
        const long start = std::max(N + 1 - shift - ii, 0L);
        const Real a = start == 0 ? Real(0) : (*cached_columns(k - ii - 1, static_cast<std::size_t>(N)))[start - 1];
        t -= to_real(fw[i] * falling_prefactor(k, ii)) * a;
      }
      tails.push_back(t);
    }
  }

  auto fit_tail = [&](int cols, std::map<int, Real>* coef, Real* cond) {
    std::vector<std::vector<Real>> c(cols);
    std::vector<Real> y;
    for (long n : grid) {
      y.push_back(f[n]);
      for (int i = 0; i < cols; ++i) c[i].push_back((*seqs[i])[n - shift]);
    }
    const auto fit = least_squares(c, y);
    Real t = 0;
    for (int i = 0; i < cols; ++i) {
      t += fit.coef[i] * tails[i];
      if (coef) (*coef)[k_lo + i] = fit.coef[i];
    }
    if (cond) *cond = fit.condition;
    return t;
  };
  const int cols = k_hi - k_lo + 1;
  out.tail = fit_tail(cols, &out.coefficients, &out.condition);
  const int fewer = cols >= 3 ? cols - 2 : cols - 1;
  out.tail_bound = fewer >= 1 ? Real(abs(out.tail - fit_tail(fewer, nullptr, nullptr))) : Real(abs(out.tail));
  out.value = out.partial + out.tail;

  std::vector<double> ns, vs;
  for (long n : grid) {
    ns.push_back(static_cast<double>(n));
    vs.push_back((weight_at(n) * f[n]).convert_to<double>());
  }
  std::vector<double> floor(ns.size(), 1e-300);
  const auto d = decay_fit(ns, vs, floor);
  out.summand_zero = d.used < 2;
  out.summand_exponent = d.exponent;
  return out;
}

}  // namespace fluct::basis

#include "fluctuator/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "fluctuator/basis.hpp"

namespace fluct::oracle {

namespace {

template <class T>
std::vector<std::pair<long, T>> typed_atoms(const walk::LatticeLaw& law) {
  std::vector<std::pair<long, T>> out;
  if constexpr (std::is_same_v<T, Rational>) {
    for (const auto& [v, p] : law.atoms()) out.emplace_back(v, p);
  } else {
    for (const auto& [v, p] : law.float_atoms()) out.emplace_back(v, static_cast<T>(p));
  }
  return out;
}

void check_cap(std::size_t width, std::size_t cap) {
  if (width > cap)
    throw Error(ErrorKind::ResourceCap,
                "DP needs " + std::to_string(width) + " states, cap is " + std::to_string(cap));
}

template <class T>
T abs_of(const T& v) {
  return v < 0 ? T(-v) : v;
}

template <class T>
std::vector<T> a1_seq(long N) {
  if constexpr (std::is_same_v<T, Rational>)
    return basis::a_seq(1, static_cast<std::size_t>(N));
  else
    return basis::a_seq_float<T>(1, static_cast<std::size_t>(N));
}

}  // namespace

template <class T>
T Frame<T>::total() const {
  T s = 0;
  for (const auto& m : mass) s += m;
  return s;
}

template <class T>
KilledWalk<T>::KilledWalk(const walk::LatticeLaw& law, long start, long floor, std::size_t cap)
    : atoms_(typed_atoms<T>(law)), floor_(floor), cap_(cap) {
  frame_.n = 0;
  frame_.offset = start;
  frame_.mass = {T(1)};
}

template <class T>
void KilledWalk<T>::step() {
  const long lo = std::max(frame_.offset + atoms_.front().first, floor_);
  const long hi = frame_.offset + static_cast<long>(frame_.mass.size()) - 1 + atoms_.back().first;
  Frame<T> next;
  next.n = frame_.n + 1;
  next.offset = lo;
  if (hi >= lo) {
    check_cap(static_cast<std::size_t>(hi - lo + 1), cap_);
    next.mass.assign(static_cast<std::size_t>(hi - lo + 1), T(0));
  }
  for (std::size_t i = 0; i < frame_.mass.size(); ++i) {
    const T& m = frame_.mass[i];
    if (m == 0) continue;
    const long x = frame_.offset + static_cast<long>(i);
    for (const auto& [v, p] : atoms_) {
      const long y = x + v;
      if (y < floor_)
        killed_ += m * p;
      else
        next.mass[static_cast<std::size_t>(y - lo)] += m * p;
    }
  }
  frame_ = std::move(next);
}

template <class T>
void for_each_pmf(const walk::LatticeLaw& law, long N, const std::function<void(const Frame<T>&)>& fn,
                  std::size_t cap) {
  const auto atoms = typed_atoms<T>(law);
  Frame<T> cur;
  cur.mass = {T(1)};
  fn(cur);
  for (long n = 1; n <= N; ++n) {
    Frame<T> next;
    next.n = n;
    next.offset = cur.offset + atoms.front().first;
    const long width = static_cast<long>(cur.mass.size()) + atoms.back().first - atoms.front().first;
    check_cap(static_cast<std::size_t>(width), cap);
    next.mass.assign(static_cast<std::size_t>(width), T(0));
    for (std::size_t i = 0; i < cur.mass.size(); ++i) {
      const T& m = cur.mass[i];
      if (m == 0) continue;
      for (const auto& [v, p] : atoms) next.mass[i + static_cast<std::size_t>(v - atoms.front().first)] += m * p;
    }
    cur = std::move(next);
    fn(cur);
  }
}

template <class T>
Frame<T> pmf(const walk::LatticeLaw& law, long n, std::size_t cap) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "pmf needs n >= 0");
  Frame<T> out;
  for_each_pmf<T>(law, n, [&](const Frame<T>& f) {
    if (f.n == n) out = f;
  }, cap);
  return out;
}

template <class T>
std::vector<std::vector<T>> pmf_table(const walk::LatticeLaw& law, long N, long x_lo, long x_hi, std::size_t cap) {
  std::vector<std::vector<T>> out;
  out.reserve(static_cast<std::size_t>(N + 1));
  for_each_pmf<T>(law, N, [&](const Frame<T>& f) {
    std::vector<T> row;
    for (long x = x_lo; x <= x_hi; ++x) row.push_back(f.at(x));
    out.push_back(std::move(row));
  }, cap);
  return out;
}

template <class T>
std::vector<T> delta_seq(const walk::LatticeLaw& law, long N, bool strict, std::size_t cap) {
  std::vector<T> out(static_cast<std::size_t>(N + 1), T(0));
  const T half = T(1) / T(2);
  for_each_pmf<T>(law, N, [&](const Frame<T>& f) {
    if (f.n == 0) return;
    T below = 0;
    const long last = strict ? -1 : 0;
    for (long x = f.offset; x <= last && x - f.offset < static_cast<long>(f.mass.size()); ++x) below += f.at(x);
    out[static_cast<std::size_t>(f.n)] = half - below;
  }, cap);
  return out;
}

template <class T>
std::vector<std::vector<T>> conditioned_table(const walk::LatticeLaw& law, long N, bool strict, long x_max,
                                              std::size_t cap) {
  KilledWalk<T> w(law, 0, strict ? 0 : 1, cap);
  std::vector<std::vector<T>> out;
  out.reserve(static_cast<std::size_t>(N + 1));
  auto row = [&] {
    std::vector<T> r(static_cast<std::size_t>(x_max + 1), T(0));
    for (long x = 0; x <= x_max; ++x) r[static_cast<std::size_t>(x)] = w.frame().at(x);
    return r;
  };
  out.push_back(row());
  for (long n = 1; n <= N; ++n) {
    w.step();
    out.push_back(row());
  }
  return out;
}

template <class T>
std::vector<T> tau_tail(const walk::LatticeLaw& law, long x, long N, std::size_t cap) {
  if (x < 0) throw Error(ErrorKind::InvalidArgument, "tau_tail needs x >= 0");
  KilledWalk<T> w(law, x, 1, cap);
  std::vector<T> out{T(1)};
  for (long n = 1; n <= N; ++n) {
    w.step();
    out.push_back(w.survival());
  }
  return out;
}

template <class T>
std::vector<T> strict_tau_tail(const walk::LatticeLaw& law, long N, std::size_t cap) {
  KilledWalk<T> w(law, 0, 0, cap);
  std::vector<T> out{T(1)};
  for (long n = 1; n <= N; ++n) {
    w.step();
    out.push_back(w.survival());
  }
  return out;
}

template <class T>
T recurrence_check(const walk::LatticeLaw& law, long N, long x_max, bool strict) {
  const auto p = pmf_table<T>(law, N, 0, x_max);
  const auto b = conditioned_table<T>(law, N, strict, x_max);
  T worst = 0;
  for (long n = 1; n <= N; ++n) {
    for (long x = strict ? 0 : 1; x <= x_max; ++x) {
      T rhs = p[n][x];
      for (long k = 1; k < n; ++k) {
        const long y_lo = strict ? 0 : 1;
        const long y_hi = strict ? x : x - 1;
        for (long y = y_lo; y <= y_hi; ++y) rhs += p[k][y] * b[n - k][x - y];
      }
      worst = std::max(worst, abs_of(T(T(n) * b[n][x] - rhs)));
    }
  }
  return worst;
}

template <class T>
T spitzer_check(const walk::LatticeLaw& law, long N, bool strict) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "spitzer_check needs N >= 1");
  const auto delta = delta_seq<T>(law, N, strict);
  std::vector<T> e(static_cast<std::size_t>(N + 1), T(0));
  e[0] = 1;
  for (long n = 1; n <= N; ++n) {
    T s = 0;
    for (long k = 1; k <= n; ++k) s += delta[k] * e[n - k];
    e[n] = s / T(n);
  }
  const auto a = a1_seq<T>(N);
  const auto truth = strict ? strict_tau_tail<T>(law, N) : tau_tail<T>(law, 0, N);
  T worst = 0;
  for (long n = 0; n <= N; ++n) {
    T c = 0;
    for (long k = 0; k <= n; ++k) c += a[k] * e[n - k];
    worst = std::max(worst, abs_of(T(c - truth[n])));
  }
  return worst;
}

template <class T>
T leftcont_check(const walk::LatticeLaw& law, long x_max, long N) {
  law.require_left_continuous();
  const auto p = pmf_table<T>(law, N, -x_max, 0);
  T worst = 0;
  for (long x = 1; x <= x_max; ++x) {
    const auto tail = tau_tail<T>(law, x, N);
    for (long n = 1; n <= N; ++n) {
      const T hit = tail[n - 1] - tail[n];
      const T rhs = T(x) / T(n) * p[n][x_max - x];
      worst = std::max(worst, abs_of(T(hit - rhs)));
    }
  }
  return worst;
}

template <class T>
T duality_check(const walk::LatticeLaw& law, long x, long N) {
  if (x < 1) throw Error(ErrorKind::InvalidArgument, "duality_check needs x >= 1");
  const auto lhs = tau_tail<T>(law, x, N);
  const auto t0 = tau_tail<T>(law, 0, N);
  const auto bt = conditioned_table<T>(law.reverse(), N, true, x - 1);
  std::vector<T> factor(static_cast<std::size_t>(N + 1), T(0));
  factor[0] = 1;
  for (long n = 1; n <= N; ++n)
    for (long y = 0; y < x; ++y) factor[n] += bt[n][y];
  T worst = 0;
  for (long n = 0; n <= N; ++n) {
    T rhs = 0;
    for (long k = 0; k <= n; ++k) rhs += factor[k] * t0[n - k];
    worst = std::max(worst, abs_of(T(lhs[n] - rhs)));
  }
  return worst;
}

std::vector<Real> to_real_vec(const std::vector<long double>& v) {
  std::vector<Real> out;
  out.reserve(v.size());
  for (long double x : v) out.emplace_back(x);
  return out;
}

namespace {

// Column range for tails of sequences behaving like c a_n^(2) + ...
constexpr int kTailColumns = 10;

basis::RegularizedSum tail_corrected(const std::vector<Real>& f, long n0) {
  const long N = static_cast<long>(f.size()) - 1;
  return basis::regularized_sum(f, n0, 0, {Rational(1)}, 2, 1 + kTailColumns, N / 4);
}

}  // namespace

std::vector<RenewalValue> renewal_V_range(const walk::LatticeLaw& law, long x_max, long N, bool fit_tail) {
  if (x_max < 1) throw Error(ErrorKind::InvalidArgument, "renewal_V needs x >= 1");
  if (N < 256) throw Error(ErrorKind::InvalidArgument, "renewal_V needs a horizon of at least 256");
  const auto b = conditioned_table<long double>(law, N, false, x_max);
  std::vector<RenewalValue> out;
  std::vector<Real> f(static_cast<std::size_t>(N + 1), Real(0));
  for (long x = 1; x <= x_max; ++x) {
    RenewalValue r;
    r.x = x;
    if (x >= 2)
      for (long n = 1; n <= N; ++n) f[n] += Real(b[n][x - 1]);
    if (x == 1) {
      r.value = 1;
    } else if (!fit_tail) {
      Real s = 0;
      for (long n = 1; n <= N; ++n) s += f[n];
      r.value = 1 + s;
    } else {
      const auto sum = tail_corrected(f, 1);
      if (!sum.summand_zero && sum.summand_exponent < 1.2)
        throw Error(ErrorKind::TailNotDecayed, "renewal summand at x = " + std::to_string(x) +
                                                   " decays with exponent " + std::to_string(sum.summand_exponent));
      r.value = 1 + sum.value;
      r.tail_estimate = sum.tail;
      r.tail_bound = sum.tail_bound;
      r.summand_exponent = sum.summand_exponent;
    }
    out.push_back(r);
  }
  return out;
}

RenewalValue renewal_V(const walk::LatticeLaw& law, long x, long N, bool fit_tail) {
  return renewal_V_range(law, x, N, fit_tail).back();
}

LadderRenewal ladder_renewal(const walk::LatticeLaw& law, long y_max, long N, bool weak) {
  // Walk on alive states <= top; escapes above top are ladder heights.
  const long top = weak ? -1 : 0;
  const long hmax = law.max_step();
  if (hmax <= top) throw Error(ErrorKind::InvalidArgument, "walk never ascends");
  const auto atoms = law.float_atoms();
  std::vector<std::vector<Real>> h(static_cast<std::size_t>(hmax + 1),
                                   std::vector<Real>(static_cast<std::size_t>(N + 1), Real(0)));
  // alive[i] = mass at state top - i
  std::vector<long double> alive{1.0L};
  long start_state = 0;  // S_0 = 0 is alive regardless of top
  std::vector<long double> esc(static_cast<std::size_t>(hmax + 1));
  for (long n = 1; n <= N; ++n) {
    const long lo_state = (n == 1 ? start_state : top - static_cast<long>(alive.size()) + 1) + law.min_step();
    const long width = top - std::min(lo_state, top) + 1;
    check_cap(static_cast<std::size_t>(width), kDefaultStateCap);
    std::vector<long double> next(static_cast<std::size_t>(width), 0.0L);
    std::fill(esc.begin(), esc.end(), 0.0L);
    for (std::size_t i = 0; i < alive.size(); ++i) {
      const long double m = alive[i];
      if (m == 0) continue;
      const long x = (n == 1) ? start_state : top - static_cast<long>(i);
      for (const auto& [v, p] : atoms) {
        const long y = x + v;
        if (y > top)
          esc[static_cast<std::size_t>(y)] += m * p;
        else
          next[static_cast<std::size_t>(top - y)] += m * p;
      }
    }
    for (long y = 0; y <= hmax; ++y) h[y][n] = Real(esc[y]);
    alive = std::move(next);
  }
  LadderRenewal out;
  out.height.assign(static_cast<std::size_t>(hmax + 1), Real(0));
  Real total = 0;
  for (long y = top + 1; y <= hmax; ++y) {
    out.height[y] = tail_corrected(h[y], 1).value;
    total += out.height[y];
  }
  out.height_total_gap = abs(1 - total);
  out.mass.assign(static_cast<std::size_t>(y_max + 1), Real(0));
  const Real stay = weak ? out.height[0] : Real(0);
  for (long y = 0; y <= y_max; ++y) {
    Real s = y == 0 ? Real(1) : Real(0);
    for (long z = 1; z <= std::min(y, hmax); ++z) s += out.height[z] * out.mass[y - z];
    out.mass[y] = s / (1 - stay);
  }
  return out;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FLUCTUATOR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

McEstimate mc_tau_tail(const Sampler& sampler, double x, long n, long paths, std::uint64_t seed, int threads) {
  if (paths < 10000) throw Error(ErrorKind::InvalidArgument, "mc_tau_tail needs at least 10^4 paths");
  constexpr long kBlock = 4096;
  const long blocks = (paths + kBlock - 1) / kBlock;
  std::atomic<long> next_block{0};
  std::atomic<long> survivors{0};
  auto worker = [&] {
    long local = 0;
    for (long b = next_block++; b < blocks; b = next_block++) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 rng(seq);
      const long count = std::min(kBlock, paths - b * kBlock);
      for (long p = 0; p < count; ++p) {
        double pos = x;
        bool alive = true;
        for (long k = 0; k < n && alive; ++k) {
          pos += sampler(rng);
          alive = pos > 0;
        }
        local += alive ? 1 : 0;
      }
    }
    survivors += local;
  };
  const int workers = std::max(1, std::min<int>(worker_count(threads), static_cast<int>(blocks)));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  McEstimate out;
  out.paths = paths;
  out.survivors = survivors.load();
  const double m = static_cast<double>(paths);
  const double ph = static_cast<double>(out.survivors) / m;
  const double z = 1.959963984540054;
  const double denom = 1 + z * z / m;
  const double centre = (ph + z * z / (2 * m)) / denom;
  const double hw = z * std::sqrt(ph * (1 - ph) / m + z * z / (4 * m * m)) / denom;
  out.estimate = ph;
  out.lo = centre - hw;
  out.hi = centre + hw;
  out.half_width = hw;
  return out;
}

Sampler uniform_sampler(double lo, double hi) {
  return [lo, hi](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
}

Sampler lattice_sampler(const walk::LatticeLaw& law) {
  std::vector<double> weights;
  std::vector<double> steps;
  for (const auto& [v, p] : law.float_atoms()) {
    steps.push_back(static_cast<double>(v));
    weights.push_back(static_cast<double>(p));
  }
  return [steps, weights](std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
    return steps[d(rng)];
  };
}

void write_series_csv(std::ostream& out, const std::vector<long double>& values) {
  out << "n,value\n";
  for (std::size_t n = 0; n < values.size(); ++n) out << n << ',' << format17(values[n]) << '\n';
}

void write_series_csv(std::ostream& out, const std::vector<Rational>& values) {
  out << "n,value,exact\n";
  for (std::size_t n = 0; n < values.size(); ++n)
    out << n << ',' << format17(to_real(values[n])) << ',' << values[n].str() << '\n';
}

#define FLUCT_ORACLE_INSTANTIATE(T)                                                                            \
  template struct Frame<T>;                                                                                    \
  template class KilledWalk<T>;                                                                                \
  template Frame<T> pmf<T>(const walk::LatticeLaw&, long, std::size_t);                                        \
  template void for_each_pmf<T>(const walk::LatticeLaw&, long, const std::function<void(const Frame<T>&)>&,   \
                                std::size_t);                                                                  \
  template std::vector<std::vector<T>> pmf_table<T>(const walk::LatticeLaw&, long, long, long, std::size_t);   \
  template std::vector<T> delta_seq<T>(const walk::LatticeLaw&, long, bool, std::size_t);                      \
  template std::vector<std::vector<T>> conditioned_table<T>(const walk::LatticeLaw&, long, bool, long,         \
                                                            std::size_t);                                      \
  template std::vector<T> tau_tail<T>(const walk::LatticeLaw&, long, long, std::size_t);                       \
  template std::vector<T> strict_tau_tail<T>(const walk::LatticeLaw&, long, std::size_t);                      \
  template T recurrence_check<T>(const walk::LatticeLaw&, long, long, bool);                                   \
  template T spitzer_check<T>(const walk::LatticeLaw&, long, bool);                                            \
  template T leftcont_check<T>(const walk::LatticeLaw&, long, long);                                           \
  template T duality_check<T>(const walk::LatticeLaw&, long, long);

FLUCT_ORACLE_INSTANTIATE(Rational)
FLUCT_ORACLE_INSTANTIATE(long double)

#undef FLUCT_ORACLE_INSTANTIATE

}  // namespace fluct::oracle

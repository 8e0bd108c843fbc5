#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "fluctuator/numeric.hpp"
#include "fluctuator/walk.hpp"

/// Exact ground truth by dynamic programming. Templates are instantiated for
/// Rational (exact) and long double (float mode).
namespace fluct::oracle {

inline constexpr std::size_t kDefaultStateCap = 200000;

/// mass[i] = P(state = offset + i).
template <class T>
struct Frame {
  long n = 0;
  long offset = 0;
  std::vector<T> mass;
  T at(long x) const {
    const long i = x - offset;
    return (i < 0 || i >= static_cast<long>(mass.size())) ? T(0) : mass[i];
  }
  T total() const;
};

/// Walk started at `start` and killed on entering (-inf, floor - 1].
/// floor = 1 is the weak killing of tau_0, floor = 0 the strict killing.
/// The starting state itself is never killed.
template <class T>
class KilledWalk {
 public:
  KilledWalk(const walk::LatticeLaw& law, long start, long floor, std::size_t cap = kDefaultStateCap);
  void step();
  const Frame<T>& frame() const { return frame_; }
  T survival() const { return frame_.total(); }
  T killed() const { return killed_; }

 private:
  std::vector<std::pair<long, T>> atoms_;
  long floor_;
  std::size_t cap_;
  Frame<T> frame_;
  T killed_{0};
};

/// Distribution of S_n.
template <class T>
Frame<T> pmf(const walk::LatticeLaw& law, long n, std::size_t cap = kDefaultStateCap);

/// Calls fn for S_0, S_1, ..., S_N.
template <class T>
void for_each_pmf(const walk::LatticeLaw& law, long N, const std::function<void(const Frame<T>&)>& fn,
                  std::size_t cap = kDefaultStateCap);

/// table[n][x - x_lo] = P(S_n = x), n = 0..N.
template <class T>
std::vector<std::vector<T>> pmf_table(const walk::LatticeLaw& law, long N, long x_lo, long x_hi,
                                      std::size_t cap = kDefaultStateCap);

/// Delta_n = 1/2 - P(S_n <= 0) (strict: 1/2 - P(S_n < 0)), n = 0..N; entry 0 is 0.
template <class T>
std::vector<T> delta_seq(const walk::LatticeLaw& law, long N, bool strict = false,
                         std::size_t cap = kDefaultStateCap);

/// table[n][x] = b_n(x) = P(S_n = x, tau_0 > n) for x = 0..x_max
/// (strict: bar b_n(x) with tau_0 replaced by bar tau_0).
template <class T>
std::vector<std::vector<T>> conditioned_table(const walk::LatticeLaw& law, long N, bool strict, long x_max,
                                              std::size_t cap = kDefaultStateCap);

/// P(tau_x > n), n = 0..N, tau_x = inf{n >= 1 : x + S_n <= 0}.
template <class T>
std::vector<T> tau_tail(const walk::LatticeLaw& law, long x, long N, std::size_t cap = kDefaultStateCap);

/// P(bar tau_0 > n), n = 0..N.
template <class T>
std::vector<T> strict_tau_tail(const walk::LatticeLaw& law, long N, std::size_t cap = kDefaultStateCap);

/// Max over n <= N, 1 <= x <= x_max (0 <= x for strict) of
/// |n b_n(x) - p_n(x) - Sum_{k<n} Sum_y p_k(y) b_{n-k}(x-y)|, where y runs over
/// 0 < y < x (weak) or 0 <= y <= x (strict).
template <class T>
T recurrence_check(const walk::LatticeLaw& law, long N, long x_max, bool strict);

/// Coefficients of (1-s)^{-1/2} exp(Sum Delta_n s^n / n) against P(tau_0 > n);
/// returns the max discrepancy over n <= N.
template <class T>
T spitzer_check(const walk::LatticeLaw& law, long N, bool strict = false);

/// Max over 1 <= x <= x_max, 1 <= n <= N of |P(tau_x = n) - (x/n) P(S_n = -x)|.
/// Throws NotLeftContinuous.
template <class T>
T leftcont_check(const walk::LatticeLaw& law, long x_max, long N);

/// Sum P(tau_x > n) s^n against (1 + Sum_{y<x} tilde B(s, y)) Sum P(tau_0 > n) s^n,
/// tilde B built from the reversed walk with strict killing. Max discrepancy to order N.
template <class T>
T duality_check(const walk::LatticeLaw& law, long x, long N);

struct RenewalValue {
  long x = 0;
  Real value = 0;
  Real tail_estimate = 0;  ///< the fitted tail added past the horizon
  Real tail_bound = 0;     ///< spread of the tail between fit orders
  double summand_exponent = 0;
};

/// V(x) = 1 + Sum_{n>=1} P(S_n < x, tau_0 > n) for x = 1..x_max from one
/// float DP of length N. Throws TailNotDecayed if a summand decays slower
/// than n^{-1.2}.
std::vector<RenewalValue> renewal_V_range(const walk::LatticeLaw& law, long x_max, long N, bool fit_tail = true);
RenewalValue renewal_V(const walk::LatticeLaw& law, long x, long N, bool fit_tail = true);

/// Renewal mass u(y), y = 0..y_max, of the ascending ladder heights
/// (strict ladder: first n with S_n > 0; weak: first n with S_n >= 0),
/// from the ladder-height law computed by a DP killed on leaving (-inf, 0]
/// (or (-inf, -1]). Independent of the conditioned DP by duality:
/// strict ladder u(y) = Sum_{n>=0} b_n(y) for y >= 1, weak u(y) = Sum_{n>=0} bar b_n(y).
struct LadderRenewal {
  std::vector<Real> height;  ///< ladder height law, index y = 0..max_step
  std::vector<Real> mass;    ///< u(y), y = 0..y_max
  Real height_total_gap = 0;  ///< |1 - Sum height|
};
LadderRenewal ladder_renewal(const walk::LatticeLaw& law, long y_max, long N, bool weak);

/// Monte Carlo for continuous or lattice samplers.
using Sampler = std::function<double(std::mt19937_64&)>;
struct McEstimate {
  double estimate = 0;
  double lo = 0;  ///< Wilson 95% interval
  double hi = 0;
  double half_width = 0;
  long paths = 0;
  long survivors = 0;
};

/// Estimate of P(tau_x > n) for x + S_k, killed at x + S_k <= 0.
/// Paths are simulated in blocks seeded from (seed, block index), so the
/// result does not depend on the worker count. threads = 0 reads
/// FLUCTUATOR_THREADS (default: hardware concurrency).
McEstimate mc_tau_tail(const Sampler& sampler, double x, long n, long paths, std::uint64_t seed, int threads = 0);

Sampler uniform_sampler(double lo, double hi);
Sampler lattice_sampler(const walk::LatticeLaw& law);

int worker_count(int requested);

/// CSV with columns n,value[,exact]. Values carry 17 significant digits.
void write_series_csv(std::ostream& out, const std::vector<long double>& values);
void write_series_csv(std::ostream& out, const std::vector<Rational>& values);

/// Conversions used by the float pipelines.
std::vector<Real> to_real_vec(const std::vector<long double>& v);

}  // namespace fluct::oracle

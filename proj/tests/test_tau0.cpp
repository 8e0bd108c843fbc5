#include <cmath>
#include <random>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"
#include "fluctuator/tau0.hpp"
#include "support.hpp"

using namespace fluct;

TEST_SUITE("tau0") {
  TEST_CASE("mu coefficients") {
    const auto z = tau0::mu_coeffs(0, 0, 0, 0);
    CHECK(z == std::array<Real, 5>{1, 0, 0, 0, 0});
    // theta_2 = theta_1 = 1 leaves exp((1-s)^{1/2}) = Sum u^k / k!
    const auto one = tau0::mu_coeffs(1, 1, 0, 0);
    Real fact = 1;
    for (int k = 0; k <= 4; ++k) {
      if (k > 0) fact *= k;
      CHECK(abs(one[k] - 1 / fact) < Real("1e-40"));
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 10; ++i) {
      const Real t1(u(rng)), t2(u(rng)), p1(u(rng)), p2(u(rng));
      const auto a = tau0::mu_coeffs(t1, t2, p1, p2);
      const auto b = tau0::mu_coeffs_series(t1, t2, p1, p2);
      for (int k = 0; k <= 4; ++k) CHECK(abs(a[k] - b[k]) < Real("1e-12"));
    }
  }

  TEST_CASE("a vanishing Delta sequence gives vanishing psi") {
    const std::vector<Real> f(1025, Real(0));
    const auto c = tau0::tau0_coeffs_from_sequence(f);
    CHECK(c.psi.psi0.value == 0);
    CHECK(c.psi.psi1.value == 0);
    CHECK(c.psi.psi2.value == 0);
    CHECK(c.nu[0] == 1);
    CHECK(c.nu[1] == 0);
    CHECK(c.nu[2] == 0);
    CHECK_THROWS_KIND(tau0::psi_scalars_from_sequence(std::vector<Real>(100, Real(0)), 0, 0),
                      ErrorKind::InsufficientLength);
  }

  TEST_CASE("lazy walk") {
    const auto L = walk::lazy_walk();
    const long N = 8192;
    const auto f = tau0::delta_over_n(L, N, false);
    const auto c = tau0::tau0_coeffs_from_sequence(f);
    // reference run at N = 8192, frozen to 8 digits (equals -log 2)
    CHECK(abs(c.psi.psi0.value - Real("-0.69314718")) < Real("5e-9"));
    CHECK(c.psi.psi1.summand_exponent >= 1.4);

    const auto tail = oracle::tau_tail<long double>(L, 0, N);
    const auto a1 = basis::a_seq_float<long double>(1, 4096);
    CHECK(std::fabs(static_cast<double>(tail[4096] / a1[4096]) / c.nu[0].convert_to<double>() - 1) < 5e-3);

    // horizon stability
    const auto half = tau0::tau0_coeffs_from_sequence(std::vector<Real>(f.begin(), f.begin() + 4097));
    CHECK(abs(half.psi.psi0.value - c.psi.psi0.value) < Real("1e-10"));
    CHECK(abs(half.psi.psi1.value - c.psi.psi1.value) < Real("1e-8"));

    // series route against the closed form
    const auto hp = tau0::halfpow_route(c, f, tail);
    for (int j = 0; j < 3; ++j) CHECK(abs(hp.nu[j] - c.nu[j]) < Real("1e-8"));
    CHECK(hp.extract_gap < 1e-15);

    // the expansion is asymptotic: at n = 0 it does not reproduce P(tau_0 > 0) = 1
    const auto at0 = tau0::evaluate_tau0(c, {0}, 3);
    CHECK(abs(at0[0] - 1) > Real("0.1"));

    // a wrong theta_1 leaves an n^{-1/2} summand
    CHECK_THROWS_KIND(tau0::psi_scalars_from_sequence(f, c.theta1 + Real("0.05"), c.theta2),
                      ErrorKind::TailNotDecayed);
  }

  TEST_CASE("decay ladder on the skew walk, both killings") {
    const auto W = walk::skew_walk();
    const long N = 8192;
    for (bool strict : {false, true}) {
      const auto c = tau0::tau0_coeffs(W, N, edgeworth::DeltaMode::Fit, strict);
      const auto tail = strict ? oracle::strict_tau_tail<long double>(W, N) : oracle::tau_tail<long double>(W, 0, N);
      const auto d = tau0::decay_ladder(c, tail, 512, N);
      CHECK(d.exponent[0] >= 1.4);
      CHECK(d.exponent[1] >= 2.4);
      CHECK(d.exponent[2] >= 3.2);
      CHECK(d.exponent[1] - d.exponent[0] > 0.8);
      CHECK(d.exponent[2] - d.exponent[1] > 0.8);
    }
    const auto ca = tau0::tau0_coeffs(W, N, edgeworth::DeltaMode::Analytic);
    const auto cf = tau0::tau0_coeffs(W, N);
    for (int j = 0; j < 3; ++j) CHECK(abs(ca.nu[j] - cf.nu[j]) < Real("1e-8"));
    CHECK_THROWS_KIND(tau0::tau0_coeffs(walk::LatticeLaw::make({{-1, Rational(1, 2)}, {1, Rational(1, 2)}}), 1024),
                      ErrorKind::SpanNotOne);
  }
}

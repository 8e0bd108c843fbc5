#include <cmath>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"
#include "fluctuator/tau0.hpp"
#include "fluctuator/taux.hpp"
#include "support.hpp"

using namespace fluct;

TEST_SUITE("taux") {
  const auto L = walk::lazy_walk();
  const auto W = walk::skew_walk();

  TEST_CASE("killed operator") {
    std::vector<Real> one(20, Real(1)), id(20), sq(20);
    for (long y = 0; y < 20; ++y) id[y] = y, sq[y] = y * y;
    // f = 1: P(x + X > 0)
    CHECK(taux::apply_killed(W, one, 1) == Real(1) / 2);
    CHECK(taux::apply_killed(W, one, 2) == 1);
    CHECK(taux::apply_killed(L, one, 1) == Real(3) / 4);
    for (long x = 2; x <= 15; ++x) {
      CHECK(taux::apply_killed(L, id, x) == x);
      CHECK(taux::apply_killed(L, one, x) == 1);
    }
    std::vector<Real> comb(20);
    for (long y = 0; y < 20; ++y) comb[y] = 3 * id[y] - sq[y] / 2;
    for (long x = 1; x <= 10; ++x)
      CHECK(abs(taux::apply_killed(W, comb, x) - 3 * taux::apply_killed(W, id, x) + taux::apply_killed(W, sq, x) / 2) <
            Real("1e-40"));
    CHECK_THROWS_KIND(taux::apply_killed(W, one, 18), ErrorKind::DomainGap);
    CHECK(taux::polyharm_defect(L, one, 1, 3, 15) == 0);
    CHECK_THROWS_KIND(taux::polyharm_defect(L, one, 1, 3, 19), ErrorKind::DomainGap);
  }

  TEST_CASE("left-continuous closed form") {
    const auto lc = taux::v_leftcont(W, 12, 2);
    const Real t0 = 1 / (W.sigma() * sqrt(Real(2)));
    for (long x = 1; x <= 12; ++x) CHECK(abs(lc.at(1, x) - 2 * x * t0) < Real("1e-40"));
    CHECK(taux::polyharm_defect(W, lc.V[0], 1, 1, 10) < Real("1e-30"));
    CHECK_THROWS_KIND(taux::v_leftcont(W.reverse(), 5, 1), ErrorKind::NotLeftContinuous);
  }

  TEST_CASE("ladder route") {
    const long X = 16;
    const auto v = taux::v_ladder(W, X, 2, 8192);
    const auto lc = taux::v_leftcont(W, X, 2);
    const auto c = tau0::tau0_coeffs(W, 8192);
    // x = 0 is the tau_0 expansion
    CHECK(abs(v.at(1, 0) - c.nu[0]) < Real("1e-12"));
    CHECK(abs(v.at(2, 0) - c.nu[1]) < Real("1e-12"));
    for (long x = 1; x <= 10; ++x) {
      CHECK(abs(v.at(1, x) / lc.at(1, x) - 1) < Real("1e-8"));
      CHECK(abs(v.at(2, x) - lc.at(2, x)) < Real("1e-8") * (1 + abs(lc.at(2, x))));
    }
    CHECK(taux::polyharm_defect(W, v.V[0], 1, 1, 12) < Real("1e-6"));
    const auto s = taux::v2_sign_check(W, v.V[1], v.V[0], 1, 12);
    CHECK(s.sign == 1);
    CHECK(s.relative_residual < Real("1e-6"));
    CHECK(s.second_defect_relative < Real("1e-6"));

    // leading DP ratio on the lazy walk
    const auto vl = taux::v_ladder(L, 10, 1, 8192);
    const auto a1 = basis::a_seq_float<long double>(1, 4096);
    for (long x : {1L, 4L, 10L}) {
      const auto t = oracle::tau_tail<long double>(L, x, 4096);
      CHECK(std::fabs(static_cast<double>(t[4096] / a1[4096]) / vl.at(1, x).convert_to<double>() - 1) < 1e-2);
    }
  }

  TEST_CASE("polynomial tail fits") {
    std::vector<long> xs;
    std::vector<Real> p, lin;
    for (long x = 0; x <= 40; ++x) {
      xs.push_back(x);
      p.push_back(Real(2) - Real(x) / 3 + Real(x * x * x) / 50 + exp(Real(-x)));
      lin.push_back(Real(1) + x * Real("0.5") + exp(-Real(x) / 2));
    }
    const auto f = taux::poly_tail_fit(xs, p, 3);
    CHECK(abs(f.poly.coef(0) - 2) < Real("1e-6"));
    CHECK(abs(f.poly.coef(1) + Real(1) / 3) < Real("1e-6"));
    CHECK(abs(f.poly.coef(3) - Real("0.02")) < Real("1e-9"));
    CHECK(f.pass);
    CHECK(f.decaying);
    // the exponential part is what is left over near the origin
    CHECK(abs(f.residuals[0] - 1) < Real("1e-3"));
    const auto g = taux::poly_tail_fit(xs, lin, 1);
    CHECK(g.pass);
    CHECK(g.decaying);
    CHECK_THROWS_KIND(taux::poly_tail_fit({1, 2, 3}, {1, 2, 3}, 1), ErrorKind::GridTooShort);
  }
}

#include <cmath>
#include <sstream>

#include "fluctuator/basis.hpp"
#include "fluctuator/oracle.hpp"
#include "support.hpp"

using namespace fluct;

TEST_SUITE("oracle") {
  const auto L = walk::lazy_walk();
  const auto W = walk::skew_walk();

  TEST_CASE("convolution by hand") {
    const auto p1 = oracle::pmf<Rational>(L, 1);
    CHECK(p1.at(-1) == Rational(1, 4));
    CHECK(p1.at(0) == Rational(1, 2));
    CHECK(p1.at(1) == Rational(1, 4));
    const auto p2 = oracle::pmf<Rational>(L, 2);
    CHECK(p2.at(0) == Rational(3, 8));
    CHECK(p2.at(-2) + p2.at(-1) + p2.at(0) == Rational(11, 16));
    CHECK(p2.total() == 1);
    const auto d = oracle::delta_seq<Rational>(L, 2);
    CHECK(d[2] == Rational(1, 2) - Rational(11, 16));
  }

  TEST_CASE("conditioned and first-passage values") {
    const auto b = oracle::conditioned_table<Rational>(L, 2, false, 3);
    CHECK(b[1][1] == Rational(1, 4));
    CHECK(b[2][1] == Rational(1, 8));
    for (long x = 0; x <= 4; ++x) CHECK(oracle::tau_tail<Rational>(W, x, 3)[0] == 1);
    const auto t0 = oracle::tau_tail<Rational>(L, 0, 1);
    CHECK(t0[1] == Rational(1, 4));
    CHECK(t0[1] == 1 - oracle::pmf<Rational>(L, 1).at(-1) - oracle::pmf<Rational>(L, 1).at(0));
    const auto t1 = oracle::tau_tail<Rational>(W, 1, 2);
    CHECK(t1[1] - t1[2] == Rational(1, 8));
    // strict killing keeps 0 alive: P(bar tau_0 > 1) = P(X >= 0)
    CHECK(oracle::strict_tau_tail<Rational>(L, 1)[1] == Rational(3, 4));
  }

  TEST_CASE("mass conservation and monotonicity") {
    oracle::KilledWalk<Rational> kw(W, 2, 1);
    for (int n = 0; n < 25; ++n) {
      kw.step();
      REQUIRE(kw.survival() + kw.killed() == 1);
    }
    oracle::KilledWalk<long double> kf(W, 2, 1);
    for (int n = 0; n < 400; ++n) kf.step();
    CHECK(std::fabs(kf.survival() + kf.killed() - 1) <= 1e-13L);
    CHECK(kf.survival() == oracle::tau_tail<long double>(W, 2, 400)[400]);

    std::vector<std::vector<Rational>> tails;
    for (long x = 0; x <= 5; ++x) tails.push_back(oracle::tau_tail<Rational>(W, x, 40));
    for (long x = 1; x <= 5; ++x)
      for (long n = 0; n <= 40; ++n) REQUIRE(tails[x][n] >= tails[x - 1][n]);
  }

  TEST_CASE("exact identities") {
    CHECK(oracle::spitzer_check<Rational>(L, 20) == 0);
    CHECK(oracle::spitzer_check<long double>(L, 50) <= 1e-12L);
    CHECK(oracle::spitzer_check<Rational>(W, 40, true) == 0);
    CHECK(oracle::recurrence_check<Rational>(L, 12, 5, false) == 0);
    CHECK(oracle::recurrence_check<Rational>(W, 12, 5, true) == 0);
    CHECK(oracle::leftcont_check<Rational>(W, 10, 60) == 0);
    CHECK_THROWS_KIND(oracle::leftcont_check<Rational>(W.reverse(), 3, 10), ErrorKind::NotLeftContinuous);
    CHECK(oracle::duality_check<Rational>(L, 2, 100) == 0);
    CHECK(oracle::duality_check<long double>(W, 3, 100) <= 1e-12L);
  }

  TEST_CASE("recurrence at n = 2, x = 1 by path enumeration") {
    // 2 b_2(1) = p_2(1) + p_1(1) b_1(0)... with y running over 0 < y < 1: no
    // convolution term, so 2 b_2(1) = p_2(1) = 1/4.
    const auto p2 = oracle::pmf<Rational>(L, 2);
    const auto b = oracle::conditioned_table<Rational>(L, 2, false, 1);
    CHECK(2 * b[2][1] == p2.at(1));
    CHECK(p2.at(1) == Rational(1, 4));
  }

  TEST_CASE("resource cap") {
    CHECK_THROWS_KIND(oracle::tau_tail<long double>(L, 0, 100, 20), ErrorKind::ResourceCap);
  }

  TEST_CASE("renewal function") {
    const auto V = oracle::renewal_V_range(L, 6, 4096);
    CHECK(V[0].x == 1);
    CHECK(V[0].value == 1);
    for (std::size_t i = 1; i < V.size(); ++i) CHECK(V[i].value >= V[i - 1].value);
    // reference run, frozen: the simple lazy walk has V(x) = x
    CHECK(abs(V[1].value - Real("2.000000")) < Real("5e-7"));
    CHECK(V[1].summand_exponent > 1.4);

    // ladder route for W agrees with the direct sums
    const auto lr = oracle::ladder_renewal(W, 8, 4096, false);
    const auto VW = oracle::renewal_V_range(W, 8, 4096);
    Real acc = 0;
    for (int y = 0; y < 8; ++y) {
      acc += lr.mass[y];
      CHECK(abs(acc - VW[y].value) < Real("1e-10"));
    }
    CHECK(lr.height_total_gap < Real("1e-15"));
  }

  TEST_CASE("monte carlo") {
    const oracle::Sampler up = [](std::mt19937_64&) { return 1.0; };
    CHECK(oracle::mc_tau_tail(up, 0.0, 50, 10000, 3).estimate == 1.0);

    const auto u = oracle::uniform_sampler(-1.0, 1.0);
    const auto one = oracle::mc_tau_tail(u, 0.0, 1, 100000, 7);
    CHECK(std::fabs(one.estimate - 0.5) <= 3 * one.half_width);
    CHECK(one.lo <= one.estimate);
    CHECK(one.estimate <= one.hi);

    const auto a = oracle::mc_tau_tail(u, 0.0, 20, 20000, 11, 1);
    const auto b = oracle::mc_tau_tail(u, 0.0, 20, 20000, 11, 4);
    const auto c = oracle::mc_tau_tail(u, 0.0, 20, 20000, 11, 4);
    CHECK(a.survivors == b.survivors);
    CHECK(b.survivors == c.survivors);
    const auto d = oracle::mc_tau_tail(u, 0.0, 20, 20000, 12, 4);
    CHECK(d.survivors != a.survivors);

    const auto lat = oracle::mc_tau_tail(oracle::lattice_sampler(W), 1.0, 10, 100000, 5);
    const double exact = static_cast<double>(oracle::tau_tail<long double>(W, 1, 10)[10]);
    CHECK(std::fabs(lat.estimate - exact) <= 4 * lat.half_width);
  }

  TEST_CASE("csv output") {
    std::ostringstream os;
    oracle::write_series_csv(os, std::vector<Rational>{1, Rational(1, 3)});
    CHECK(os.str() == "n,value,exact\n0,1,1\n1,0.33333333333333333,1/3\n");
  }
}

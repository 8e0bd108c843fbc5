#include <cmath>

#include "fluctuator/basis.hpp"
#include "fluctuator/conditioned.hpp"
#include "support.hpp"

using namespace fluct;

TEST_SUITE("conditioned") {
  const auto L = walk::lazy_walk();
  constexpr long N = 8192;
  constexpr long X = 12;

  TEST_CASE("psi_j(x) on the lazy walk") {
    const auto T = conditioned::make_tables(L, N, X, false);
    const auto psi = conditioned::psi_x_range(L, T, 2);
    const auto theta = edgeworth::theta_polys(L, 2);
    REQUIRE(psi.size() == static_cast<std::size_t>(X + 1));
    for (const auto& p : psi) {
      CHECK(abs(p.psi.at(-1) - theta[0](Real(0))) < Real("1e-40"));
      CHECK(abs(p.psi.at(1) - theta[1](Real(p.x))) < Real("1e-40"));
      CHECK(abs(p.psi.at(1) - theta[1](Real(-p.x))) < Real("1e-40"));
      // exact values for this walk: psi_0(0) = -1, psi_0(x) = -2x
      const Real want = p.x == 0 ? Real(-1) : Real(-2 * p.x);
      CHECK(abs(p.psi.at(0) - want) < Real("1e-9") * (1 + p.x));
    }
    const auto single = conditioned::psi_x(L, 3, 2, 4096);
    CHECK(abs(single.psi.at(0) + 6) < Real("1e-8"));
  }

  TEST_CASE("q ladder, weak killing") {
    const auto T = conditioned::make_tables(L, N, X, false);
    const auto q = conditioned::q_ladder(L, T, 3);
    CHECK(abs(q.theta0 - 1) < Real("1e-40"));
    CHECK(q.V(1) == 1);
    // U_1(1) = q_1(1) = -2 theta_0 V(1)
    CHECK(abs(q.U(1, 1) + 2) < Real("1e-9"));
    for (long x = 1; x <= X; ++x) {
      CHECK(q.q[0][x] >= 0);
      CHECK(abs(q.q[0][x] - 1) < Real("1e-6"));
      CHECK(q.U(1, x) < 0);
      CHECK(abs(q.q[2][x] - 2 * x * x) < Real("1e-5") * (1 + x * x));
    }
    // -q_2(1) = psi_0(1): the y-sum is empty
    CHECK(abs(q.q[2][1] - 2) < Real("1e-8"));
    const std::vector<Real> q3{0, -2, -12, -170};
    for (long x = 1; x <= 2; ++x) CHECK(abs(q.q[3][x] - q3[x]) < Real("1e-6") * abs(q3[x]));

    // growth |U_2(x)| <= C (1 + x)^3
    const Real r6 = abs(q.U(2, 6)) / pow(Real(7), 3);
    const Real r12 = abs(q.U(2, 12)) / pow(Real(13), 3);
    CHECK(r12 <= 2 * r6);

    // one-term DP ratio
    const auto a2 = basis::a_seq_float<long double>(2, N);
    CHECK(std::fabs(static_cast<double>(T.b[4096][1] / a2[4096]) / q.U(1, 1).convert_to<double>() - 1) < 2e-2);

    // the generating-function fit oracle sees the same q_0..q_2 at x = 1
    std::vector<long double> b1;
    for (long n = 0; n <= N; ++n) b1.push_back(n == 0 ? 0.0L : T.b[n][1]);
    const auto g = conditioned::gf_fit(b1, 5);
    CHECK(abs(g[0] - q.q[0][1]) < Real("1e-3"));
    CHECK(abs(g[1] - q.q[1][1]) < Real("1e-2"));
    CHECK(abs(g[2] - q.q[2][1]) < Real("5e-2"));

    // decay ladder of b_n(x) - Sum_{j<=J} U_j(x) a_n^(j+1)
    const auto grid = geometric_grid(512, N, 40);
    for (long x : {1L, 2L, 5L}) {
      for (int J = 1; J <= 2; ++J) {
        const auto ev = conditioned::u_expansion_eval(q, x, grid, J);
        std::vector<double> ns, vs, fl;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          ns.push_back(static_cast<double>(grid[i]));
          vs.push_back(static_cast<double>(std::fabs(T.b[grid[i]][x] - ev[i].convert_to<long double>())));
          fl.push_back(1e-15 * static_cast<double>(T.b[grid[i]][x]));
        }
        const auto d = decay_fit(ns, vs, fl);
        CHECK(d.exponent >= (J == 1 ? 2.2 : 3.2));
      }
    }
  }

  TEST_CASE("q ladder, strict killing") {
    const auto q = conditioned::q_ladder(L, 8, 1, 4096, true);
    CHECK(abs(q.q[0][0] - 3) < Real("1e-6"));
    for (long x = 1; x <= 8; ++x) CHECK(abs(q.q[0][x] - 4) < Real("1e-6"));
  }
}

#include "fluctuator/walk.hpp"
#include "support.hpp"

using namespace fluct;

TEST_SUITE("walk") {
  TEST_CASE("moments of the reference laws") {
    const auto L = walk::lazy_walk();
    CHECK(L.mean() == 0);
    CHECK(L.variance() == Rational(1, 2));
    CHECK(L.span() == 1);
    CHECK(L.cumulants(3)[2] == 0);
    CHECK(L.tag().symmetric);
    CHECK(L.tag().left_continuous);

    const auto W = walk::skew_walk();
    CHECK(W.mean() == 0);
    CHECK(W.variance() == Rational(3, 2));
    CHECK(W.cumulants(3)[2] == Rational(3, 2));
    CHECK(W.span() == 1);
    CHECK(W.tag().left_continuous);
    CHECK_FALSE(W.tag().symmetric);
    CHECK(W.cumulants(2)[1] == W.moment(2) - W.moment(1) * W.moment(1));
  }

  TEST_CASE("reverse") {
    CHECK(walk::lazy_walk().reverse() == walk::lazy_walk());
    const auto R = walk::skew_walk().reverse();
    CHECK(R.atoms() == std::map<long, Rational>{{-2, Rational(1, 4)}, {0, Rational(1, 4)}, {1, Rational(1, 2)}});
    CHECK(R.cumulants(3)[2] == Rational(-3, 2));
    CHECK_FALSE(R.tag().left_continuous);
    CHECK_THROWS_KIND(R.require_left_continuous(), ErrorKind::NotLeftContinuous);
  }

  TEST_CASE("cumulants beyond the mean are shift free") {
    const auto W = walk::skew_walk();
    std::map<long, Rational> shifted;
    for (const auto& [v, p] : W.atoms()) shifted[v + 3] = p;
    const auto S = walk::LatticeLaw::make(shifted);
    CHECK(S.mean() == 3);
    const auto a = W.cumulants(6), b = S.cumulants(6);
    for (int k = 1; k < 6; ++k) CHECK(a[k] == b[k]);
  }

  TEST_CASE("span and validation") {
    const auto two = walk::LatticeLaw::make({{-1, Rational(1, 2)}, {1, Rational(1, 2)}});
    CHECK(two.span() == 2);
    CHECK_THROWS_KIND(two.require_expansion_ready(), ErrorKind::SpanNotOne);
    const auto drift = walk::LatticeLaw::make({{-1, Rational(1, 4)}, {1, Rational(3, 4)}});
    CHECK_THROWS_KIND(drift.require_expansion_ready(), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(walk::LatticeLaw::make({{0, Rational(1, 2)}}), ErrorKind::NonProbability);
    CHECK_THROWS_KIND(walk::LatticeLaw::make({{0, Rational(0)}}), ErrorKind::EmptySupport);
    CHECK_THROWS_KIND(walk::LatticeLaw::make({{0, Rational(3, 2)}, {1, Rational(-1, 2)}}), ErrorKind::NonProbability);
    CHECK_THROWS_KIND(walk::lazy_walk().cumulants(9), ErrorKind::MissingCumulant);
  }

  TEST_CASE("json models") {
    const auto L = walk::law_from_json_text(R"({"atoms": {"-1": "1/4", "0": "0.5", "1": "1/4"}})");
    CHECK(L == walk::lazy_walk());
    CHECK(walk::law_from_json_text(walk::law_to_json_text(walk::skew_walk())) == walk::skew_walk());

    const auto F = walk::law_from_json_text(R"({"atoms": {"-1": 0.3333333333333, "1": 0.6666666666667}, "tolerance": 1e-9})");
    CHECK(F.atoms().size() == 2);
    CHECK(walk::law_from_json_text(R"({"atoms": {"-1": 0.5, "1": 0.5}})").span() == 2);
    CHECK_THROWS_KIND(walk::law_from_json_text(R"({"atoms": {"-1": 0.3, "1": 0.6}})"), ErrorKind::NonProbability);
    CHECK_THROWS_KIND(walk::law_from_json_text(R"({"atoms": {"-1": "0.4", "1": "0.5"}})"), ErrorKind::NonProbability);
    CHECK_THROWS_KIND(walk::law_from_json_text(R"({"atoms": {"x": "1"}})"), ErrorKind::Config);
    CHECK_THROWS_KIND(walk::law_from_json_text("not json"), ErrorKind::Config);
    CHECK_THROWS_KIND(walk::load_law("/nonexistent/model.json"), ErrorKind::Config);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctmc/ita.hpp"
#include "test_models.hpp"

using namespace ctmc;

namespace {

Truncation first_states(int r) {
    std::vector<State> s;
    for (int x = 0; x < r; ++x) s.push_back({x});
    return make_explicit_truncation(std::move(s));
}

}  // namespace

TEST_CASE("birth-death sweep has one element equal to the conditional distribution") {
    auto net = parse_model(kSchloglUnimodal);
    auto sweep = ita_sweep(net, first_states(60));
    REQUIRE(sweep.elems.size() == 1);
    CHECK(sweep.elems[0].z_index == 59);
    auto cond = bdp_conditional(BirthDeathSpec::from_network(net), 60);
    for (std::size_t i = 0; i < 60; ++i) {
        CHECK(sweep.elems[0].dist.values[i] == doctest::Approx(cond.values[i]).epsilon(1e-12));
    }

    auto bp = ita_bounds(sweep, 30.0, 60.0);
    auto bb = bdp_bounds(BirthDeathSpec::from_network(net), 60, 30.0);
    for (std::size_t i = 0; i < 60; ++i) {
        CHECK(bp.lower.values[i] == doctest::Approx(bb.lower.values[i]).epsilon(1e-12));
        CHECK(bp.upper.values[i] == doctest::Approx(bb.upper.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("toggle sweep: one distribution per in-boundary state") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    double r = std::pow(24.0, 6.0);
    auto sweep = ita_sweep(net, build_sublevel_truncation(net, w, r));
    REQUIRE(sweep.elems.size() == 24);
    for (const auto& el : sweep.elems) {
        CHECK(el.dist.mass() == doctest::Approx(1.0).epsilon(1e-10));
    }
    auto bp = ita_bounds(sweep, 1.8e7, r);
    for (std::size_t i = 0; i < bp.lower.values.size(); ++i) {
        CHECK(bp.lower.values[i] <= bp.upper.values[i] + 1e-12);
    }
    // each re-entry state's own distribution dominates the upper bound there
    for (const auto& el : sweep.elems) {
        auto z = static_cast<std::size_t>(el.z_index);
        CHECK(bp.upper.values[z] <= el.dist.values[z] + 1e-12);
    }
    // lower-bound total variation error can never undercut the tail bound
    double lmass = 0;
    for (double v : bp.lower.values) lmass += v;
    CHECK(1.0 - lmass >= 1.8e7 / r);
}

TEST_CASE("statewise bounds bracket a near-exact product-form reference") {
    auto net = parse_model(kSchloglUnimodal);
    auto oracle = bdp_conditional(BirthDeathSpec::from_network(net), 2000);
    const double c = 30.0;
    for (int r : {60, 100, 200}) {
        auto sweep = ita_sweep(net, first_states(r));
        auto bp = ita_bounds(sweep, c, static_cast<double>(r));
        for (int x = 0; x < r; ++x) {
            double p = oracle.values[static_cast<std::size_t>(x)];
            CHECK(bp.lower.values[static_cast<std::size_t>(x)] <= p + 1e-12);
            CHECK(bp.upper.values[static_cast<std::size_t>(x)] >= p - 1e-12);
        }
    }
}

TEST_CASE("r below the moment bound and bad tails are rejected") {
    auto net = parse_model(kSchloglUnimodal);
    auto sweep = ita_sweep(net, first_states(20));
    CHECK_THROWS_AS(ita_bounds(sweep, 30.0, 20.0), SchemeError);
    CHECK_THROWS_AS(ita_bounds_with_tail(sweep, 1.0), SchemeError);
    CHECK_THROWS_AS(ita_bounds_with_tail(sweep, -0.1), SchemeError);
}

TEST_CASE("closed finite class degenerates to the exact solve") {
    auto net = parse_model(
        "species A\nreaction 0 -> A : 5 - A\nreaction A -> 0 : A * (6 - A) / 6\n");
    auto sweep = ita_sweep(net, first_states(6));
    REQUIRE(sweep.elems.size() == 1);
    CHECK(sweep.elems[0].z_index == -1);
    auto cond = bdp_conditional(BirthDeathSpec::from_network(net), 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(sweep.elems[0].dist.values[i] == doctest::Approx(cond.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("singular truncated matrix reports class structure") {
    auto net = parse_model("species A\nreaction A -> 0 : (A - 1) * (4 - A) / 2\n");
    std::vector<State> states{{1}, {3}};
    CHECK_THROWS_WITH_AS(ita_sweep(net, make_explicit_truncation(std::move(states))),
                         doctest::Contains("closed class"), SchemeError);
}

TEST_CASE("average bounds for the constant objective") {
    auto net = parse_model(kSchloglUnimodal);
    auto sweep = ita_sweep(net, first_states(100));
    const double c = 30.0, r = 100.0;
    auto ab = ita_average_bounds(
        sweep, [](const State&) { return 1.0; }, c, r, AvgCase::NonnegOutside);
    CHECK(ab.lower == doctest::Approx(1.0 - c / r).epsilon(1e-12));
    CHECK(ab.upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ab.lower_is_rigorous);
    CHECK_FALSE(ab.upper_is_rigorous);
}

TEST_CASE("average bounds trap the stationary mean") {
    auto net = parse_model(kSchloglUnimodal);
    auto oracle = bdp_conditional(BirthDeathSpec::from_network(net), 2000);
    double mean = 0;
    for (std::size_t x = 0; x < oracle.values.size(); ++x) {
        mean += static_cast<double>(x) * oracle.values[x];
    }
    auto sweep = ita_sweep(net, first_states(150));
    const double c = 30.0, r = 150.0;
    auto count = [](const State& x) { return static_cast<double>(x[0]); };
    auto lo_only = ita_average_bounds(sweep, count, c, r, AvgCase::NonnegOutside);
    CHECK(lo_only.lower <= mean);
    // with w(x) = x the ratio |f|/w is 1 outside any truncation
    auto both = ita_average_bounds(sweep, count, c, r, AvgCase::GrowthControlled, 1.0);
    CHECK(both.lower <= mean);
    CHECK(both.upper >= mean);
    CHECK(both.lower <= both.upper);
    CHECK(both.lower == doctest::Approx(lo_only.lower - c).epsilon(1e-12));
}

TEST_CASE("indicator objective reduces to the statewise bounds") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    double r = std::pow(10.0, 6.0);
    auto sweep = ita_sweep(net, build_sublevel_truncation(net, w, r));
    auto bp = ita_bounds(sweep, 2.0e5, r);
    State target{3, 4};
    int ti = sweep.trunc->index_of(target);
    REQUIRE(ti >= 0);
    auto ab = ita_average_bounds(
        sweep, [&](const State& x) { return x == target ? 1.0 : 0.0; }, 2.0e5, r,
        AvgCase::NonnegOutside);
    CHECK(ab.lower ==
          doctest::Approx(bp.lower.values[static_cast<std::size_t>(ti)]).epsilon(1e-12));
    CHECK(ab.upper ==
          doctest::Approx(bp.upper.values[static_cast<std::size_t>(ti)]).epsilon(1e-12));
}

TEST_CASE("one-species marginal is the full distribution") {
    auto net = parse_model(kSchloglUnimodal);
    auto sweep = ita_sweep(net, first_states(80));
    const double c = 30.0, r = 80.0;
    auto mb = ita_marginal_bounds(sweep, 0, c, r);
    auto bp = ita_bounds(sweep, c, r);
    REQUIRE(mb.counts.size() == 80);
    for (std::size_t i = 0; i < 80; ++i) {
        CHECK(mb.counts[i] == static_cast<std::int64_t>(i));
        CHECK(mb.lower[i] == doctest::Approx(bp.lower.values[i]).epsilon(1e-12));
        CHECK(mb.upper[i] == doctest::Approx(bp.upper.values[i]).epsilon(1e-12));
    }
    double lmass = 0;
    for (double v : mb.lower) lmass += v;
    CHECK(mb.lower_error_exact == doctest::Approx(1.0 - lmass).epsilon(1e-12));
    CHECK(mb.upper_tv_hi >= mb.upper_tv_lo);
    CHECK(mb.upper_l1_hi >= mb.upper_tv_lo);
}

TEST_CASE("toggle marginal bounds bracket a fine-truncation marginal") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    // reference: ITA midpoint on a much larger truncation
    double r_ref = std::pow(40.0, 6.0);
    auto ref_sweep = ita_sweep(net, build_sublevel_truncation(net, w, r_ref));
    auto ref = ita_bounds(ref_sweep, 1.8e7, r_ref);
    std::vector<double> ref_marg(40, 0.0);
    for (std::size_t i = 0; i < ref.upper.values.size(); ++i) {
        auto p1 = static_cast<std::size_t>(ref.upper.trunc->states[i][0]);
        ref_marg[p1] += 0.5 * (ref.lower.values[i] + ref.upper.values[i]);
    }

    double r = std::pow(24.0, 6.0);
    auto sweep = ita_sweep(net, build_sublevel_truncation(net, w, r));
    auto mb = ita_marginal_bounds(sweep, 0, 1.8e7, r);
    REQUIRE(mb.counts.size() == 24);
    for (std::size_t i = 0; i < mb.counts.size(); ++i) {
        CHECK(mb.lower[i] <= ref_marg[i] + 1e-9);
        CHECK(mb.lower[i] <= mb.upper[i] + 1e-12);
    }
    CHECK(mb.lower_error_exact >= 1.8e7 / r);
}

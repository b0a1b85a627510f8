#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctmc/bdp.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/simulate.hpp"
#include "test_models.hpp"

using namespace ctmc;

TEST_CASE("absorbing start is a single sojourn") {
    auto net = parse_model("species A\nreaction A -> 0 : A\n");
    auto run = gillespie(net, {0}, 10.0, 7);
    CHECK(run.jumps == 0);
    CHECK(run.absorbed);
    REQUIRE(run.dwell.size() == 1);
    CHECK(run.dwell[0].first == State{0});
    CHECK(run.dwell[0].second == doctest::Approx(10.0));
    auto eps = empirical_distribution(run);
    CHECK(eps.values.size() == 1);
    CHECK(eps.values[0] == 1.0);
}

TEST_CASE("identical seeds give identical runs") {
    auto net = parse_model(kSchloglUnimodal);
    auto a = gillespie(net, {0}, 200.0, 42);
    auto b = gillespie(net, {0}, 200.0, 42);
    CHECK(a.jumps == b.jumps);
    CHECK(a.final_state == b.final_state);
    REQUIRE(a.dwell.size() == b.dwell.size());
    for (std::size_t i = 0; i < a.dwell.size(); ++i) {
        CHECK(a.dwell[i].first == b.dwell[i].first);
        CHECK(a.dwell[i].second == b.dwell[i].second);  // bitwise
    }
    auto c = gillespie(net, {0}, 200.0, 43);
    CHECK(c.jumps != a.jumps);
}

TEST_CASE("dwell times cover the observation window") {
    auto net = parse_model(kSchloglUnimodal);
    auto run = gillespie(net, {10}, 500.0, 5);
    double total = 0;
    for (const auto& [s, d] : run.dwell) {
        CHECK(d >= 0.0);
        total += d;
    }
    CHECK(total == doctest::Approx(500.0).epsilon(1e-12));

    GillespieOptions opt;
    opt.burn_in_fraction = 0.5;
    auto half = gillespie(net, {10}, 500.0, 5);
    auto burned = gillespie(net, {10}, 500.0, 5, opt);
    double btotal = 0;
    for (const auto& [s, d] : burned.dwell) btotal += d;
    CHECK(btotal == doctest::Approx(250.0).epsilon(1e-12));
    // same trajectory, different window
    CHECK(burned.jumps == half.jumps);
    CHECK(burned.final_state == half.final_state);
}

TEST_CASE("symmetric flip chain splits time evenly") {
    auto net = parse_model("species A\nreaction 0 -> A : 1 - A\nreaction A -> 0 : A\n");
    auto run = gillespie(net, {0}, 4000.0, 11);
    auto eps = empirical_distribution(run);
    CHECK(eps.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eps.at({0}) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(eps.at({1}) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("long run tracks the analytic stationary distribution") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    auto oracle = bdp_conditional(spec, 200);
    GillespieOptions opt;
    opt.burn_in_fraction = 0.05;
    auto run = gillespie(net, {17}, 2e4, 314159, opt);
    auto eps = empirical_distribution(run);
    CHECK(distances(eps, oracle).tv <= 0.05);
}

TEST_CASE("explosion guard and input validation") {
    auto net = parse_model(kSchloglUnimodal);
    GillespieOptions opt;
    opt.jump_cap = 100;
    CHECK_THROWS_AS(gillespie(net, {10}, 1e6, 1, opt), SimulationError);
    CHECK_THROWS_AS(gillespie(net, {10}, 0.0, 1), SimulationError);
    CHECK_THROWS_AS(gillespie(net, {10, 3}, 1.0, 1), SimulationError);
    opt.jump_cap = 100000000;
    opt.burn_in_fraction = 1.0;
    CHECK_THROWS_AS(gillespie(net, {10}, 1.0, 1, opt), SimulationError);
}

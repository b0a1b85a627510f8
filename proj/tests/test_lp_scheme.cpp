#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctmc/lp_scheme.hpp"
#include "test_models.hpp"

using namespace ctmc;

namespace {

Truncation first_states(int r) {
    std::vector<State> s;
    for (int x = 0; x < r; ++x) s.push_back({x});
    return make_explicit_truncation(std::move(s));
}

// Largest constraint violation of a candidate (unscaled) distribution.
double feasibility_violation(const OuterPolytope& poly, const std::vector<double>& pi) {
    double worst = 0;
    for (const auto& row : poly.lp.rows) {
        double lhs = 0;
        for (const auto& [j, a] : row.coef) {
            lhs += a * pi[static_cast<std::size_t>(j)] * poly.scale[static_cast<std::size_t>(j)];
        }
        double v = 0;
        switch (row.rel) {
            case Rel::EQ: v = std::abs(lhs - row.rhs); break;
            case Rel::LE: v = std::max(0.0, lhs - row.rhs); break;
            case Rel::GE: v = std::max(0.0, row.rhs - lhs); break;
        }
        worst = std::max(worst, v);
    }
    for (double p : pi) worst = std::max(worst, -p);
    return worst;
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

}  // namespace

TEST_CASE("mass optimum on a birth-death chain is the conditional distribution") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    const int r = 100;
    auto poly = build_polytope(net, first_states(r), w, 30.0, r);
    auto pi = lp_approximate(poly);
    auto cond = bdp_conditional(BirthDeathSpec::from_network(net), r);
    CHECK(l1_diff(pi.values, cond.values) <= 1e-9);
}

TEST_CASE("restrictions of near-exact solutions are feasible") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    auto oracle = bdp_conditional(BirthDeathSpec::from_network(net), 2000);
    for (int r : {60, 120, 240}) {
        auto poly = build_polytope(net, first_states(r), w, 30.0, r);
        std::vector<double> restricted(oracle.values.begin(), oracle.values.begin() + r);
        CHECK(feasibility_violation(poly, restricted) <= 1e-9);
        auto cond = bdp_conditional(BirthDeathSpec::from_network(net), r);
        CHECK(feasibility_violation(poly, cond.values) <= 1e-9);
    }
}

TEST_CASE("toggle polytope dimensions and mass window") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    double r = std::pow(24.0, 6.0);
    auto poly = build_polytope(net, build_sublevel_truncation(net, w, r), w, 1.8e7, r);
    CHECK(poly.trunc->size() == 300);
    CHECK(poly.interior.size() == 276);
    int eq_rows = 0;
    for (const auto& row : poly.lp.rows) {
        if (row.rel == Rel::EQ) ++eq_rows;
    }
    CHECK(eq_rows == 276);
    auto pi = lp_approximate(poly);
    CHECK(pi.mass() >= 1.0 - 1.8e7 / r - 1e-9);
    CHECK(pi.mass() <= 1.0 + 1e-9);
}

TEST_CASE("inconsistent moment bound is reported infeasible") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    auto poly = build_polytope(net, first_states(30), w, 0.5, 30.0);
    CHECK_THROWS_WITH_AS(lp_approximate(poly), doctest::Contains("infeasible"), SchemeError);
    CHECK_THROWS_AS(build_polytope(net, first_states(20), w, 30.0, 20.0), SchemeError);
}

TEST_CASE("closed finite class pins the polytope to one ray") {
    auto net = parse_model(
        "species A\nreaction 0 -> A : 5 - A\nreaction A -> 0 : A * (6 - A) / 6\n");
    Expr w = *parse_expr("A", {"A"}, {});
    auto poly = build_polytope(net, first_states(6), w, 10.0, 20.0);
    auto pi = lp_approximate(poly);
    auto cond = bdp_conditional(BirthDeathSpec::from_network(net), 6);
    CHECK(l1_diff(pi.values, cond.values) <= 1e-9);
    CHECK(pi.mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mass objective bounds hit the constraint window exactly") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    const double c = 30.0, r = 80.0;
    auto poly = build_polytope(net, first_states(80), w, c, r);
    std::vector<std::vector<double>> objectives{std::vector<double>(80, 1.0)};
    auto rep = ilp_bounds(poly, objectives);
    REQUIRE(rep.per_objective.size() == 1);
    REQUIRE(rep.per_objective[0].ok);
    CHECK(rep.per_objective[0].lower == doctest::Approx(1.0 - c / r).epsilon(1e-9));
    CHECK(rep.per_objective[0].upper == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("statewise bounds bracket the oracle and certify uniqueness") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    auto oracle = bdp_conditional(BirthDeathSpec::from_network(net), 2000);
    const int r = 60;
    auto poly = build_polytope(net, first_states(r), w, 30.0, static_cast<double>(r));
    auto res = ilp_statewise_bounds(poly);
    CHECK(res.uniqueness_certificate);
    auto approx = lp_approximate(poly);
    for (int x = 0; x < r; ++x) {
        auto i = static_cast<std::size_t>(x);
        CHECK(res.bounds.lower.values[i] <= oracle.values[i] + 1e-9);
        CHECK(res.bounds.upper.values[i] >= oracle.values[i] - 1e-9);
        // the LP point is itself feasible, so it sits inside the bracket
        CHECK(res.bounds.lower.values[i] <= approx.values[i] + 1e-9);
        CHECK(res.bounds.upper.values[i] >= approx.values[i] - 1e-9);
    }
}

TEST_CASE("bound monotonicity on a nested truncation ladder") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    const double c = 30.0;
    double prev_lo = -1.0, prev_hi = 2.0;
    for (int r : {50, 100, 200}) {
        auto poly = build_polytope(net, first_states(r), w, c, static_cast<double>(r));
        std::vector<double> f(static_cast<std::size_t>(r), 0.0);
        f[10] = 1.0;  // probability of state 10
        auto rep = ilp_bounds(poly, {f});
        REQUIRE(rep.per_objective[0].ok);
        CHECK(rep.per_objective[0].lower >= prev_lo - 1e-12);
        CHECK(rep.per_objective[0].upper <= prev_hi + 1e-12);
        prev_lo = rep.per_objective[0].lower;
        prev_hi = rep.per_objective[0].upper;
    }
}

TEST_CASE("ergodic probe respects a conserved parity") {
    // jumps of +-2 preserve the parity of the count
    auto net = parse_model(
        "species X\nreaction 0 -> 2 X : 1\nreaction 2 X -> 0 : mass_action(1)\n");
    Expr w = *parse_expr("X", {"X"}, {});
    auto poly = build_polytope(net, first_states(12), w, 4.0, 12.0);
    auto odd = lp_ergodic_probe(poly, {3});
    REQUIRE_FALSE(odd.support.empty());
    for (int i : odd.support) CHECK(i % 2 == 1);
    auto even = lp_ergodic_probe(poly, {2});
    REQUIRE_FALSE(even.support.empty());
    for (int i : even.support) CHECK(i % 2 == 0);
    CHECK_THROWS_AS(lp_ergodic_probe(poly, {99}), SchemeError);
}

TEST_CASE("marginal bounds agree with statewise bounds in one dimension") {
    auto net = parse_model(kSchloglUnimodal);
    Expr w = *parse_expr("S", {"S"}, {});
    const int r = 40;
    auto poly = build_polytope(net, first_states(r), w, 30.0, static_cast<double>(r));
    auto mb = ilp_marginal_bounds(poly, 0);
    auto sw = ilp_statewise_bounds(poly);
    REQUIRE(mb.counts.size() == static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < mb.counts.size(); ++i) {
        CHECK(mb.lower[i] == doctest::Approx(sw.bounds.lower.values[i]).epsilon(1e-8));
        CHECK(mb.upper[i] == doctest::Approx(sw.bounds.upper.values[i]).epsilon(1e-8));
    }
    CHECK(mb.lower_error_exact >= 30.0 / r - 1e-9);
}

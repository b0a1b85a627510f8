#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "ctmc/bdp.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/ita.hpp"
#include "test_models.hpp"

using namespace ctmc;

namespace {

std::shared_ptr<const Truncation> first_states(int r) {
    std::vector<State> s;
    for (int x = 0; x < r; ++x) s.push_back({x});
    return share(make_explicit_truncation(std::move(s)));
}

std::vector<State> state_range(int lo, int hi) {  // inclusive
    std::vector<State> s;
    for (int x = lo; x <= hi; ++x) s.push_back({x});
    return s;
}

}  // namespace

TEST_CASE("distance identities on truncated distributions") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    auto a = bdp_conditional(spec, 50);

    auto d0 = distances(a, a);
    CHECK(d0.tv == 0.0);
    CHECK(d0.l1 == 0.0);
    CHECK(d0.wnorm == 0.0);

    // disjoint point masses: tv = 1, l1 = 2
    auto pa = make_distribution(first_states(1), {1.0});
    std::vector<State> sb{{1}};
    auto pb = make_distribution(share(make_explicit_truncation(std::move(sb))), {1.0});
    auto d1 = distances(pa, pb);
    CHECK(d1.tv == doctest::Approx(1.0));
    CHECK(d1.l1 == doctest::Approx(2.0));

    // tv = l1 / 2 whenever both operands have total mass one
    auto b = bdp_conditional(spec, 30);
    auto d2 = distances(a, b);
    CHECK(d2.tv == doctest::Approx(d2.l1 / 2).epsilon(1e-12));

    Expr w = *parse_expr("X", {"X"}, {});
    auto d3 = distances(a, b, &w);
    CHECK(d3.wnorm >= d3.l1 * 0.0);
    CHECK(d3.wnorm > 0.0);
}

TEST_CASE("distance on raw vectors with weights") {
    std::vector<double> a{0.5, 0.5}, b{1.0, 0.0}, w{2.0, 3.0};
    auto d = distances(a, b, &w);
    CHECK(d.tv == doctest::Approx(0.5));
    CHECK(d.l1 == doctest::Approx(1.0));
    CHECK(d.wnorm == doctest::Approx(2.5));

    // padding with zeros on the shorter operand
    std::vector<double> c{1.0};
    auto d2 = distances(c, std::vector<double>{});
    CHECK(d2.l1 == doctest::Approx(1.0));

    std::vector<double> short_w{1.0};
    CHECK_THROWS_AS(distances(a, b, &short_w), SchemeError);
}

TEST_CASE("tail bound arithmetic and validation") {
    CHECK(tail_bound(2.0, 20.0) == doctest::Approx(0.1));
    CHECK(tail_bound(1.8e7, std::pow(238.0, 6.0)) ==
          doctest::Approx(1.8e7 / std::pow(238.0, 6.0)));
    CHECK_THROWS_AS(tail_bound(-1.0, 10.0), SchemeError);
    CHECK_THROWS_AS(tail_bound(1.0, 0.0), SchemeError);
}

TEST_CASE("error summary of a statewise bounds pair") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    const int r = 100;
    const double c = 18.0;  // stationary mean of the unimodal set is below 17.1
    auto bp = bdp_bounds(spec, r, c);
    REQUIRE(bp.has_lower);
    auto s = bound_errors(bp, c / r);
    // lower bound is (1 - c/r) times a distribution of mass one
    CHECK(s.lower_tv == doctest::Approx(c / r).epsilon(1e-12));
    // upper bound is the conditional distribution itself, mass one
    CHECK(s.upper_tv_lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.upper_tv_hi == doctest::Approx(c / r).epsilon(1e-12));
    CHECK(s.upper_l1_hi == doctest::Approx(2 * c / r).epsilon(1e-12));
    CHECK(s.tail_bound_used == c / r);

    CHECK_THROWS_AS(bound_errors(bp, -0.1), SchemeError);
    CHECK_THROWS_AS(bound_errors(bp, 1.5), SchemeError);
}

TEST_CASE("conditional distribution attains tail mass in both metrics") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    auto oracle = bdp_conditional(spec, 400);
    auto approx = bdp_conditional(spec, 60);

    double m = 0;  // oracle mass outside the approximation support
    for (int x = 60; x < 400; ++x) m += oracle.at({x});

    auto cm = conditional_metrics(approx, oracle);
    CHECK(cm.tail_mass == doctest::Approx(m).epsilon(1e-10));
    // conditioning scales every inside value by 1/(1 - m), so the relative
    // error is exactly m everywhere and nothing is underestimated
    CHECK(cm.max_relative_error == doctest::Approx(m).epsilon(1e-10));
    CHECK(cm.tv_error == doctest::Approx(m).epsilon(1e-10));
}

TEST_CASE("restriction has zero relative error but full tail in total variation") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    auto oracle = bdp_conditional(spec, 400);
    auto T = first_states(60);
    std::vector<double> vals;
    for (const auto& x : T->states) vals.push_back(oracle.at(x));
    auto restriction = make_distribution(T, std::move(vals));

    auto cm = conditional_metrics(restriction, oracle);
    CHECK(cm.max_relative_error == 0.0);
    CHECK(cm.tv_error == doctest::Approx(cm.tail_mass).epsilon(1e-12));

    // vanishing where the reference is positive blows the relative error up
    std::vector<double> broken(restriction.values);
    broken[10] = 0.0;
    auto cm2 = conditional_metrics(make_distribution(T, std::move(broken)), oracle);
    CHECK(std::isinf(cm2.max_relative_error));
}

TEST_CASE("drift verification on an immigration-death chain") {
    auto net = parse_model("species X\nreaction 0 -> X : 1\nreaction X -> 0 : X\n");
    Expr v = *parse_expr("X", {"X"}, {});
    Expr f = *parse_expr("1", {"X"}, {});
    // Qv(x) = 1 - x, so Qv + f = 2 - x <= 0 outside {0, 1}
    auto cert = drift_apply(net, v, f, state_range(0, 1), state_range(0, 60));
    CHECK(cert.d == doctest::Approx(2.0));
    CHECK(cert.pi_f_bound == doctest::Approx(2.0));
    CHECK(cert.complement_bound == doctest::Approx(0.5));
    CHECK(cert.max_residual <= 1e-12);
    CHECK(cert.f_size == 2);
    CHECK(cert.check_size == 61);

    // F = {0} alone leaves a positive residual at x = 1
    CHECK_THROWS_AS(drift_apply(net, v, f, state_range(0, 0), state_range(0, 5)),
                    SchemeError);
    // f dropping below one is rejected
    Expr half = *parse_expr("1 / 2", {"X"}, {});
    CHECK_THROWS_AS(drift_apply(net, v, half, state_range(0, 1), state_range(0, 5)),
                    SchemeError);
    CHECK_THROWS_AS(drift_apply(net, v, f, {}, state_range(0, 5)), SchemeError);
}

TEST_CASE("drift verification with the finite set equal to the check set") {
    auto net = parse_model(kSchloglUnimodal);
    Expr v = *parse_expr("X", {"X"}, {});
    Expr f = *parse_expr("1", {"X"}, {});
    auto F = state_range(0, 40);
    auto cert = drift_apply(net, v, f, F, F);
    double expected = -std::numeric_limits<double>::infinity();
    for (const auto& x : F) expected = std::max(expected, apply_generator(net, v, x) + 1.0);
    CHECK(cert.d == doctest::Approx(expected));
}

TEST_CASE("resolvent-based error bound dominates the observed error") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr v = *parse_expr("X", {"X"}, {});
    Expr f = *parse_expr("1", {"X"}, {});
    auto F = state_range(0, 19);
    auto cert = drift_apply(net, v, f, F, state_range(0, 400));

    LyapunovBoundInput in{v, F, cert.d};
    auto T = first_states(60);
    const State z{59};
    auto res = lyapunov_error_bound(net, T, z, in, 28.0);
    CHECK(res.phi_bar > 0.0);
    CHECK(res.outflow > 0.0);
    CHECK(res.beta == 28.0);

    // compare against the actual total variation error of the same scheme
    auto sys = build_augmented(net, T, ReentrySpec::fixed(z));
    auto approx = ta_solve(sys);
    auto oracle = bdp_conditional(spec, 400);
    auto d = distances(approx, oracle);
    CHECK(res.bound >= d.tv);
    CHECK(std::isfinite(res.bound));
}

TEST_CASE("beta scan matches individual bound evaluations") {
    auto net = parse_model(kSchloglUnimodal);
    Expr v = *parse_expr("X", {"X"}, {});
    Expr f = *parse_expr("1", {"X"}, {});
    auto F = state_range(0, 19);
    auto cert = drift_apply(net, v, f, F, state_range(0, 400));
    LyapunovBoundInput in{v, F, cert.d};
    auto T = first_states(60);
    const State z{59};

    std::vector<double> betas{14.0, 28.0, 56.0};
    auto scan = lyapunov_error_bound_scan(net, T, z, in, betas);
    REQUIRE(scan.size() == 3);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        auto one = lyapunov_error_bound(net, T, z, in, betas[i]);
        CHECK(scan[i].bound == doctest::Approx(one.bound).epsilon(1e-14));
        CHECK(scan[i].outflow == one.outflow);
    }

    CHECK_THROWS_AS(lyapunov_error_bound(net, T, z, in, -1.0), SchemeError);
    CHECK_THROWS_AS(lyapunov_error_bound(net, T, {60}, in, 28.0), SchemeError);
    LyapunovBoundInput outside{v, state_range(0, 70), cert.d};
    CHECK_THROWS_AS(lyapunov_error_bound(net, first_states(50), {49}, outside, 28.0),
                    SchemeError);
}

TEST_CASE("linear-program tightening never worsens the bound and stays valid") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr v = *parse_expr("X", {"X"}, {});
    Expr f = *parse_expr("1", {"X"}, {});
    auto F = state_range(0, 19);
    auto cert = drift_apply(net, v, f, F, state_range(0, 400));
    LyapunovBoundInput in{v, F, cert.d};
    auto T = first_states(60);
    const State z{59};

    auto refined = tighten_bound_lp(net, T, z, in, 28.0);
    CHECK(refined.core_size == 19);  // states 0..18; 19 can jump out of F
    CHECK(refined.bound <= refined.plain_bound);
    CHECK(refined.bound > 0.0);

    auto sys = build_augmented(net, T, ReentrySpec::fixed(z));
    auto approx = ta_solve(sys);
    auto oracle = bdp_conditional(spec, 400);
    CHECK(refined.bound >= distances(approx, oracle).tv);
}

TEST_CASE("stationarity residual vanishes on an exact finite chain") {
    // propensities vanish just outside {0..5}: the finite chain is exact
    auto net = parse_model(
        "species A\n"
        "reaction 0 -> A : 5 - A\n"
        "reaction A -> 0 : A * (6 - A) / 6\n");
    auto T = first_states(6);
    auto sys = build_augmented(net, T, ReentrySpec::fixed({0}));
    auto pi = ta_solve(sys);
    CHECK(stationary_residual(net, pi, T->states) <= 1e-12);

    // a genuinely truncated chain balances in the interior but not at the cut
    auto snet = parse_model(kSchloglUnimodal);
    auto ssys = build_augmented(snet, first_states(50), ReentrySpec::fixed({49}));
    auto spi = ta_solve(ssys);
    CHECK(stationary_residual(snet, spi, state_range(1, 40)) <= 1e-12);
    CHECK(stationary_residual(snet, spi, state_range(48, 49)) > 1e-8);
}

TEST_CASE("error report lookup and serialization") {
    ErrorReport rep;
    rep.scheme = "ta";
    rep.truncation = "levels<=60";
    rep.add("tv_error", 0.0123, Rigor::OracleBased);
    rep.add("tv_bound", std::numeric_limits<double>::infinity(), Rigor::Rigorous);

    REQUIRE(rep.find("tv_error").has_value());
    CHECK(*rep.find("tv_error") == 0.0123);
    CHECK_FALSE(rep.find("missing").has_value());

    std::string j = rep.to_json();
    CHECK(j.find("\"scheme\": \"ta\"") != std::string::npos);
    CHECK(j.find("\"rigor\": \"oracle-based\"") != std::string::npos);
    CHECK(j.find("\"value\": \"inf\"") != std::string::npos);
    // fixed field order: scheme before truncation before entries
    CHECK(j.find("\"scheme\"") < j.find("\"truncation\""));
    CHECK(j.find("\"truncation\"") < j.find("\"entries\""));

    CHECK(rigor_label(Rigor::Rigorous) == "rigorous");
    CHECK(rigor_label(Rigor::Heuristic) == "heuristic");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctmc/statespace.hpp"
#include "test_models.hpp"

using namespace ctmc;

namespace {

Truncation toggle_trunc(const ReactionNetwork& net, int k) {
    auto w = parse_expr("(P1 + P2)^6", net.species, net.params);
    return build_sublevel_truncation(net, *w, std::pow(double(k), 6.0));
}

}  // namespace

TEST_CASE("toggle sublevel truncations have simplex counts k(k+1)/2") {
    auto net = parse_model(kToggle);
    CHECK(toggle_trunc(net, 24).size() == 300);
    for (int k : {1, 2, 3, 5, 8, 13, 21, 30}) {
        CHECK(toggle_trunc(net, k).size() == k * (k + 1) / 2);
    }
}

TEST_CASE("1-D sublevel truncation is the first r states") {
    auto net = parse_model(kSchloglUnimodal);
    auto w = parse_expr("S", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 5);
    REQUIRE(T.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(T.states[i] == State{i});
        CHECK(T.index_of(State{i}) == i);
    }
    CHECK(T.index_of(State{5}) == -1);
}

TEST_CASE("superlevel truncation from a linear drift") {
    // birth-death a+ = 1, a- = x: Qu(x) = 1 - x for u(x) = x, max Qu = 1
    auto net = parse_model("species A\nreaction 0 -> A : 1\nreaction A -> 0 : A\n");
    auto u = parse_expr("A", net.species, net.params);
    auto T = build_superlevel_truncation(net, *u, 9, 1.0);
    REQUIRE(T.size() == 10);  // {x : 1 - x > -9} = {0..9}
    CHECK(T.states.back() == State{9});
    REQUIRE(T.attached_tail_bound.has_value());
    CHECK(*T.attached_tail_bound == doctest::Approx(0.1));

    auto T0 = build_superlevel_truncation(net, *u, 0, 1.0);
    CHECK(T0.size() == 1);  // {x : 1 - x > 0} = {0}
    CHECK_THROWS_AS(build_superlevel_truncation(net, *u, 9, 0.0), StateSpaceError);
}

TEST_CASE("toggle boundaries on the 300-state truncation") {
    auto net = parse_model(kToggle);
    auto T = toggle_trunc(net, 24);
    auto ob = out_boundary(net, T);
    REQUIRE(ob.boundary.size() == 24);
    for (int i : ob.boundary) {
        CHECK(T.states[i][0] + T.states[i][1] == 23);
        CHECK(ob.q_o[i] > 0);
    }
    auto bi = in_boundary(net, T);
    REQUIRE(bi.size() == 24);
    for (int i : bi) CHECK(T.states[i][0] + T.states[i][1] == 23);

    auto interior = interior_set(net, T);
    CHECK(interior.size() == 276);

    // partition identity
    std::vector<char> seen(T.states.size(), 0);
    for (int i : bi) seen[i]++;
    for (int i : interior) seen[i]++;
    for (char c : seen) CHECK(int(c) == 1);
}

TEST_CASE("1-D birth-death boundaries") {
    auto net = parse_model(kSchloglUnimodal);
    auto w = parse_expr("S", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 30);
    auto ob = out_boundary(net, T);
    REQUIRE(ob.boundary.size() == 1);
    CHECK(T.states[ob.boundary[0]] == State{29});
    // q_o(29) = a1(29) + a3 (both birth channels exit)
    double a1 = 6.0 * 29 * 28;
    CHECK(ob.q_o[ob.boundary[0]] == doctest::Approx(a1 + 50.0));
    auto bi = in_boundary(net, T);
    REQUIRE(bi.size() == 1);
    CHECK(T.states[bi[0]] == State{29});
}

TEST_CASE("closed finite class has empty boundaries") {
    // both propensities vanish just outside {0..5}, so nothing enters or leaves
    auto net = parse_model(
        "species A\n"
        "reaction 0 -> A : 5 - A\n"
        "reaction A -> 0 : A * (6 - A) / 6\n");
    auto w = parse_expr("A", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 6);
    auto ob = out_boundary(net, T);
    CHECK(ob.boundary.empty());
    CHECK(in_boundary(net, T).empty());
    CHECK(interior_set(net, T).size() == 6);
}

TEST_CASE("pure death chain is entered from above the truncation") {
    auto net = parse_model("species A\nreaction A -> 0 : A\n");
    auto w = parse_expr("A", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 5);
    CHECK(out_boundary(net, T).boundary.empty());
    auto bi = in_boundary(net, T);
    REQUIRE(bi.size() == 1);
    CHECK(T.states[bi[0]] == State{4});
}

TEST_CASE("detect_levels groups the toggle simplex diagonals") {
    auto net = parse_model(kToggle);
    auto T = toggle_trunc(net, 24);
    auto f = parse_expr("P1 + P2", net.species, net.params);
    auto ls = detect_levels(net, T, *f);
    REQUIRE(ls.levels.size() == 24);
    for (int l = 0; l < 24; ++l) CHECK(ls.levels[l].size() == std::size_t(l + 1));
}

TEST_CASE("detect_levels rejects steps of size two") {
    auto net = parse_model("species A\nreaction 0 -> 2 A : 1\n");
    auto w = parse_expr("A", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 6);
    auto f = parse_expr("A", net.species, net.params);
    CHECK_THROWS_AS(detect_levels(net, T, *f), StateSpaceError);
}

TEST_CASE("mass-weighted level function works for a dimerization network") {
    auto net = parse_model(
        "species M D\n"
        "reaction 2 M -> D : mass_action(1)\n"
        "reaction D -> 2 M : mass_action(1)\n"
        "reaction 0 -> M : 1\n"
        "reaction M -> 0 : M\n");
    auto w = parse_expr("(M + 2 * D)^2", net.species, net.params);
    auto T = build_sublevel_truncation(net, *w, 64.0);
    auto f = parse_expr("M + 2 * D", net.species, net.params);
    auto ls = detect_levels(net, T, *f);
    CHECK(ls.levels.size() == 8);
}

TEST_CASE("communicating classes on the absorbing three-state pitfall chain") {
    // states {1,2,3}, rates q(2,1)=q(3,2)=1, state 1 absorbing
    auto net = parse_model("species A\nreaction A -> 0 : (A - 1) * (4 - A) / 2\n");
    auto T = make_explicit_truncation({State{1}, State{2}, State{3}});
    auto cd = communicating_classes(net, T);
    REQUIRE(cd.closed_classes.size() == 1);
    CHECK(T.states[cd.closed_classes[0][0]] == State{1});
    REQUIRE(cd.transient.size() == 2);
    CHECK(cd.truncation_relative);
}

TEST_CASE("irreducible toggle truncation is one closed class") {
    auto net = parse_model(kToggle);
    auto T = toggle_trunc(net, 8);
    auto cd = communicating_classes(net, T);
    REQUIRE(cd.closed_classes.size() == 1);
    CHECK(cd.closed_classes[0].size() == std::size_t(T.size()));
    CHECK(cd.transient.empty());
}

TEST_CASE("single absorbing state forms a closed class of size one") {
    auto net = parse_model("species A\nreaction A -> 0 : A\n");
    auto T = make_explicit_truncation({State{0}});
    auto cd = communicating_classes(net, T);
    REQUIRE(cd.closed_classes.size() == 1);
    CHECK(cd.closed_classes[0].size() == 1);
}

TEST_CASE("extra edge inside a class leaves the decomposition unchanged") {
    auto base = parse_model(
        "species A\n"
        "reaction 0 -> A : 5 - A\n"
        "reaction A -> 0 : A\n");
    auto more = parse_model(
        "species A\n"
        "reaction 0 -> A : 5 - A\n"
        "reaction A -> 0 : A\n"
        "reaction A -> 0 : 2 * A\n");
    auto w = parse_expr("A", base.species, base.params);
    auto T = build_sublevel_truncation(base, *w, 6);
    auto c1 = communicating_classes(base, T);
    auto c2 = communicating_classes(more, T);
    CHECK(c1.closed_classes == c2.closed_classes);
    CHECK(c1.transient == c2.transient);
}

TEST_CASE("state cap aborts enumeration of non-norm-like functions") {
    auto net = parse_model(kToggle);
    auto w = parse_expr("P1", net.species, net.params);  // sublevel sets infinite in P2
    CHECK_THROWS_AS(build_sublevel_truncation(net, *w, 3, {}, 1000), StateSpaceError);
}

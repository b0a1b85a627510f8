#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctmc/qbd.hpp"
#include "test_models.hpp"

using namespace ctmc;

namespace {

Truncation first_states(int r) {
    std::vector<State> s;
    for (int x = 0; x < r; ++x) s.push_back({x});
    return make_explicit_truncation(std::move(s));
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

}  // namespace

TEST_CASE("one-species blocks are the scalar rates") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr f = *parse_expr("S", {"S"}, {});
    auto b = extract_blocks(net, first_states(12), f);
    REQUIRE(b.n_levels() == 12);
    for (int l = 0; l < 12; ++l) {
        CHECK(b.diag[static_cast<std::size_t>(l)](0, 0) ==
              doctest::Approx(-(spec.ap(l) + spec.am(l))));
        if (l < 11)
            CHECK(b.up[static_cast<std::size_t>(l)](0, 0) == doctest::Approx(spec.ap(l)));
        if (l > 0)
            CHECK(b.down[static_cast<std::size_t>(l)](0, 0) == doctest::Approx(spec.am(l)));
    }
}

TEST_CASE("block reassembly round-trips the truncated matrix") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    Expr f = *parse_expr("P1 + P2", {"P1", "P2"}, {});
    auto T = build_sublevel_truncation(net, w, std::pow(12.0, 6.0));
    auto b = extract_blocks(net, T, f);
    // toggle levels x1+x2 = l have l+1 states each
    for (int l = 0; l < b.n_levels(); ++l) {
        CHECK(static_cast<int>(b.levels.levels[static_cast<std::size_t>(l)].size()) == l + 1);
    }
    auto Q = assemble_Qr(net, *b.trunc);
    auto R = reassemble_blocks(b);
    REQUIRE(Q.vals.size() == R.vals.size());
    CHECK(Q.col_idx == R.col_idx);
    CHECK(Q.row_ptr == R.row_ptr);
    for (std::size_t k = 0; k < Q.vals.size(); ++k) {
        CHECK(Q.vals[k] == doctest::Approx(R.vals[k]).epsilon(1e-14));
    }
}

TEST_CASE("a level structure that skips levels is rejected") {
    // jumps of size 2 break the tridiagonal band under f(x) = x
    auto net = parse_model("species X\nreaction 0 -> 2 X : 1\nreaction X -> 0 : X\n");
    Expr f = *parse_expr("X", {"X"}, {});
    auto T = share(first_states(6));
    LevelStructure ls;
    ls.levels.resize(6);
    ls.level_of.resize(6);
    for (int i = 0; i < 6; ++i) {
        ls.levels[static_cast<std::size_t>(i)] = {i};
        ls.level_of[static_cast<std::size_t>(i)] = i;
    }
    CHECK_THROWS_AS(extract_blocks(net, T, ls), SchemeError);
}

TEST_CASE("scalar ratio recursion approaches the product-form ratios") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr f = *parse_expr("S", {"S"}, {});
    const int L = 100;
    auto b = extract_blocks(net, first_states(L), f);
    auto rs = r_matrix_recursion(b, L);
    // away from the zero-seeded terminal level, R^l ~ a+(l-1)/a-(l)
    for (int l = 1; l <= 20; ++l) {
        double exact = spec.ap(l - 1) / spec.am(l);
        CHECK(rs[static_cast<std::size_t>(l)](0, 0) ==
              doctest::Approx(exact).epsilon(1e-6));
        CHECK(rs[static_cast<std::size_t>(l)](0, 0) >= 0.0);
    }
    // terminal level is perturbed downward by the zero seed
    CHECK(rs[L - 1](0, 0) < spec.ap(L - 2) / spec.am(L - 1));
}

TEST_CASE("cut-off two uses a single inverse") {
    auto net = parse_model(kSchloglUnimodal);
    Expr f = *parse_expr("S", {"S"}, {});
    auto b = extract_blocks(net, first_states(5), f);
    auto rs = r_matrix_recursion(b, 2);
    REQUIRE(rs.size() == 2);
    CHECK(rs[1](0, 0) == doctest::Approx(-b.up[0](0, 0) / b.diag[1](0, 0)));
    CHECK_THROWS_AS(r_matrix_recursion(b, 1), SchemeError);
}

TEST_CASE("exact ratio injection reproduces the conditional distribution") {
    auto net = parse_model(kSchloglBimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr f = *parse_expr("S", {"S"}, {});
    const int L = 80;
    auto b = extract_blocks(net, first_states(L), f);
    RMatrixSequence rs(L);
    for (int l = 1; l < L; ++l) {
        rs[static_cast<std::size_t>(l)] =
            Eigen::MatrixXd::Constant(1, 1, spec.ap(l - 1) / spec.am(l));
    }
    auto pi = ldqbdp_solve(b, rs);
    auto cond = bdp_conditional(spec, L);
    CHECK(l1_diff(pi.values, cond.values) <= 1e-12);
    CHECK(pi.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-seeded recursion converges to the conditional distribution") {
    auto net = parse_model(kSchloglUnimodal);
    auto spec = BirthDeathSpec::from_network(net);
    Expr f = *parse_expr("S", {"S"}, {});
    double prev = 1.0;
    for (int L : {30, 45, 60}) {
        auto b = extract_blocks(net, first_states(L), f);
        auto pi = ldqbdp_solve(b, r_matrix_recursion(b, L));
        auto cond = bdp_conditional(spec, L);
        double err = l1_diff(pi.values, cond.values);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 1e-8);
}

TEST_CASE("toggle-switch solve is a clean distribution") {
    auto net = parse_model(kToggle);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    Expr f = *parse_expr("P1 + P2", {"P1", "P2"}, {});
    auto b = extract_blocks(net, build_sublevel_truncation(net, w, std::pow(24.0, 6.0)), f);
    REQUIRE(b.n_levels() == 24);
    auto rs = r_matrix_recursion(b, 24);
    for (int l = 1; l < 24; ++l) CHECK(rs[static_cast<std::size_t>(l)].minCoeff() >= 0.0);
    auto pi = ldqbdp_solve(b, rs);
    CHECK(pi.mass() == doctest::Approx(1.0).epsilon(1e-10));
    for (double v : pi.values) CHECK(v >= 0.0);
}

TEST_CASE("benchmark cut-off helper") {
    CHECK(level_cutoff_hint(std::pow(24.0, 6.0)) == 24);
    CHECK(level_cutoff_hint(std::pow(238.0, 6.0)) == 238);
    CHECK(level_cutoff_hint(64.0) == 2);
}

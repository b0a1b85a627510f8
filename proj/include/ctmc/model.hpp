#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctmc/expr.hpp"

namespace ctmc {

class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Reaction {
    std::vector<std::int64_t> nu_minus;  // reactant stoichiometry
    std::vector<std::int64_t> nu_plus;   // product stoichiometry
    std::vector<std::int64_t> nu;        // net change, precomputed
    ExprPtr propensity;
};

struct ReactionNetwork {
    std::vector<std::string> species;
    std::vector<std::pair<std::string, double>> params;  // declaration order
    std::vector<Reaction> reactions;

    int species_index(const std::string& name) const;
    std::size_t n_species() const { return species.size(); }
};

// Parses a model file (grammar: species/param/reaction lines, '#' comments).
// mass_action(k) propensities expand to k * prod_i x_i(x_i-1)...(x_i-nu-_i+1).
ReactionNetwork parse_model(const std::string& text);

// Inverse of parse_model up to whitespace: emits a file that re-parses to an
// identical network.
std::string pretty_print(const ReactionNetwork& net);

// Off-diagonal rate-matrix row: distinct targets y != x with
// q(x,y) = sum of a_j(x) over reactions with x + nu_j = y; zero rates omitted.
// Raises on negative propensities and on positive-rate jumps leaving N^n.
std::vector<std::pair<State, double>> rate_row(const ReactionNetwork& net, const State& x);

// q(x) = sum of rate_row rates (same summation order).
double exit_rate(const ReactionNetwork& net, const State& x);

// Jump-chain row: q(x,y)/q(x) over targets, or {(x,1)} when x is absorbing.
std::vector<std::pair<State, double>> jump_probs(const ReactionNetwork& net, const State& x);

// Generator applied to a function: Qv(x) = sum_j a_j(x) (v(x+nu_j) - v(x)).
double apply_generator(const ReactionNetwork& net, const Expr& v, const State& x);

}  // namespace ctmc

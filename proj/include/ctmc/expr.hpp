#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctmc {

// Molecule counts per species. Signed so that preimage arithmetic (x - nu)
// can go negative and be tested for admissibility.
using State = std::vector<std::int64_t>;

struct StateHash {
    std::size_t operator()(const State& s) const noexcept {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto v : s) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

std::string state_to_string(const State& x);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col);
    int line;
    int col;
};

class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expression tree over +, -, *, /, ^uint, numeric literals, species counts
// and (pre-resolved) parameter values.  mass_action(k) nodes additionally
// carry the reactant stoichiometry of the reaction they belong to; it is
// bound after parsing (see Reaction).
class Expr {
public:
    enum class Kind { Num, Species, Param, Add, Sub, Mul, Div, Pow, Neg, MassAction };

    Kind kind = Kind::Num;
    double value = 0.0;       // Num literal or resolved parameter value
    int species = -1;         // Species index
    unsigned expo = 0;        // Pow exponent
    std::string name;         // identifier as written (species/param)
    std::vector<std::shared_ptr<Expr>> kids;
    std::vector<std::int64_t> ma_nu_minus;  // MassAction only, bound later

    // Raw evaluation; NaN/inf propagate, callers check via eval_checked.
    double eval(const State& x) const;
    // Evaluation that rejects non-finite results, naming the state.
    double eval_checked(const State& x) const;

    std::string to_string() const;
};

using ExprPtr = std::shared_ptr<Expr>;

// Parses an arithmetic expression in the model grammar.  Identifiers are
// resolved against the species list (by position) or the parameter map
// (substituted as resolved values that still print under their name).
ExprPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& species,
                   const std::vector<std::pair<std::string, double>>& params,
                   int line_no = 1);

}  // namespace ctmc

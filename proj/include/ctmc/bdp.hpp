#pragma once

#include "ctmc/distribution.hpp"
#include "ctmc/model.hpp"

namespace ctmc {

class SchemeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One-species birth-death process: jumps +1 at rate a_plus(x), -1 at rate
// a_minus(x).
struct BirthDeathSpec {
    ExprPtr a_plus;
    ExprPtr a_minus;

    double ap(std::int64_t x) const { return a_plus->eval_checked({x}); }
    double am(std::int64_t x) const { return a_minus->eval_checked({x}); }

    // Classifies a one-species network whose reactions all jump by +-1.
    static BirthDeathSpec from_network(const ReactionNetwork& net);
    // The corresponding two-reaction network (for modules that need rate rows).
    ReactionNetwork to_network() const;
};

// gamma(0) = 1, gamma(x) = gamma(x-1) a_plus(x-1)/a_minus(x), the stationary
// product form; computed through a log-space recursion.
std::vector<double> bdp_gamma(const BirthDeathSpec& spec, int r);
std::vector<double> bdp_log_gamma(const BirthDeathSpec& spec, int r);

// Conditional distribution gamma / sum(gamma) over {0..r-1}; exponentiation
// and normalization happen in one pass from the log-space recursion.
TruncatedDistribution bdp_conditional(const BirthDeathSpec& spec, int r);

// Upper bound = conditional distribution; lower bound = (1 - c/r) * upper,
// valid when the stationary mean is at most c. Lower bound absent when r <= c.
BoundsPair bdp_bounds(const BirthDeathSpec& spec, int r, double c);

}  // namespace ctmc

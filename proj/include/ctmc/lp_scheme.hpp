#pragma once

#include "ctmc/ita.hpp"
#include "ctmc/lpsolve.hpp"

namespace ctmc {

// Finite-dimensional outer approximation of the stationary solutions:
//   (pi Q)(x) = 0 for interior x, mass within [1 - c/r, 1],
//   moment sum w*pi <= c, pi >= 0, support inside T.
// Variables are scaled as sigma(x) = max(q(x), 1) * pi(x) to keep the
// constraint matrix well conditioned.
struct OuterPolytope {
    std::shared_ptr<const Truncation> trunc;
    std::vector<double> w_vals;   // w evaluated on the truncation
    std::vector<double> scale;    // max(q(x), 1)
    std::vector<int> interior;    // states not reachable in one jump from outside
    double c = 0;
    double r = 0;
    LinearProgram lp;  // constraints only; objectives are set per solve
};

OuterPolytope build_polytope(const ReactionNetwork& net,
                             std::shared_ptr<const Truncation> T, const Expr& w, double c,
                             double r);
OuterPolytope build_polytope(const ReactionNetwork& net, Truncation T, const Expr& w,
                             double c, double r);

// Optimal point of the mass-maximization program; for birth-death chains this
// is exactly the conditional distribution.
TruncatedDistribution lp_approximate(const OuterPolytope& poly);

// Optimal point of max pi(x): its support hints at the communicating class
// of x when the chain has several.
struct ProbeResult {
    TruncatedDistribution dist;
    std::vector<int> support;  // indices with value > 1e-10
};

ProbeResult lp_ergodic_probe(const OuterPolytope& poly, const State& x);

// min/max of pi(f) over the polytope, one pair per objective. Because the
// restriction of any stationary solution is feasible, these bound pi_{|r}(f)
// rigorously; per-objective solver failures are recorded, not thrown.
struct ObjectiveBounds {
    double lower = 0;
    double upper = 0;
    bool ok = false;
    std::string message;
};

struct StationaryBoundsReport {
    std::vector<ObjectiveBounds> per_objective;
    bool uniqueness_certificate = false;  // some statewise lower bound > 0
};

StationaryBoundsReport ilp_bounds(const OuterPolytope& poly,
                                  const std::vector<std::vector<double>>& objectives);

// Two LP solves per state; sets the uniqueness certificate when some lower
// bound is positive. Both sides bound pi(x) itself (indicators of truncation
// states take the value pi(x) on the restriction).
struct StatewiseIlpResult {
    BoundsPair bounds;
    bool uniqueness_certificate = false;
};

StatewiseIlpResult ilp_statewise_bounds(const OuterPolytope& poly);

// Marginal-of-species bounds via indicator objectives, with the same error
// bracket fields as the sweep-based version.
MarginalBounds ilp_marginal_bounds(const OuterPolytope& poly, int species);

}  // namespace ctmc

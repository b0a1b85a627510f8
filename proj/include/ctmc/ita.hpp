#pragma once

#include <functional>

#include "ctmc/ta.hpp"

namespace ctmc {

// One TA solution per in-boundary re-entry state. A truncation that cannot be
// entered from outside degenerates to a single element with z_index = -1 (the
// exact stationary distribution of the finite chain).
struct SweepElement {
    int z_index = -1;  // truncation index of the re-entry state
    TruncatedDistribution dist;
};

struct ItaSweep {
    std::shared_ptr<const Truncation> trunc;
    std::vector<SweepElement> elems;
};

// Factorizes Q_r^T once and back-substitutes one unit vector per in-boundary
// state (each solution is a normalized row of the truncated inverse).
ItaSweep ita_sweep(const ReactionNetwork& net, std::shared_ptr<const Truncation> T);
ItaSweep ita_sweep(const ReactionNetwork& net, Truncation T);

// Statewise bounds: lower(x) = (1 - tail) min_z pi^z(x), upper(x) = max_z
// pi^z(x). The c/r form requires r > c; the tail form accepts any bound in
// [0, 1), e.g. the one attached to a superlevel truncation.
BoundsPair ita_bounds(const ItaSweep& sweep, double c, double r);
BoundsPair ita_bounds_with_tail(const ItaSweep& sweep, double tail);

// Hypothesis on the objective f outside the truncation; picks which side of
// the average bracket is a rigorous bound on the stationary average.
enum class AvgCase { NonnegOutside, NonposOutside, GrowthControlled };

struct AverageBounds {
    double lower = 0;
    double upper = 0;
    AvgCase case_used = AvgCase::NonnegOutside;
    bool lower_is_rigorous = false;
    bool upper_is_rigorous = false;
};

// min/max of the sweep averages, each also scaled by (1 - c/r) and the worse
// of the two kept; GrowthControlled additionally widens both sides by
// c * sup_{x outside T} |f(x)|/w(x), which the caller supplies.
AverageBounds ita_average_bounds(const ItaSweep& sweep,
                                 const std::function<double(const State&)>& f, double c,
                                 double r, AvgCase cs, double sup_ratio_outside = 0);

// Bounds on the marginal distribution of species k, one entry per count
// value present in the truncation. The upper values need not bound the true
// marginal (mass may sit outside the truncation) but their error does obey
// the bracket below.
struct MarginalBounds {
    std::vector<std::int64_t> counts;  // sorted distinct values of species k
    std::vector<double> lower;
    std::vector<double> upper;
    double lower_error_exact = 0;   // TV and l1 error of the lower vector
    double upper_tv_lo = 0;         // bracket on the upper vector's TV error
    double upper_tv_hi = 0;
    double upper_l1_hi = 0;
};

MarginalBounds ita_marginal_bounds(const ItaSweep& sweep, int species, double c, double r);

}  // namespace ctmc

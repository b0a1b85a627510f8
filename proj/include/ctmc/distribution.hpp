#pragma once

#include <memory>
#include <vector>

#include "ctmc/statespace.hpp"

namespace ctmc {

// Nonnegative values over a truncation, implicitly zero-padded outside it.
struct TruncatedDistribution {
    std::shared_ptr<const Truncation> trunc;
    std::vector<double> values;

    double mass() const {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }
    double at(const State& x) const {
        int i = trunc ? trunc->index_of(x) : -1;
        return i < 0 ? 0.0 : values[static_cast<std::size_t>(i)];
    }
};

// Clips tiny negatives (below `clip_tol` in magnitude) to zero and rejects
// anything more negative.
TruncatedDistribution make_distribution(std::shared_ptr<const Truncation> trunc,
                                        std::vector<double> values, double clip_tol = 1e-12);

enum class BoundsValidity { StatewiseOnPi, ConditionalOnly };

// Statewise lower/upper bounding distributions.
struct BoundsPair {
    TruncatedDistribution lower;  // empty values when has_lower is false
    TruncatedDistribution upper;
    bool has_lower = false;
    double tail_bound_used = 0;  // c/r, or the Lyapunov 1/(r+1) alternative
    BoundsValidity validity = BoundsValidity::StatewiseOnPi;
};

std::shared_ptr<const Truncation> share(Truncation&& T);

}  // namespace ctmc

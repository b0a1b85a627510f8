#include "ctmc/ita.hpp"

#include <algorithm>
#include <cmath>

namespace ctmc {

namespace {

std::string reducibility_note(const ReactionNetwork& net, const Truncation& T) {
    ClassDecomposition cd = communicating_classes(net, T);
    return " (" + std::to_string(cd.closed_classes.size()) + " closed class(es), " +
           std::to_string(cd.transient.size()) + " transient state(s))";
}

}  // namespace

ItaSweep ita_sweep(const ReactionNetwork& net, std::shared_ptr<const Truncation> T) {
    ItaSweep sweep;
    sweep.trunc = T;
    std::vector<int> ib = in_boundary(net, *T);
    std::sort(ib.begin(), ib.end());
    if (ib.empty()) {
        // nothing re-enters: the finite chain itself carries the answer
        auto sys = build_augmented(net, T, ReentrySpec::boundary_mid());
        sweep.elems.push_back({-1, ta_solve(sys)});
        return sweep;
    }
    SparseMatrix Qr = assemble_Qr(net, *T);
    LUFactorization lu(Qr.transposed());
    if (lu.singular()) {
        throw SchemeError("truncated rate matrix is singular" +
                          reducibility_note(net, *T));
    }
    if (T->size() <= 1200 && ib.size() <= 8) {
        // few re-entry states: per-state subtraction-free stationary solves
        // (via the re-entry scheme) keep componentwise accuracy on chains
        // whose stationary vector spans many orders of magnitude
        for (int z : ib) {
            auto sys = build_augmented(net, T,
                                       ReentrySpec::fixed(T->states[static_cast<std::size_t>(z)]));
            sweep.elems.push_back({z, ta_solve(sys)});
        }
        return sweep;
    }
    const int n = T->size();
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int z : ib) {
        e[static_cast<std::size_t>(z)] = 1.0;
        std::vector<double> y = lu.solve(e);
        e[static_cast<std::size_t>(z)] = 0.0;
        double pos = 0, neg = 0;
        for (double v : y) {
            if (v > 0) pos = std::max(pos, v);
            else neg = std::max(neg, -v);
        }
        double big = std::max(pos, neg);
        if (big <= 0 || std::min(pos, neg) > 1e-10 * big) {
            throw SchemeError("inverse row for re-entry state " +
                              state_to_string(T->states[static_cast<std::size_t>(z)]) +
                              " is not sign-consistent" + reducibility_note(net, *T));
        }
        bool negative_branch = neg > pos;
        double sum = 0;
        for (double& v : y) {
            double t = negative_branch ? -v : v;
            v = t > 0 ? t : 0.0;
            sum += v;
        }
        for (double& v : y) v /= sum;
        sweep.elems.push_back({z, make_distribution(T, std::move(y))});
    }
    return sweep;
}

ItaSweep ita_sweep(const ReactionNetwork& net, Truncation T) {
    return ita_sweep(net, share(std::move(T)));
}

BoundsPair ita_bounds_with_tail(const ItaSweep& sweep, double tail) {
    if (tail < 0 || tail >= 1) {
        throw SchemeError("tail bound " + std::to_string(tail) + " is outside [0, 1)");
    }
    if (sweep.elems.empty()) throw SchemeError("empty sweep");
    const std::size_t n = sweep.elems.front().dist.values.size();
    std::vector<double> lo(sweep.elems.front().dist.values);
    std::vector<double> hi(lo);
    for (std::size_t k = 1; k < sweep.elems.size(); ++k) {
        const auto& v = sweep.elems[k].dist.values;
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    for (double& v : lo) v *= 1.0 - tail;
    BoundsPair bp;
    bp.upper = TruncatedDistribution{sweep.trunc, std::move(hi)};
    bp.lower = TruncatedDistribution{sweep.trunc, std::move(lo)};
    bp.has_lower = true;
    bp.tail_bound_used = tail;
    bp.validity = BoundsValidity::StatewiseOnPi;
    return bp;
}

BoundsPair ita_bounds(const ItaSweep& sweep, double c, double r) {
    if (r <= c) {
        throw SchemeError("truncation parameter must exceed the moment bound (r = " +
                          std::to_string(r) + ", c = " + std::to_string(c) + ")");
    }
    return ita_bounds_with_tail(sweep, c / r);
}

AverageBounds ita_average_bounds(const ItaSweep& sweep,
                                 const std::function<double(const State&)>& f, double c,
                                 double r, AvgCase cs, double sup_ratio_outside) {
    if (r <= c) throw SchemeError("truncation parameter must exceed the moment bound");
    const auto& states = sweep.trunc->states;
    double lo = 0, hi = 0;
    bool first = true;
    for (const auto& el : sweep.elems) {
        double avg = 0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            avg += el.dist.values[i] * f(states[i]);
        }
        if (first) {
            lo = hi = avg;
            first = false;
        } else {
            lo = std::min(lo, avg);
            hi = std::max(hi, avg);
        }
    }
    double alpha = 1.0 - c / r;
    AverageBounds ab;
    ab.case_used = cs;
    ab.lower = std::min(lo, alpha * lo);
    ab.upper = std::max(hi, alpha * hi);
    switch (cs) {
        case AvgCase::NonnegOutside:
            ab.lower_is_rigorous = true;
            break;
        case AvgCase::NonposOutside:
            ab.upper_is_rigorous = true;
            break;
        case AvgCase::GrowthControlled:
            if (sup_ratio_outside < 0) throw SchemeError("negative growth ratio supremum");
            ab.lower -= c * sup_ratio_outside;
            ab.upper += c * sup_ratio_outside;
            ab.lower_is_rigorous = ab.upper_is_rigorous = true;
            break;
    }
    return ab;
}

MarginalBounds ita_marginal_bounds(const ItaSweep& sweep, int species, double c, double r) {
    if (r <= c) throw SchemeError("truncation parameter must exceed the moment bound");
    const auto& states = sweep.trunc->states;
    if (states.empty() || species < 0 ||
        species >= static_cast<int>(states.front().size())) {
        throw SchemeError("species index out of range");
    }
    std::vector<std::int64_t> counts;
    for (const auto& x : states) counts.push_back(x[static_cast<std::size_t>(species)]);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    std::unordered_map<std::int64_t, std::size_t> slot;
    for (std::size_t i = 0; i < counts.size(); ++i) slot[counts[i]] = i;

    const double alpha = 1.0 - c / r;
    MarginalBounds mb;
    mb.counts = counts;
    mb.lower.assign(counts.size(), 0.0);
    mb.upper.assign(counts.size(), 0.0);
    std::vector<double> acc(counts.size());
    bool first = true;
    for (const auto& el : sweep.elems) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < states.size(); ++i) {
            acc[slot[states[i][static_cast<std::size_t>(species)]]] += el.dist.values[i];
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (first) {
                mb.lower[i] = mb.upper[i] = acc[i];
            } else {
                mb.lower[i] = std::min(mb.lower[i], acc[i]);
                mb.upper[i] = std::max(mb.upper[i], acc[i]);
            }
        }
        first = false;
    }
    double lmass = 0, umass = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        // indicator averages are nonnegative: the (1 - c/r) scaling is always
        // the smaller lower value and the unscaled max the larger upper one
        mb.lower[i] *= alpha;
        lmass += mb.lower[i];
        umass += mb.upper[i];
    }
    mb.lower_error_exact = 1.0 - lmass;
    mb.upper_tv_lo = umass - 1.0;
    mb.upper_tv_hi = std::max(umass - 1.0 + c / r, c / r);
    mb.upper_l1_hi = umass - 1.0 + 2.0 * c / r;
    return mb;
}

}  // namespace ctmc

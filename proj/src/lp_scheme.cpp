#include "ctmc/lp_scheme.hpp"

#include <algorithm>
#include <cmath>

namespace ctmc {

namespace {

// Relative stationary magnitudes from a cheap reflected-chain solve, floored
// to keep the range representable. Scaling each variable by its estimated
// magnitude keeps the simplex solution O(1); without it, basis condition
// numbers grow with the solution's dynamic range and pricing breaks down once
// the range passes 1/eps (large truncations of multimodal chains).
std::vector<double> magnitude_estimate(const ReactionNetwork& net,
                                       const std::shared_ptr<const Truncation>& T) {
    std::vector<double> est(static_cast<std::size_t>(T->size()), 1.0);
    try {
        auto sys = build_augmented(net, T, ReentrySpec::boundary_mid());
        auto pi = ta_solve(sys);
        double pmax = 0;
        for (double v : pi.values) pmax = std::max(pmax, v);
        if (pmax > 0) {
            for (std::size_t i = 0; i < est.size(); ++i) {
                // floor the range: below this the state's bounds are zero to
                // working precision anyway, and more aggressive scaling would
                // push simplex intermediates toward double overflow
                est[i] = std::max(std::abs(pi.values[i]) / pmax, 1e-120);
            }
        }
    } catch (const std::exception&) {
        // reducible or otherwise degenerate truncations: no estimate
    }
    return est;
}

}  // namespace

OuterPolytope build_polytope(const ReactionNetwork& net,
                             std::shared_ptr<const Truncation> T, const Expr& w, double c,
                             double r) {
    if (c < 0) throw SchemeError("moment bound must be nonnegative");
    if (r <= c) {
        throw SchemeError("truncation parameter must exceed the moment bound (r = " +
                          std::to_string(r) + ", c = " + std::to_string(c) + ")");
    }
    OuterPolytope poly;
    poly.trunc = std::move(T);
    poly.c = c;
    poly.r = r;
    const Truncation& tr = *poly.trunc;
    const int n = tr.size();
    std::vector<double> mag = magnitude_estimate(net, poly.trunc);
    poly.scale.reserve(static_cast<std::size_t>(n));
    poly.w_vals.reserve(static_cast<std::size_t>(n));
    for (const auto& x : tr.states) {
        std::size_t i = poly.scale.size();
        poly.scale.push_back(std::max(exit_rate(net, x), 1.0) / mag[i]);
        poly.w_vals.push_back(w.eval_checked(x));
    }
    poly.interior = interior_set(net, tr);

    // columns of the truncated rate matrix, scaled per source state
    SparseMatrix Qr = assemble_Qr(net, tr);
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
    for (int z = 0; z < Qr.rows; ++z) {
        for (int k = Qr.row_ptr[static_cast<std::size_t>(z)];
             k < Qr.row_ptr[static_cast<std::size_t>(z) + 1]; ++k) {
            int x = Qr.col_idx[static_cast<std::size_t>(k)];
            cols[static_cast<std::size_t>(x)].emplace_back(
                z, Qr.vals[static_cast<std::size_t>(k)] / poly.scale[static_cast<std::size_t>(z)]);
        }
    }

    poly.lp = LinearProgram::make(n);
    for (int x : poly.interior) {
        poly.lp.add_row(cols[static_cast<std::size_t>(x)], Rel::EQ, 0.0);
    }
    std::vector<std::pair<int, double>> mass, moment;
    for (int i = 0; i < n; ++i) {
        double inv = 1.0 / poly.scale[static_cast<std::size_t>(i)];
        mass.emplace_back(i, inv);
        if (poly.w_vals[static_cast<std::size_t>(i)] != 0) {
            moment.emplace_back(i, poly.w_vals[static_cast<std::size_t>(i)] * inv);
        }
    }
    poly.lp.add_row(mass, Rel::GE, 1.0 - c / r);
    poly.lp.add_row(mass, Rel::LE, 1.0);
    poly.lp.add_row(std::move(moment), Rel::LE, c);
    return poly;
}

OuterPolytope build_polytope(const ReactionNetwork& net, Truncation T, const Expr& w,
                             double c, double r) {
    return build_polytope(net, share(std::move(T)), w, c, r);
}

namespace {

std::vector<double> unscale(const OuterPolytope& poly, const std::vector<double>& sigma) {
    std::vector<double> pi(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) pi[i] = sigma[i] / poly.scale[i];
    return pi;
}

TruncatedDistribution solve_objective(const OuterPolytope& poly, std::vector<double> obj,
                                      bool maximize) {
    LinearProgram p = poly.lp;
    p.obj = std::move(obj);
    p.maximize = maximize;
    LPSolution s = solve_lp(p);
    if (s.status == LPStatus::Infeasible) {
        throw SchemeError("outer approximation is infeasible (violation " +
                          std::to_string(s.max_violation) +
                          "); the moment bound and truncation are inconsistent");
    }
    if (s.status != LPStatus::Optimal) {
        throw SchemeError("solver failed on a bounded program: " + s.message);
    }
    return make_distribution(poly.trunc, unscale(poly, s.x), 1e-9);
}

}  // namespace

TruncatedDistribution lp_approximate(const OuterPolytope& poly) {
    std::vector<double> obj(poly.scale.size());
    for (std::size_t i = 0; i < obj.size(); ++i) obj[i] = 1.0 / poly.scale[i];
    return solve_objective(poly, std::move(obj), true);
}

ProbeResult lp_ergodic_probe(const OuterPolytope& poly, const State& x) {
    int i = poly.trunc->index_of(x);
    if (i < 0) throw SchemeError("probe state lies outside the truncation");
    std::vector<double> obj(poly.scale.size(), 0.0);
    obj[static_cast<std::size_t>(i)] = 1.0 / poly.scale[static_cast<std::size_t>(i)];
    ProbeResult res{solve_objective(poly, std::move(obj), true), {}};
    for (std::size_t k = 0; k < res.dist.values.size(); ++k) {
        if (res.dist.values[k] > 1e-10) res.support.push_back(static_cast<int>(k));
    }
    return res;
}

StationaryBoundsReport ilp_bounds(const OuterPolytope& poly,
                                  const std::vector<std::vector<double>>& objectives) {
    StationaryBoundsReport report;
    SimplexSolver session(poly.lp);
    const std::size_t n = poly.scale.size();
    for (const auto& f : objectives) {
        ObjectiveBounds ob;
        if (f.size() != n) {
            ob.message = "objective length does not match the truncation";
            report.per_objective.push_back(std::move(ob));
            continue;
        }
        std::vector<double> obj(n);
        for (std::size_t i = 0; i < n; ++i) obj[i] = f[i] / poly.scale[i];
        LPSolution lo = session.optimize(obj, false);
        LPSolution hi = session.optimize(obj, true);
        if (lo.status == LPStatus::Optimal && hi.status == LPStatus::Optimal) {
            ob.lower = lo.objective;
            ob.upper = hi.objective;
            ob.ok = true;
        } else {
            ob.message = lo.status == LPStatus::Optimal ? hi.message : lo.message;
        }
        report.per_objective.push_back(std::move(ob));
    }
    return report;
}

StatewiseIlpResult ilp_statewise_bounds(const OuterPolytope& poly) {
    const int n = poly.trunc->size();
    std::vector<std::vector<double>> objectives;
    objectives.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> f(static_cast<std::size_t>(n), 0.0);
        f[static_cast<std::size_t>(i)] = 1.0;
        objectives.push_back(std::move(f));
    }
    StationaryBoundsReport rep = ilp_bounds(poly, objectives);
    StatewiseIlpResult res;
    std::vector<double> lo(static_cast<std::size_t>(n), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& ob = rep.per_objective[static_cast<std::size_t>(i)];
        if (!ob.ok) {
            throw SchemeError("statewise bound solve failed at index " + std::to_string(i) +
                              ": " + ob.message);
        }
        lo[static_cast<std::size_t>(i)] = std::max(ob.lower, 0.0);
        hi[static_cast<std::size_t>(i)] = ob.upper;
        if (ob.lower > 0) res.uniqueness_certificate = true;
    }
    res.bounds.lower = TruncatedDistribution{poly.trunc, std::move(lo)};
    res.bounds.upper = TruncatedDistribution{poly.trunc, std::move(hi)};
    res.bounds.has_lower = true;
    res.bounds.tail_bound_used = poly.c / poly.r;
    res.bounds.validity = BoundsValidity::StatewiseOnPi;
    return res;
}

MarginalBounds ilp_marginal_bounds(const OuterPolytope& poly, int species) {
    const auto& states = poly.trunc->states;
    if (states.empty() || species < 0 ||
        species >= static_cast<int>(states.front().size())) {
        throw SchemeError("species index out of range");
    }
    std::vector<std::int64_t> counts;
    for (const auto& x : states) counts.push_back(x[static_cast<std::size_t>(species)]);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

    std::vector<std::vector<double>> objectives;
    objectives.reserve(counts.size());
    for (std::int64_t v : counts) {
        std::vector<double> f(states.size(), 0.0);
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i][static_cast<std::size_t>(species)] == v) f[i] = 1.0;
        }
        objectives.push_back(std::move(f));
    }
    StationaryBoundsReport rep = ilp_bounds(poly, objectives);
    MarginalBounds mb;
    mb.counts = std::move(counts);
    double lmass = 0, umass = 0;
    for (const auto& ob : rep.per_objective) {
        if (!ob.ok) throw SchemeError("marginal bound solve failed: " + ob.message);
        mb.lower.push_back(std::max(ob.lower, 0.0));
        mb.upper.push_back(ob.upper);
        lmass += mb.lower.back();
        umass += mb.upper.back();
    }
    double tail = poly.c / poly.r;
    mb.lower_error_exact = 1.0 - lmass;
    mb.upper_tv_lo = umass - 1.0;
    mb.upper_tv_hi = std::max(umass - 1.0 + tail, tail);
    mb.upper_l1_hi = umass - 1.0 + 2.0 * tail;
    return mb;
}

}  // namespace ctmc

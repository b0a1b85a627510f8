#pragma once

#include "ctmc/bdp.hpp"
#include "ctmc/distribution.hpp"

namespace ctmc {

// Product-form stationary distribution of a one-species birth-death network
// with an adaptive cutoff: the series is extended until the normalized
// increment stays below tol (relative to the largest term) for 50 consecutive
// states, then renormalized over the kept range.
TruncatedDistribution series_reference(const ReactionNetwork& net, double tol = 1e-14,
                                       int state_cap = 200000);

// The autocatalytic one-species benchmark network with rate constants
// (k1, k2, k3, k4): 2S -> 3S, 3S -> 2S, 0 -> S, S -> 0, all mass-action.
ReactionNetwork schlogl_network(double k1, double k2, double k3, double k4);

TruncatedDistribution schlogl_reference(double k1, double k2, double k3, double k4,
                                        double tol = 1e-14);

// Certified two-species reference: sweep-based statewise bounds on a sublevel
// truncation plus their midpoint. `guarantee` is the exact total variation
// error 1 - l(S) of the lower bound, which also limits how far the midpoint
// can sit from the stationary distribution.
struct CertifiedReference {
    BoundsPair bounds;
    TruncatedDistribution midpoint;
    double guarantee = 0;
};

CertifiedReference certified_reference(const ReactionNetwork& net, const Expr& w, double c,
                                       double r_ref);

// The mutually-repressing two-gene benchmark at its published operating point:
// moment function (P1+P2)^6 with certified bound c (default 1.8e7) at
// truncation r_ref (0 selects the default 238^6, 28441 states). Throws when
// the achieved guarantee misses guarantee_tol; pass a nonpositive tolerance
// to disable the check.
CertifiedReference toggle_reference(double c = 1.8e7, double r_ref = 0,
                                    double guarantee_tol = 1e-7);

struct BenchmarkCase {
    std::string id;  // schlogl-bimodal | schlogl-unimodal | toggle
    ReactionNetwork net;
    Expr w;                            // truncation / moment function
    ExprPtr level_fn;                  // level function for the QBD scheme
    double c = 0;                      // certified moment bound pi(w) <= c
    double r_ref = 0;                  // truncation of the reference solve
    std::vector<double> r_grid;
    std::vector<std::string> schemes;  // subset of {bdp, ta, ldqbdp, lp, ita, ilp}
};

BenchmarkCase make_benchmark_case(const std::string& id);

// One grid cell of the scheme comparison. Distribution schemes report the
// reference-based scheme-specific l1 error and leave the computable bound
// columns at NaN; bound schemes additionally report the exact lower-bound
// total variation error and the computable bracket on the upper bound's.
struct CompareRow {
    std::string scheme;
    double r = 0;
    std::size_t states = 0;
    double l1_scheme_error = 0;
    double tv_lower_error = 0;
    double tv_upper_bracket_lo = 0;
    double tv_upper_bracket_hi = 0;
    double tail_bound = 0;
    double wall_ms = 0;
    std::string note;  // nonempty when the cell failed; the run continues
};

struct CompareTable {
    std::vector<CompareRow> rows;
    std::string to_csv() const;
};

CompareTable compare_schemes(const BenchmarkCase& bc);

}  // namespace ctmc

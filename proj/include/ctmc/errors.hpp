#pragma once

#include <optional>

#include "ctmc/lpsolve.hpp"
#include "ctmc/ta.hpp"

namespace ctmc {

// Provenance of a reported number: proved from computable inputs alone,
// computed against a trusted reference solution, or merely indicative.
enum class Rigor { Rigorous, OracleBased, Heuristic };

std::string rigor_label(Rigor r);

struct ErrorEntry {
    std::string name;
    double value = 0;
    Rigor rigor = Rigor::Heuristic;
};

// Flat error summary for one scheme run; serializes with a fixed field order
// and a rigor label attached to every numeric entry.
struct ErrorReport {
    std::string scheme;
    std::string truncation;
    std::vector<ErrorEntry> entries;

    void add(std::string name, double value, Rigor rigor);
    std::optional<double> find(const std::string& name) const;
    std::string to_json() const;
};

struct DistanceTriple {
    double tv = 0;     // sup over sets of the difference in probability
    double l1 = 0;
    double wnorm = 0;  // sum of w-weighted absolute differences
};

// Distances between two zero-padded vectors over the union of the supports.
DistanceTriple distances(const TruncatedDistribution& a, const TruncatedDistribution& b,
                         const Expr* w = nullptr);
DistanceTriple distances(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>* w = nullptr);

// Truncation-error bound c/r for the r-sublevel truncation of a moment
// function w with stationary moment bound pi(w) <= c.
double tail_bound(double c, double r);

// Error measures derivable from statewise bounds l <= pi <= u on the
// truncation. The lower bound's total variation and l1 errors are exactly
// 1 - l(S_r); the upper bound's errors are bracketed using the tail bound.
struct BoundErrorSummary {
    double lower_tv = 0;        // exact, equals the l1 error as well
    double upper_tv_lo = 0;     // u(S_r) - 1
    double upper_tv_hi = 0;     // max{u(S_r) - 1 + tail, tail}
    double upper_l1_hi = 0;     // u(S_r) - 1 + 2 tail
    double tail_bound_used = 0;
};

BoundErrorSummary bound_errors(const BoundsPair& bp, double tail);

// Metrics of an approximating distribution against a trusted reference on a
// (larger) truncation: the maximum relative error max |approx - pi| / approx
// over the approximation's truncation (infinity when the approximation
// vanishes where the reference does not) and the total variation error
// m_r + sum of underestimates.
struct ConditionalMetrics {
    double max_relative_error = 0;
    double tv_error = 0;
    double tail_mass = 0;  // reference mass outside the approximation support
};

ConditionalMetrics conditional_metrics(const TruncatedDistribution& approx,
                                       const TruncatedDistribution& oracle);

// Finite-set verification of the drift inequality Qv <= d 1_F - f and the
// stationary bounds it implies. The verification covers only the supplied
// check set; values of a Lyapunov function on a finite set prove nothing
// about the chain elsewhere, and the scope note says so.
struct DriftCertificate {
    double d = 0;                 // minimal feasible constant on the check set
    double pi_f_bound = 0;        // pi(f) <= d
    double complement_bound = 0;  // pi(S \ F) <= 1 - 1/d
    double max_residual = 0;      // max over check set of Qv + f - d 1_F
    std::size_t f_size = 0;
    std::size_t check_size = 0;
    std::string scope = "finite-set verification only";
};

DriftCertificate drift_apply(const ReactionNetwork& net, const Expr& v, const Expr& f,
                             const std::vector<State>& F,
                             const std::vector<State>& check);

// Inputs of the Lyapunov-based bound on the total variation error of the
// single-re-entry truncated-and-reflected approximation: a function v and
// constant d such that Qv <= d 1_F - f on the state space for some f >= 1.
struct LyapunovBoundInput {
    Expr v;
    std::vector<State> F;
    double d = 0;
};

struct LyapunovBoundResult {
    double bound = 0;     // (v(z) + d / (beta phi_bar)) * outflow
    double phi_bar = 0;   // max_x min_{y in F} [(I - Q_r / beta)^{-1}](x, y)
    double outflow = 0;   // O_r of the re-entry approximation
    double beta = 0;
};

// The bound for re-entry state z on truncation T; throws when phi_bar <= 0
// (the bound is inapplicable at this truncation size) or F is not inside T.
LyapunovBoundResult lyapunov_error_bound(const ReactionNetwork& net,
                                         std::shared_ptr<const Truncation> T,
                                         const State& z, const LyapunovBoundInput& in,
                                         double beta);

// Same bound over a beta grid, reusing the re-entry solve.
std::vector<LyapunovBoundResult> lyapunov_error_bound_scan(
    const ReactionNetwork& net, std::shared_ptr<const Truncation> T, const State& z,
    const LyapunovBoundInput& in, const std::vector<double>& betas);

// Tightening of the Lyapunov bound: a linear program re-optimizes the values
// of v on F's single-jump-closed core F_o, keeping the certificate valid.
// The result never exceeds the plain bound.
struct RefinedBoundResult {
    double bound = 0;
    double c_r = 0;              // optimal value of the tightening program
    double plain_bound = 0;      // the unrefined value, for comparison
    std::size_t core_size = 0;   // |F_o|
};

RefinedBoundResult tighten_bound_lp(const ReactionNetwork& net,
                                    std::shared_ptr<const Truncation> T, const State& z,
                                    const LyapunovBoundInput& in, double beta);

// Max |(rho Q)(x)| over the given states for a zero-padded vector rho; the
// basic correctness probe for any scheme output.
double stationary_residual(const ReactionNetwork& net, const TruncatedDistribution& rho,
                           const std::vector<State>& states);

}  // namespace ctmc

#pragma once

#include <optional>
#include <unordered_map>

#include "ctmc/bdp.hpp"
#include "ctmc/numlin.hpp"

namespace ctmc {

// Where probability mass leaving the truncation is redirected.
struct ReentrySpec {
    enum class Kind { FixedState, Uniform, BoundaryMid, Custom, ConditionalSeries };
    Kind kind = Kind::BoundaryMid;
    State state;    // FixedState target
    int depth = 0;  // ConditionalSeries partial-sum depth
    // Custom: truncation index of an out-boundary state -> sparse row of
    // re-entry probabilities (truncation index, probability), summing to 1.
    std::unordered_map<int, std::vector<std::pair<int, double>>> rows;

    static ReentrySpec fixed(State z);
    static ReentrySpec uniform();
    static ReentrySpec boundary_mid();
    static ReentrySpec custom(std::unordered_map<int, std::vector<std::pair<int, double>>> rows);
    static ReentrySpec conditional_series(int depth);
};

// Rate matrix of the chain reflected back into the truncation:
// q^e(x,y) = q(x,y) + q_o(x) e(x,y).
struct AugmentedSystem {
    std::shared_ptr<const Truncation> trunc;
    ReactionNetwork net;  // kept for reducibility diagnostics on failure
    SparseMatrix Qr;  // plain truncated rates, diagonal carries the full exit
    SparseMatrix Qe;  // re-entry-augmented rates, conservative rows
    OutBoundary ob;
    std::vector<double> exit;  // full exit rates q(x), truncation order
    ReentrySpec spec;
    // Resolved single re-entry state when the spec is (or reduces to) one.
    int fixed_index = -1;
};

AugmentedSystem build_augmented(const ReactionNetwork& net, Truncation T, ReentrySpec e);
AugmentedSystem build_augmented(const ReactionNetwork& net,
                                std::shared_ptr<const Truncation> T, ReentrySpec e);

// Stationary distribution of the augmented chain. Single-re-entry systems use
// the inverse-row shortcut (solve Qr^T y = e_z, normalize) when the solution
// is sign-consistent to 1e-10 relative; otherwise, and for general re-entry,
// the stationary equation of the state with the largest exit rate is replaced
// by the normalization row and its residual is checked afterwards
// (<= 1e-8 * max row scale). `force_general` skips the shortcut.
TruncatedDistribution ta_solve(const AugmentedSystem& sys, bool force_general = false);

// Truncated first-re-entry series: mass leaving an out-boundary state is
// propagated through up to `depth`+1 exterior jump-chain steps; the hits back
// inside the truncation, renormalized to sum 1, form a Custom re-entry row.
ReentrySpec conditional_reentry_approx(const ReactionNetwork& net, const Truncation& T,
                                       int depth, std::size_t state_cap = kDefaultStateCap);

// Outflow rate O_r = sum_x pi(x) q_o(x) and, when a weight function and a
// single re-entry state are available, the heuristic convergence factor
// (w(z) + max_{x in B_o} w(x)) * O_r. Neither is a rigorous error bound.
struct TaDiagnostics {
    double outflow = 0;
    std::optional<double> conv_factor;
};

TaDiagnostics ta_diagnostics(const AugmentedSystem& sys, const TruncatedDistribution& pi,
                             const Expr* w = nullptr);

}  // namespace ctmc

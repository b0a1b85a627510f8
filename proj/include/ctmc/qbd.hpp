#pragma once

#include <Eigen/Dense>

#include "ctmc/bdp.hpp"
#include "ctmc/numlin.hpp"

namespace ctmc {

// Block-tridiagonal view of the truncated rate matrix under a level
// structure: diag[l] holds within-level rates, up[l] the rates into level
// l+1, down[l] the rates into level l-1.
struct QbdBlocks {
    std::shared_ptr<const Truncation> trunc;
    LevelStructure levels;
    std::vector<Eigen::MatrixXd> diag;
    std::vector<Eigen::MatrixXd> up;    // up[last] is empty
    std::vector<Eigen::MatrixXd> down;  // down[0] is empty

    int n_levels() const { return static_cast<int>(diag.size()); }
};

// Splits assemble_Qr into blocks; an entry that jumps more than one level is
// an error (the level structure does not fit the chain).
QbdBlocks extract_blocks(const ReactionNetwork& net, std::shared_ptr<const Truncation> T,
                         const LevelStructure& levels);
QbdBlocks extract_blocks(const ReactionNetwork& net, Truncation T, const Expr& level_fn);

// Rebuilds the full truncated matrix from the blocks (round-trip check).
SparseMatrix reassemble_blocks(const QbdBlocks& blocks);

// R[l] (for l = 1..L_r-1) maps level l-1 weights to level l weights; R[0] is
// unused. Computed by the downward recursion
//   R^l = -Q^{l-1}_up (Q^l + R^{l+1} Q^{l+1}_down)^{-1}
// seeded with a zero terminal matrix. Entries below -1e-12 are an error;
// smaller negatives are clipped to zero.
using RMatrixSequence = std::vector<Eigen::MatrixXd>;

RMatrixSequence r_matrix_recursion(const QbdBlocks& blocks, int L_r);

// Solves the level-0 stationary equations rho (Q^0 + R^1 Q^1_down) = 0
// jointly with the normalization sum_l rho R^1...R^l 1 = 1 as one stacked
// least-squares system, then propagates the level distributions. States in
// levels at or beyond the cut-off get probability zero.
TruncatedDistribution ldqbdp_solve(const QbdBlocks& blocks, const RMatrixSequence& rs);

// Level cut-off used by the two-species benchmark: floor(r^(1/6)).
int level_cutoff_hint(double r);

}  // namespace ctmc

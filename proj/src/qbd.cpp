#include "ctmc/qbd.hpp"

#include <cmath>

namespace ctmc {

QbdBlocks extract_blocks(const ReactionNetwork& net, std::shared_ptr<const Truncation> T,
                         const LevelStructure& levels) {
    QbdBlocks b;
    b.trunc = std::move(T);
    b.levels = levels;
    const int L = static_cast<int>(levels.levels.size());
    // position of each truncation index within its level
    std::vector<int> pos(b.trunc->states.size(), -1);
    for (int l = 0; l < L; ++l) {
        const auto& lvl = levels.levels[static_cast<std::size_t>(l)];
        for (int p = 0; p < static_cast<int>(lvl.size()); ++p) {
            pos[static_cast<std::size_t>(lvl[static_cast<std::size_t>(p)])] = p;
        }
    }
    auto size_of = [&](int l) {
        return static_cast<Eigen::Index>(levels.levels[static_cast<std::size_t>(l)].size());
    };
    b.diag.resize(static_cast<std::size_t>(L));
    b.up.resize(static_cast<std::size_t>(L));
    b.down.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        b.diag[static_cast<std::size_t>(l)] = Eigen::MatrixXd::Zero(size_of(l), size_of(l));
        if (l + 1 < L)
            b.up[static_cast<std::size_t>(l)] =
                Eigen::MatrixXd::Zero(size_of(l), size_of(l + 1));
        if (l > 0)
            b.down[static_cast<std::size_t>(l)] =
                Eigen::MatrixXd::Zero(size_of(l), size_of(l - 1));
    }
    SparseMatrix Qr = assemble_Qr(net, *b.trunc);
    for (int i = 0; i < Qr.rows; ++i) {
        int li = levels.level_of[static_cast<std::size_t>(i)];
        for (int k = Qr.row_ptr[static_cast<std::size_t>(i)];
             k < Qr.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            int j = Qr.col_idx[static_cast<std::size_t>(k)];
            double v = Qr.vals[static_cast<std::size_t>(k)];
            int lj = levels.level_of[static_cast<std::size_t>(j)];
            int pi = pos[static_cast<std::size_t>(i)], pj = pos[static_cast<std::size_t>(j)];
            if (lj == li) {
                b.diag[static_cast<std::size_t>(li)](pi, pj) = v;
            } else if (lj == li + 1) {
                b.up[static_cast<std::size_t>(li)](pi, pj) = v;
            } else if (lj == li - 1) {
                b.down[static_cast<std::size_t>(li)](pi, pj) = v;
            } else {
                throw SchemeError("rate from level " + std::to_string(li) + " to level " +
                                  std::to_string(lj) + " breaks the tridiagonal band");
            }
        }
    }
    return b;
}

QbdBlocks extract_blocks(const ReactionNetwork& net, Truncation T, const Expr& level_fn) {
    auto shared = share(std::move(T));
    LevelStructure ls = detect_levels(net, *shared, level_fn);
    return extract_blocks(net, shared, ls);
}

SparseMatrix reassemble_blocks(const QbdBlocks& b) {
    std::vector<std::tuple<int, int, double>> trip;
    const int L = b.n_levels();
    auto emit = [&](int li, int lj, const Eigen::MatrixXd& M) {
        const auto& ri = b.levels.levels[static_cast<std::size_t>(li)];
        const auto& cj = b.levels.levels[static_cast<std::size_t>(lj)];
        for (Eigen::Index p = 0; p < M.rows(); ++p) {
            for (Eigen::Index q = 0; q < M.cols(); ++q) {
                if (M(p, q) != 0) {
                    trip.emplace_back(ri[static_cast<std::size_t>(p)],
                                      cj[static_cast<std::size_t>(q)], M(p, q));
                }
            }
        }
    };
    for (int l = 0; l < L; ++l) {
        emit(l, l, b.diag[static_cast<std::size_t>(l)]);
        if (l + 1 < L) emit(l, l + 1, b.up[static_cast<std::size_t>(l)]);
        if (l > 0) emit(l, l - 1, b.down[static_cast<std::size_t>(l)]);
    }
    int n = b.trunc->size();
    return SparseMatrix::from_triplets(n, n, std::move(trip));
}

RMatrixSequence r_matrix_recursion(const QbdBlocks& b, int L_r) {
    if (L_r < 2) throw SchemeError("level cut-off must be at least 2");
    if (L_r > b.n_levels()) throw SchemeError("level cut-off exceeds the level count");
    RMatrixSequence rs(static_cast<std::size_t>(L_r));
    Eigen::MatrixXd RQdown;  // R^{l+1} Q^{l+1}_down, empty past the terminal level
    for (int l = L_r - 1; l >= 1; --l) {
        const Eigen::MatrixXd& Ql = b.diag[static_cast<std::size_t>(l)];
        Eigen::MatrixXd M = Ql;
        if (RQdown.size() > 0) M += RQdown;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) {
            throw SchemeError("singular inner matrix at level " + std::to_string(l));
        }
        Eigen::MatrixXd R = -b.up[static_cast<std::size_t>(l - 1)] * lu.inverse();
        double lo = R.minCoeff();
        if (lo < -1e-12) {
            throw SchemeError("significantly negative ratio-matrix entry " +
                              std::to_string(lo) + " at level " + std::to_string(l));
        }
        R = R.cwiseMax(0.0);
        rs[static_cast<std::size_t>(l)] = R;
        if (l > 1) RQdown = rs[static_cast<std::size_t>(l)] * b.down[static_cast<std::size_t>(l)];
    }
    return rs;
}

TruncatedDistribution ldqbdp_solve(const QbdBlocks& b, const RMatrixSequence& rs) {
    const int L_r = static_cast<int>(rs.size());
    if (L_r < 2) throw SchemeError("level cut-off must be at least 2");
    if (L_r > b.n_levels()) throw SchemeError("ratio sequence longer than the level count");
    const Eigen::Index n0 =
        static_cast<Eigen::Index>(b.levels.levels[0].size());

    Eigen::MatrixXd M = b.diag[0] + rs[1] * b.down[1];
    // normalization column: sum over levels of (R^1 ... R^l) 1
    Eigen::VectorXd s = Eigen::VectorXd::Ones(n0);
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n0, n0);
    for (int l = 1; l < L_r; ++l) {
        G = G * rs[static_cast<std::size_t>(l)];
        s += G.rowwise().sum();
    }
    // rho [M | s] = [0 ... 0 1], solved as the transposed least-squares system
    Eigen::MatrixXd At(n0 + 1, n0);
    At.topRows(n0) = M.transpose();
    At.bottomRows(1) = s.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n0 + 1);
    rhs[n0] = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
    if (qr.rank() < n0) {
        throw SchemeError(
            "level-0 stationary system is rank deficient (chain probably reducible)");
    }
    // the system is overdetermined and, away from the exact ratio limit,
    // inconsistent: the least-squares residual is part of the approximation
    Eigen::VectorXd rho = qr.solve(rhs);

    std::vector<double> vals(static_cast<std::size_t>(b.trunc->size()), 0.0);
    Eigen::RowVectorXd g = rho.transpose();
    double mass = 0;
    for (int l = 0; l < L_r; ++l) {
        if (l > 0) g = g * rs[static_cast<std::size_t>(l)];
        const auto& lvl = b.levels.levels[static_cast<std::size_t>(l)];
        for (int p = 0; p < static_cast<int>(lvl.size()); ++p) {
            vals[static_cast<std::size_t>(lvl[static_cast<std::size_t>(p)])] = g[p];
            mass += g[p];
        }
    }
    for (double& v : vals) v /= mass;  // normalization held exactly
    return make_distribution(b.trunc, std::move(vals), 1e-9);
}

int level_cutoff_hint(double r) {
    return static_cast<int>(std::floor(std::pow(r, 1.0 / 6.0) + 1e-9));
}

}  // namespace ctmc

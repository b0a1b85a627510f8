#include "ctmc/numlin.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <tuple>

namespace ctmc {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<std::tuple<int, int, double>> trip) {
    std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseMatrix A;
    A.rows = rows;
    A.cols = cols;
    A.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < trip.size() && std::get<0>(trip[i]) == r) {
            int c = std::get<1>(trip[i]);
            double v = 0;
            while (i < trip.size() && std::get<0>(trip[i]) == r && std::get<1>(trip[i]) == c) {
                v += std::get<2>(trip[i]);
                ++i;
            }
            if (v != 0.0) {
                A.col_idx.push_back(c);
                A.vals.push_back(v);
            }
        }
        A.row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(A.col_idx.size());
    }
    return A;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<std::tuple<int, int, double>> trip;
    trip.reserve(vals.size());
    for (int r = 0; r < rows; ++r) {
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            trip.emplace_back(col_idx[static_cast<std::size_t>(k)], r, vals[static_cast<std::size_t>(k)]);
        }
    }
    return from_triplets(cols, rows, std::move(trip));
}

double SparseMatrix::max_abs() const {
    double m = 0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
        double acc = 0;
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            acc += vals[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
}

std::vector<double> SparseMatrix::multiply_transposed(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < rows; ++r) {
        double xr = x[static_cast<std::size_t>(r)];
        if (xr == 0) continue;
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            y[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])] +=
                vals[static_cast<std::size_t>(k)] * xr;
        }
    }
    return y;
}

SparseMatrix assemble_Qr(const ReactionNetwork& net, const Truncation& T) {
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < T.size(); ++i) {
        double q = 0;
        for (const auto& [y, rate] : rate_row(net, T.states[static_cast<std::size_t>(i)])) {
            q += rate;
            int j = T.index_of(y);
            if (j >= 0) trip.emplace_back(i, j, rate);
        }
        if (q != 0) trip.emplace_back(i, i, -q);
    }
    return SparseMatrix::from_triplets(T.size(), T.size(), std::move(trip));
}

struct LUFactorization::Impl {
    Eigen::SparseMatrix<double> A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

LUFactorization::LUFactorization(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
    if (A.rows != A.cols) throw NumLinError("lu_factor requires a square matrix");
    pivot_floor_ = 1e-12 * A.max_abs();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.vals.size());
    for (int r = 0; r < A.rows; ++r) {
        for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            trip.emplace_back(r, A.col_idx[static_cast<std::size_t>(k)], A.vals[static_cast<std::size_t>(k)]);
        }
    }
    impl_->A.resize(A.rows, A.cols);
    impl_->A.setFromTriplets(trip.begin(), trip.end());
    impl_->A.makeCompressed();
    impl_->lu.isSymmetric(false);
    impl_->lu.compute(impl_->A);
    if (impl_->lu.info() != Eigen::Success) {
        singular_ = true;
        return;
    }
    // probe: a structurally successful factorization can still be numerically
    // rank deficient; test the residual contract on a deterministic rhs.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.rows);
    Eigen::VectorXd b = impl_->A * ones;
    Eigen::VectorXd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success || !x.allFinite()) {
        singular_ = true;
        return;
    }
    double resid = (impl_->A * x - b).cwiseAbs().maxCoeff();
    if (resid > 1e-6 * (1.0 + b.cwiseAbs().maxCoeff())) singular_ = true;
}

LUFactorization::~LUFactorization() = default;
LUFactorization::LUFactorization(LUFactorization&&) noexcept = default;
LUFactorization& LUFactorization::operator=(LUFactorization&&) noexcept = default;

std::vector<double> LUFactorization::solve(const std::vector<double>& b) const {
    if (singular_) throw NumLinError("solve called on a singular factorization");
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = impl_->lu.solve(bm);
    return std::vector<double>(x.data(), x.data() + x.size());
}

LUFactorization lu_factor(const SparseMatrix& A) { return LUFactorization(A); }

}  // namespace ctmc

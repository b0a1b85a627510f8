#pragma once

#include <memory>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "ctmc/statespace.hpp"

namespace ctmc {

class NumLinError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compressed-row sparse matrix. Column indices strictly increasing within a
// row; explicit zeros are dropped at build time.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;   // size rows+1
    std::vector<int> col_idx;
    std::vector<double> vals;

    static SparseMatrix from_triplets(int rows, int cols,
                                      std::vector<std::tuple<int, int, double>> trip);
    SparseMatrix transposed() const;
    double max_abs() const;
    // y = A^T x and y = A x
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> multiply_transposed(const std::vector<double>& x) const;
};

// (q(x,y))_{x,y in T}, diagonal = -q(x) with the FULL exit rate, so rows of
// boundary states sum to -q_o(x).
SparseMatrix assemble_Qr(const ReactionNetwork& net, const Truncation& T);

// Sparse LU with partial pivoting (backed by a supernodal factorization).
// Singularity is a flag, not an error: it is raised when factorization fails
// outright or a probe solve violates the residual contract, which catches
// pivots below the documented floor of 1e-12 * max|A|.
class LUFactorization {
public:
    explicit LUFactorization(const SparseMatrix& A);
    ~LUFactorization();
    LUFactorization(LUFactorization&&) noexcept;
    LUFactorization& operator=(LUFactorization&&) noexcept;

    bool singular() const { return singular_; }
    double pivot_floor() const { return pivot_floor_; }

    // Solves Ax = b, reusing the factorization across calls.
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    bool singular_ = false;
    double pivot_floor_ = 0;
};

LUFactorization lu_factor(const SparseMatrix& A);

}  // namespace ctmc

#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ctmc {

enum class Rel { LE, EQ, GE };

struct LinearProgram {
    struct Row {
        std::vector<std::pair<int, double>> coef;  // sparse (variable, value)
        Rel rel = Rel::EQ;
        double rhs = 0;
    };

    int n = 0;
    std::vector<double> obj;  // size n
    bool maximize = false;
    std::vector<Row> rows;
    // per-variable bounds; defaults [0, +inf). A lower bound of -inf makes the
    // variable free. Finite upper bounds are folded in as extra rows.
    std::vector<double> lo, up;

    static LinearProgram make(int n) {
        LinearProgram p;
        p.n = n;
        p.obj.assign(n, 0.0);
        p.lo.assign(n, 0.0);
        p.up.assign(n, std::numeric_limits<double>::infinity());
        return p;
    }
    void add_row(std::vector<std::pair<int, double>> coef, Rel rel, double rhs) {
        rows.push_back({std::move(coef), rel, rhs});
    }
};

enum class LPStatus { Optimal, Infeasible, Unbounded, Breakdown };

struct LPSolution {
    LPStatus status = LPStatus::Breakdown;
    std::vector<double> x;
    double objective = 0;
    double max_violation = 0;
    int iterations = 0;
    std::string message;
};

// Revised simplex with product-form basis updates, Ruiz equilibration and
// Bland anti-cycling after 10(m+n) degenerate iterations. Deterministic for
// identical input. The solver object keeps its basis between optimize()
// calls, so re-optimizing the same constraints under a new objective is warm
// started (used heavily by the per-state bound sweeps).
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& p);
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    LPSolution optimize(const std::vector<double>& obj, bool maximize);

private:
    LPSolution optimize_reduced(const std::vector<double>& obj, bool maximize);

    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LPSolution solve_lp(const LinearProgram& p);

}  // namespace ctmc

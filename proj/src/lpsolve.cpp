#include "ctmc/lpsolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ctmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivTol = 1e-9;
constexpr int kRefactorEvery = 96;

// Chains of homogeneous two-variable equality rows (balance equations of a
// birth-death recurrence) force every feasible point onto a ray whose dynamic
// range can exceed 1e300. A simplex basis containing such a chain is as
// ill-conditioned as that range, which silently breaks pricing. Substituting
// the chains away first is exact and stable -- it reproduces the product-form
// recurrence -- and leaves a small, well-conditioned program.
struct Presolve {
    bool active = false;       // substitutions were made; reduced is valid
    bool infeasible = false;   // detected outright during elimination
    LinearProgram original;    // untouched copy for violation reporting
    LinearProgram reduced;
    std::vector<int> head;     // resolved representative (-1: fixed at zero)
    std::vector<double> mult;  // x[j] = mult[j] * x[head[j]]
    std::vector<int> to_reduced, from_reduced;

    // follow substitution links with path compression
    void resolve(int j) {
        int h = head[j];
        if (h < 0 || h == j) return;
        resolve(h);
        if (head[h] < 0) {
            head[j] = -1;
            mult[j] = 0;
        } else {
            mult[j] *= mult[h];
            head[j] = head[h];
        }
    }

    // combine a row's coefficients through the current substitutions
    std::vector<std::pair<int, double>> fold(const LinearProgram::Row& row) {
        std::vector<std::pair<int, double>> out;
        for (const auto& [j, a] : row.coef) {
            resolve(j);
            if (head[j] < 0) continue;
            double v = a * mult[j];
            if (v == 0) continue;
            bool merged = false;
            for (auto& [h, acc] : out) {
                if (h == head[j]) {
                    acc += v;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.emplace_back(head[j], v);
        }
        return out;
    }

    bool run(const LinearProgram& p);
    int telescope(const LinearProgram& p, std::vector<char>& dropped);
};

// Substituting a long balance chain one doubleton at a time reproduces the
// three-term recurrence, whose rounding errors grow like the solution's own
// dynamic range across a probability valley. Prefix sums of the balance rows
// telescope instead: the trailing variable's coefficient cancels exactly
// (generator columns sum to zero), every prefix collapses to a two-variable
// cut-balance row, and the resulting ratios multiply out stably. Returns the
// number of eliminated variables, or 0 if the rows do not form such a chain.
int Presolve::telescope(const LinearProgram& p, std::vector<char>& dropped) {
    std::vector<std::size_t> chain;
    for (std::size_t ri = 0; ri < p.rows.size(); ++ri) {
        if (p.rows[ri].rel == Rel::EQ && p.rows[ri].rhs == 0) chain.push_back(ri);
    }
    if (chain.size() < 2) return 0;

    std::vector<double> acc(p.n, 0.0);
    std::vector<double> addmax(p.n, 0.0);  // largest |term| folded into acc[j]
    std::vector<int> support;
    std::vector<char> fixed(p.n, 0);
    struct Link {
        int i, j;
        double k;  // x[j] = k * x[i], k > 0
    };
    std::vector<Link> links;
    std::vector<int> fixes;
    for (std::size_t ri : chain) {
        for (const auto& [j, a] : p.rows[ri].coef) {
            if (fixed[j] || a == 0) continue;
            if (acc[j] == 0) support.push_back(j);
            acc[j] += a;
            addmax[j] = std::max(addmax[j], std::abs(a));
        }
        // cancellation is judged per variable against the terms that were
        // actually folded into it: with per-variable scaling the coefficients
        // of different variables can differ by hundreds of orders of
        // magnitude, so a row-wide threshold would misclassify both residue
        // and genuine cut coefficients
        std::erase_if(support, [&](int j) {
            if (std::abs(acc[j]) <= 1e-9 * addmax[j]) {
                acc[j] = 0;
                return true;
            }
            return false;
        });
        if (support.size() == 2) {
            int i = support[0], j = support[1];
            if (!(acc[i] * acc[j] < 0)) return 0;
            links.push_back({i, j, -acc[i] / acc[j]});
        } else if (support.size() == 1) {
            fixes.push_back(support[0]);
            fixed[support[0]] = 1;
            acc[support[0]] = 0;
            support.clear();
        } else if (!support.empty()) {
            return 0;
        }
    }

    // links must form a forest disjoint from the fixed variables; propagate
    // magnitudes and root each tree at its largest entry so the multipliers
    // only underflow, never overflow
    std::vector<std::vector<std::pair<int, double>>> adj(p.n);
    for (const auto& l : links) {
        adj[l.i].emplace_back(l.j, l.k);
        adj[l.j].emplace_back(l.i, 1.0 / l.k);
    }
    for (int j : fixes) {
        if (!adj[j].empty()) return 0;
    }
    std::vector<long double> val(p.n, 0.0L);
    std::vector<int> comp, stack;
    std::vector<char> seen(p.n, 0);
    std::vector<std::pair<int, std::pair<int, double>>> assign;  // var -> (root, mult)
    for (const auto& l : links) {
        if (seen[l.i]) continue;
        comp.clear();
        stack.assign(1, l.i);
        seen[l.i] = 1;
        val[l.i] = 1.0L;
        std::size_t edges = 0;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (const auto& [v, k] : adj[u]) {
                ++edges;
                if (seen[v]) continue;
                seen[v] = 1;
                val[v] = val[u] * static_cast<long double>(k);
                if (!std::isfinite(static_cast<long double>(val[v]))) return 0;
                stack.push_back(v);
            }
        }
        if (edges != 2 * (comp.size() - 1)) return 0;  // cycle
        int root = comp.front();
        for (int u : comp) {
            if (std::abs(val[u]) > std::abs(val[root])) root = u;
        }
        for (int u : comp) {
            if (u != root) assign.emplace_back(u, std::pair<int, double>{
                root, static_cast<double>(val[u] / val[root])});
        }
    }
    int eliminated = 0;
    for (const auto& [u, rk] : assign) {
        head[u] = rk.first;
        mult[u] = rk.second;
        ++eliminated;
    }
    for (int j : fixes) {
        head[j] = -1;
        mult[j] = 0;
        ++eliminated;
    }
    if (eliminated == 0) return 0;
    for (std::size_t ri : chain) dropped[ri] = 1;
    return eliminated;
}

bool Presolve::run(const LinearProgram& p) {
    original = p;
    // only the plain x >= 0 variable domain is handled here
    for (int j = 0; j < p.n; ++j) {
        if (j < static_cast<int>(p.lo.size()) && p.lo[j] != 0) return false;
        if (j < static_cast<int>(p.up.size()) && std::isfinite(p.up[j])) return false;
    }
    head.resize(p.n);
    mult.assign(p.n, 1.0);
    for (int j = 0; j < p.n; ++j) head[j] = j;

    std::vector<char> dropped(p.rows.size(), 0);
    int eliminated = telescope(p, dropped);
    bool changed = eliminated == 0;
    for (int pass = 0; changed && pass < static_cast<int>(p.rows.size()) + 2; ++pass) {
        changed = false;
        for (std::size_t ri = 0; ri < p.rows.size(); ++ri) {
            const auto& row = p.rows[ri];
            if (dropped[ri] || row.rel != Rel::EQ || row.rhs != 0) continue;
            auto coef = fold(row);
            // entries dwarfed by the rest of the row are cancellation residue
            double amax = 0;
            for (const auto& [h, v] : coef) amax = std::max(amax, std::abs(v));
            std::erase_if(coef, [&](const auto& e) {
                return std::abs(e.second) <= 1e-12 * amax;
            });
            if (coef.size() > 2) continue;
            if (coef.empty()) {
                dropped[ri] = 1;
                continue;
            }
            if (coef.size() == 1) {
                head[coef[0].first] = -1;  // a * x = 0, x >= 0
                mult[coef[0].first] = 0;
            } else {
                auto [i, a] = coef[0];
                auto [j, b] = coef[1];
                if (a * b > 0) {
                    // same sign with x >= 0: both must vanish
                    head[i] = head[j] = -1;
                    mult[i] = mult[j] = 0;
                } else {
                    // keep the lower index as the surviving representative
                    if (i > j) {
                        std::swap(i, j);
                        std::swap(a, b);
                    }
                    double k = -a / b;
                    if (!std::isfinite(k)) return false;
                    head[j] = i;
                    mult[j] = k;
                }
            }
            dropped[ri] = 1;
            ++eliminated;
            changed = true;
        }
    }
    if (eliminated == 0) return false;

    to_reduced.assign(p.n, -1);
    for (int j = 0; j < p.n; ++j) {
        resolve(j);
        if (head[j] == j && to_reduced[j] < 0) {
            to_reduced[j] = static_cast<int>(from_reduced.size());
            from_reduced.push_back(j);
        }
    }
    if (from_reduced.empty()) return false;

    reduced = LinearProgram::make(static_cast<int>(from_reduced.size()));
    for (std::size_t ri = 0; ri < p.rows.size(); ++ri) {
        if (dropped[ri]) continue;
        auto coef = fold(p.rows[ri]);
        if (coef.empty()) {
            double rhs = p.rows[ri].rhs;
            bool bad = (p.rows[ri].rel == Rel::EQ && rhs != 0) ||
                       (p.rows[ri].rel == Rel::LE && rhs < 0) ||
                       (p.rows[ri].rel == Rel::GE && rhs > 0);
            if (bad) infeasible = true;
            continue;
        }
        for (auto& [h, v] : coef) h = to_reduced[h];
        reduced.add_row(std::move(coef), p.rows[ri].rel, p.rows[ri].rhs);
    }
    active = true;
    return true;
}

}  // namespace

struct SimplexSolver::Impl {
    // --- standardized problem: min c.x  s.t.  A x = b, x >= 0 ------------
    int m = 0;              // rows
    int ncols = 0;          // structural + slack columns (artificials follow)
    int art0 = 0;           // first artificial column index
    std::vector<std::vector<std::pair<int, double>>> cols;  // incl. artificials
    std::vector<double> b;  // scaled, nonnegative
    std::vector<double> cscale;

    struct VarMap {
        int pos = -1;
        int neg = -1;  // >= 0 only for free variables
        double offset = 0;
    };
    std::vector<VarMap> vmap;
    LinearProgram orig;  // program given to build(), incl. folded upper-bound rows
    Presolve pre;        // if active, build() saw pre.reduced

    // --- simplex state ----------------------------------------------------
    std::vector<int> basic;
    std::vector<char> in_basis;
    std::vector<double> xB;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    std::vector<std::pair<int, Eigen::VectorXd>> etas;
    bool feasible_basis = false;
    bool bland = false;
    long degen_count = 0;
    int total_iters = 0;

    enum class RunResult { Optimal, Unbounded, Breakdown, IterLimit };

    void build(const LinearProgram& p);
    void reset_to_artificial_basis();
    void refactor();
    Eigen::VectorXd col_dense(int j) const;
    Eigen::VectorXd ftran(Eigen::VectorXd v) const;
    Eigen::VectorXd btran(Eigen::VectorXd c) const;
    RunResult run(const std::vector<double>& cost, bool phase1, int iter_cap);
    double basis_cost(const std::vector<double>& cost) const;
};

void SimplexSolver::Impl::build(const LinearProgram& p) {
    orig = p;
    if (orig.lo.empty()) orig.lo.assign(orig.n, 0.0);
    if (orig.up.empty()) orig.up.assign(orig.n, kInf);
    if (static_cast<int>(orig.obj.size()) != orig.n) orig.obj.resize(orig.n, 0.0);
    // fold finite upper bounds into rows
    for (int j = 0; j < orig.n; ++j) {
        if (std::isfinite(orig.up[j])) {
            orig.add_row({{j, 1.0}}, Rel::LE, orig.up[j]);
        }
    }
    m = static_cast<int>(orig.rows.size());

    // variable mapping (shift by finite lower bounds, split free variables)
    vmap.resize(orig.n);
    int nc = 0;
    for (int j = 0; j < orig.n; ++j) {
        if (std::isfinite(orig.lo[j])) {
            vmap[j].pos = nc++;
            vmap[j].offset = orig.lo[j];
        } else {
            vmap[j].pos = nc++;
            vmap[j].neg = nc++;
        }
    }
    int nslack = 0;
    for (const auto& row : orig.rows) {
        if (row.rel != Rel::EQ) ++nslack;
    }
    ncols = nc + nslack;

    // shifted right-hand side and row signs
    b.assign(m, 0.0);
    std::vector<double> sign(m, 1.0);
    for (int i = 0; i < m; ++i) {
        double rhs = orig.rows[i].rhs;
        for (const auto& [j, a] : orig.rows[i].coef) {
            if (std::isfinite(orig.lo[j])) rhs -= a * orig.lo[j];
        }
        b[i] = rhs;
    }

    cols.assign(static_cast<std::size_t>(ncols) + m, {});
    for (int i = 0; i < m; ++i) {
        for (const auto& [j, a] : orig.rows[i].coef) {
            if (a == 0) continue;
            cols[vmap[j].pos].emplace_back(i, a);
            if (vmap[j].neg >= 0) cols[vmap[j].neg].emplace_back(i, -a);
        }
    }
    {
        int s = nc;
        for (int i = 0; i < m; ++i) {
            if (orig.rows[i].rel == Rel::LE) {
                cols[s++].emplace_back(i, 1.0);
            } else if (orig.rows[i].rel == Rel::GE) {
                cols[s++].emplace_back(i, -1.0);
            }
        }
    }
    // flip rows so that b >= 0 (keeps the artificial basis feasible)
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            sign[i] = -1.0;
            b[i] = -b[i];
        }
    }
    for (auto& col : cols) {
        for (auto& [i, a] : col) a *= sign[i];
    }

    // Ruiz equilibration: symmetric max-norm scaling of rows and columns
    std::vector<double> rscale(m, 1.0);
    cscale.assign(static_cast<std::size_t>(ncols) + m, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
        std::vector<double> rmax(m, 0.0);
        for (int j = 0; j < ncols; ++j) {
            for (const auto& [i, a] : cols[j]) rmax[i] = std::max(rmax[i], std::abs(a));
        }
        for (int i = 0; i < m; ++i) {
            double s = rmax[i] > 0 ? 1.0 / std::sqrt(rmax[i]) : 1.0;
            rscale[i] *= s;
            b[i] *= s;
        }
        for (int j = 0; j < ncols; ++j) {
            double cmax = 0;
            for (auto& [i, a] : cols[j]) {
                double s = rmax[i] > 0 ? 1.0 / std::sqrt(rmax[i]) : 1.0;
                a *= s;
                cmax = std::max(cmax, std::abs(a));
            }
            double s = cmax > 0 ? 1.0 / std::sqrt(cmax) : 1.0;
            cscale[j] *= s;
            for (auto& [i, a] : cols[j]) a *= s;
        }
    }

    // artificial identity columns
    art0 = ncols;
    for (int i = 0; i < m; ++i) cols[art0 + i].emplace_back(i, 1.0);

    reset_to_artificial_basis();
}

void SimplexSolver::Impl::reset_to_artificial_basis() {
    basic.resize(m);
    in_basis.assign(cols.size(), 0);
    for (int i = 0; i < m; ++i) {
        basic[i] = art0 + i;
        in_basis[art0 + i] = 1;
    }
    etas.clear();
    lu.compute(Eigen::MatrixXd::Identity(m, m));
    xB.assign(b.begin(), b.end());
    feasible_basis = false;
    bland = false;
    degen_count = 0;
}

Eigen::VectorXd SimplexSolver::Impl::col_dense(int j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (const auto& [i, a] : cols[j]) v[i] = a;
    return v;
}

Eigen::VectorXd SimplexSolver::Impl::ftran(Eigen::VectorXd v) const {
    Eigen::VectorXd x = lu.solve(v);
    for (const auto& [p, w] : etas) {
        double xp = x[p] / w[p];
        x -= xp * w;
        x[p] = xp;
    }
    return x;
}

Eigen::VectorXd SimplexSolver::Impl::btran(Eigen::VectorXd c) const {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
        const auto& [p, w] = *it;
        double cp = c[p];
        // y_p = (c_p - sum_{i != p} w_i c_i) / w_p with y_i = c_i elsewhere
        double dot = w.dot(c) - w[p] * c[p];
        c[p] = (cp - dot) / w[p];
    }
    return lu.transpose().solve(c);
}

void SimplexSolver::Impl::refactor() {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = col_dense(basic[i]);
    lu.compute(B);
    etas.clear();
    Eigen::VectorXd bb = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    Eigen::VectorXd x = lu.solve(bb);
    for (int i = 0; i < m; ++i) xB[i] = x[i];
}

double SimplexSolver::Impl::basis_cost(const std::vector<double>& cost) const {
    double v = 0;
    for (int i = 0; i < m; ++i) v += cost[basic[i]] * xB[i];
    return v;
}

SimplexSolver::Impl::RunResult SimplexSolver::Impl::run(const std::vector<double>& cost,
                                                        bool phase1, int iter_cap) {
    double cmax = 0;
    for (double c : cost) cmax = std::max(cmax, std::abs(c));
    const double dj_tol = 1e-9 * (1.0 + cmax);
    Eigen::VectorXd cB(m);

    for (int iter = 0; iter < iter_cap; ++iter) {
        ++total_iters;
        for (int i = 0; i < m; ++i) cB[i] = cost[basic[i]];
        Eigen::VectorXd y = btran(cB);

        // pricing
        int enter = -1;
        double best = -dj_tol;
        int limit = phase1 ? static_cast<int>(cols.size()) : art0;
        for (int j = 0; j < limit; ++j) {
            if (in_basis[j]) continue;
            double d = cost[j];
            for (const auto& [i, a] : cols[j]) d -= a * y[i];
            if (d < best) {
                if (bland) {
                    enter = j;
                    break;
                }
                best = d;
                enter = j;
            }
        }
        if (enter < 0) return RunResult::Optimal;

        Eigen::VectorXd w = ftran(col_dense(enter));

        // ratio test; rows holding a basic artificial may also pivot at t = 0
        // on a negative entry so they cannot be driven positive
        double best_t = kInf;
        int leave = -1;
        double leave_piv = 0;
        for (int i = 0; i < m; ++i) {
            double wi = w[i];
            bool candidate = false;
            double t = 0;
            if (wi > kPivTol) {
                t = std::max(xB[i], 0.0) / wi;
                candidate = true;
            } else if (wi < -kPivTol && basic[i] >= art0 && xB[i] <= kPivTol) {
                t = 0.0;
                candidate = true;
            }
            if (!candidate) continue;
            bool take = false;
            if (t < best_t - 1e-12) {
                take = true;
            } else if (t <= best_t + 1e-12) {
                if (bland) {
                    take = leave < 0 || basic[i] < basic[leave];
                } else if (std::abs(wi) > std::abs(leave_piv) + 1e-12) {
                    take = true;
                } else if (std::abs(wi) >= std::abs(leave_piv) - 1e-12 &&
                           (leave < 0 || basic[i] < basic[leave])) {
                    take = true;
                }
            }
            if (take) {
                best_t = std::min(best_t, t);
                leave = i;
                leave_piv = wi;
            }
        }
        if (leave < 0) return RunResult::Unbounded;
        if (std::abs(leave_piv) < kPivTol) return RunResult::Breakdown;

        double t = best_t;
        for (int i = 0; i < m; ++i) xB[i] -= t * w[i];
        xB[leave] = t;
        in_basis[basic[leave]] = 0;
        in_basis[enter] = 1;
        basic[leave] = enter;
        etas.emplace_back(leave, std::move(w));

        if (t < 1e-10) {
            if (++degen_count > 10L * (m + ncols)) bland = true;
        } else {
            degen_count = 0;
            bland = false;
        }

        if (static_cast<int>(etas.size()) >= kRefactorEvery) {
            refactor();
            double floor = 0;
            for (int i = 0; i < m; ++i) floor = std::min(floor, xB[i]);
            if (floor < -1e-6 * (1.0 + *std::max_element(b.begin(), b.end()))) {
                return RunResult::Breakdown;
            }
            for (int i = 0; i < m; ++i) xB[i] = std::max(xB[i], 0.0);
        }
    }
    return RunResult::IterLimit;
}

SimplexSolver::SimplexSolver(const LinearProgram& p) : impl_(std::make_unique<Impl>()) {
    if (p.n < 1) throw std::invalid_argument("linear program needs at least one variable");
    if (impl_->pre.run(p)) {
        impl_->build(impl_->pre.reduced);
    } else {
        impl_->build(p);
    }
}

SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

namespace {

double worst_violation(const LinearProgram& p, const std::vector<double>& x) {
    double worst = 0;
    for (const auto& row : p.rows) {
        double lhs = 0;
        for (const auto& [j, a] : row.coef) lhs += a * x[j];
        double v = 0;
        if (row.rel == Rel::LE) v = lhs - row.rhs;
        if (row.rel == Rel::GE) v = row.rhs - lhs;
        if (row.rel == Rel::EQ) v = std::abs(lhs - row.rhs);
        worst = std::max(worst, v);
    }
    for (int j = 0; j < p.n; ++j) {
        double lo = j < static_cast<int>(p.lo.size()) ? p.lo[j] : 0.0;
        if (std::isfinite(lo)) worst = std::max(worst, lo - x[j]);
    }
    return worst;
}

}  // namespace

LPSolution SimplexSolver::optimize(const std::vector<double>& obj, bool maximize) {
    Impl& im = *impl_;
    if (im.pre.active) {
        const Presolve& pre = im.pre;
        if (pre.infeasible) {
            LPSolution sol;
            sol.status = LPStatus::Infeasible;
            sol.message = "constraints reduce to a contradiction";
            return sol;
        }
        std::vector<double> robj(static_cast<std::size_t>(im.orig.n), 0.0);
        for (int j = 0; j < pre.original.n; ++j) {
            if (pre.head[j] >= 0) {
                robj[static_cast<std::size_t>(pre.to_reduced[pre.head[j]])] +=
                    pre.mult[j] * obj[j];
            }
        }
        LPSolution sol = optimize_reduced(robj, maximize);
        if (sol.status != LPStatus::Optimal) return sol;
        std::vector<double> x(static_cast<std::size_t>(pre.original.n), 0.0);
        for (int j = 0; j < pre.original.n; ++j) {
            if (pre.head[j] >= 0) {
                x[static_cast<std::size_t>(j)] =
                    pre.mult[j] * sol.x[static_cast<std::size_t>(pre.to_reduced[pre.head[j]])];
            }
        }
        sol.x = std::move(x);
        sol.objective = 0;
        for (int j = 0; j < pre.original.n; ++j) {
            sol.objective += obj[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
        }
        sol.max_violation = worst_violation(pre.original, sol.x);
        return sol;
    }
    return optimize_reduced(obj, maximize);
}

LPSolution SimplexSolver::optimize_reduced(const std::vector<double>& obj, bool maximize) {
    Impl& im = *impl_;
    LPSolution sol;
    const int iter_cap = std::max(20000, 40 * (im.m + im.ncols));

    double bmax = 0;
    for (double v : im.b) bmax = std::max(bmax, v);
    const double feas_tol = 1e-9 * (1.0 + bmax);

    for (int attempt = 0; attempt < 2; ++attempt) {
        if (!im.feasible_basis) {
            std::vector<double> c1(im.cols.size(), 0.0);
            for (std::size_t j = im.art0; j < im.cols.size(); ++j) c1[j] = 1.0;
            auto r = im.run(c1, /*phase1=*/true, iter_cap);
            if (r == Impl::RunResult::Breakdown || r == Impl::RunResult::IterLimit) {
                im.reset_to_artificial_basis();
                if (attempt == 1) {
                    sol.status = LPStatus::Breakdown;
                    sol.message = "phase 1 did not converge";
                    sol.iterations = im.total_iters;
                    return sol;
                }
                continue;
            }
            if (im.basis_cost(c1) > feas_tol) {
                sol.status = LPStatus::Infeasible;
                sol.message = "phase 1 infeasibility " + std::to_string(im.basis_cost(c1));
                sol.iterations = im.total_iters;
                return sol;
            }
            im.feasible_basis = true;
            im.bland = false;
            im.degen_count = 0;
        }

        // phase 2 costs in standardized, column-scaled variables
        std::vector<double> c2(im.cols.size(), 0.0);
        for (int j = 0; j < im.orig.n; ++j) {
            double cj = maximize ? -obj[j] : obj[j];
            c2[im.vmap[j].pos] = cj * im.cscale[im.vmap[j].pos];
            if (im.vmap[j].neg >= 0) c2[im.vmap[j].neg] = -cj * im.cscale[im.vmap[j].neg];
        }
        auto r = im.run(c2, /*phase1=*/false, iter_cap);
        if (r == Impl::RunResult::Unbounded) {
            sol.status = LPStatus::Unbounded;
            sol.iterations = im.total_iters;
            return sol;
        }
        if (r != Impl::RunResult::Optimal) {
            // refactor once and retry from a clean phase 1
            im.reset_to_artificial_basis();
            if (attempt == 1) {
                sol.status = LPStatus::Breakdown;
                sol.message = "phase 2 did not converge";
                sol.iterations = im.total_iters;
                return sol;
            }
            continue;
        }

        // recover the point in original variables
        im.refactor();  // tighten xB before reporting
        std::vector<double> xs(im.cols.size(), 0.0);
        for (int i = 0; i < im.m; ++i) xs[im.basic[i]] = std::max(im.xB[i], 0.0);
        sol.x.assign(im.orig.n, 0.0);
        for (int j = 0; j < im.orig.n; ++j) {
            double v = xs[im.vmap[j].pos] * im.cscale[im.vmap[j].pos];
            if (im.vmap[j].neg >= 0) v -= xs[im.vmap[j].neg] * im.cscale[im.vmap[j].neg];
            sol.x[j] = v + im.vmap[j].offset;
        }
        sol.objective = 0;
        for (int j = 0; j < im.orig.n; ++j) sol.objective += obj[j] * sol.x[j];
        sol.max_violation = 0;
        for (const auto& row : im.orig.rows) {
            double lhs = 0;
            for (const auto& [j, a] : row.coef) lhs += a * sol.x[j];
            double v = 0;
            if (row.rel == Rel::LE) v = lhs - row.rhs;
            if (row.rel == Rel::GE) v = row.rhs - lhs;
            if (row.rel == Rel::EQ) v = std::abs(lhs - row.rhs);
            sol.max_violation = std::max(sol.max_violation, v);
        }
        for (int j = 0; j < im.orig.n; ++j) {
            if (std::isfinite(im.orig.lo[j])) {
                sol.max_violation = std::max(sol.max_violation, im.orig.lo[j] - sol.x[j]);
            }
        }
        sol.status = LPStatus::Optimal;
        sol.iterations = im.total_iters;
        return sol;
    }
    return sol;
}

LPSolution solve_lp(const LinearProgram& p) {
    SimplexSolver s(p);
    return s.optimize(p.obj, p.maximize);
}

}  // namespace ctmc

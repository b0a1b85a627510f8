#include "ctmc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace ctmc {

std::string rigor_label(Rigor r) {
    switch (r) {
        case Rigor::Rigorous: return "rigorous";
        case Rigor::OracleBased: return "oracle-based";
        case Rigor::Heuristic: return "heuristic";
    }
    return "heuristic";
}

void ErrorReport::add(std::string name, double value, Rigor rigor) {
    entries.push_back({std::move(name), value, rigor});
}

std::optional<double> ErrorReport::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return e.value;
    }
    return std::nullopt;
}

std::string ErrorReport::to_json() const {
    nlohmann::ordered_json j;
    j["scheme"] = scheme;
    j["truncation"] = truncation;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json je;
        je["name"] = e.name;
        if (std::isfinite(e.value)) {
            je["value"] = e.value;
        } else {
            je["value"] = e.value > 0 ? "inf" : (e.value < 0 ? "-inf" : "nan");
        }
        je["rigor"] = rigor_label(e.rigor);
        j["entries"].push_back(std::move(je));
    }
    return j.dump(2);
}

namespace {

struct DiffAccum {
    double pos = 0, neg = 0, l1 = 0, wnorm = 0;

    void take(double diff, double wval) {
        if (diff > 0) pos += diff;
        else neg -= diff;
        l1 += std::abs(diff);
        wnorm += std::abs(diff) * wval;
    }

    DistanceTriple finish() const { return {std::max(pos, neg), l1, wnorm}; }
};

}  // namespace

DistanceTriple distances(const TruncatedDistribution& a, const TruncatedDistribution& b,
                         const Expr* w) {
    DiffAccum acc;
    const auto& sa = a.trunc->states;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        acc.take(a.values[i] - b.at(sa[i]), w ? w->eval_checked(sa[i]) : 0.0);
    }
    const auto& sb = b.trunc->states;
    for (std::size_t i = 0; i < sb.size(); ++i) {
        if (a.trunc->contains(sb[i])) continue;
        acc.take(-b.values[i], w ? w->eval_checked(sb[i]) : 0.0);
    }
    return acc.finish();
}

DistanceTriple distances(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>* w) {
    const std::size_t n = std::max(a.size(), b.size());
    if (w && w->size() < n) throw SchemeError("weight vector shorter than the operands");
    DiffAccum acc;
    for (std::size_t i = 0; i < n; ++i) {
        double av = i < a.size() ? a[i] : 0.0;
        double bv = i < b.size() ? b[i] : 0.0;
        acc.take(av - bv, w ? (*w)[i] : 0.0);
    }
    return acc.finish();
}

double tail_bound(double c, double r) {
    if (c < 0) throw SchemeError("moment bound must be nonnegative");
    if (r <= 0) throw SchemeError("truncation parameter must be positive");
    return c / r;
}

BoundErrorSummary bound_errors(const BoundsPair& bp, double tail) {
    if (tail < 0 || tail > 1) {
        throw SchemeError("tail bound " + std::to_string(tail) + " is outside [0, 1]");
    }
    BoundErrorSummary s;
    s.tail_bound_used = tail;
    double lmass = 0;
    if (bp.has_lower) {
        for (double v : bp.lower.values) lmass += v;
    }
    s.lower_tv = 1.0 - lmass;
    double umass = 0;
    for (double v : bp.upper.values) umass += v;
    s.upper_tv_lo = umass - 1.0;
    s.upper_tv_hi = std::max(umass - 1.0 + tail, tail);
    s.upper_l1_hi = umass - 1.0 + 2.0 * tail;
    return s;
}

ConditionalMetrics conditional_metrics(const TruncatedDistribution& approx,
                                       const TruncatedDistribution& oracle) {
    ConditionalMetrics m;
    const auto& states = approx.trunc->states;
    double inside = 0, under = 0, rel = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        double p = oracle.at(states[i]);
        double q = approx.values[i];
        inside += p;
        if (q < p) under += p - q;
        if (p != q) {
            rel = q > 0 ? std::max(rel, std::abs(q - p) / q)
                        : std::numeric_limits<double>::infinity();
        }
    }
    m.tail_mass = std::max(0.0, 1.0 - inside);
    m.tv_error = m.tail_mass + under;
    m.max_relative_error = rel;
    return m;
}

DriftCertificate drift_apply(const ReactionNetwork& net, const Expr& v, const Expr& f,
                             const std::vector<State>& F,
                             const std::vector<State>& check) {
    if (F.empty()) throw SchemeError("drift verification needs a nonempty finite set");
    std::unordered_set<State, StateHash> fset(F.begin(), F.end());
    DriftCertificate cert;
    cert.f_size = F.size();
    cert.check_size = check.size();

    double d = -std::numeric_limits<double>::infinity();
    for (const auto& x : F) {
        double fv = f.eval_checked(x);
        if (fv < 1.0 - 1e-12) {
            throw SchemeError("f(" + state_to_string(x) + ") = " + std::to_string(fv) +
                              " is below 1");
        }
        d = std::max(d, apply_generator(net, v, x) + fv);
    }
    if (!(d > 0)) {
        throw SchemeError("no positive drift constant arises on the given set");
    }
    cert.d = d;

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& x : check) {
        if (v.eval_checked(x) < -1e-12) {
            throw SchemeError("v(" + state_to_string(x) + ") is negative");
        }
        double fv = f.eval_checked(x);
        if (fv < 1.0 - 1e-12) {
            throw SchemeError("f(" + state_to_string(x) + ") = " + std::to_string(fv) +
                              " is below 1");
        }
        bool in_f = fset.count(x) > 0;
        double res = apply_generator(net, v, x) + fv - (in_f ? d : 0.0);
        worst = std::max(worst, res);
        if (!in_f && res > 1e-9 * (1.0 + std::abs(d))) {
            throw SchemeError("drift inequality fails outside the finite set at " +
                              state_to_string(x) + " (residual " + std::to_string(res) +
                              ")");
        }
    }
    cert.max_residual = worst;
    cert.pi_f_bound = d;
    cert.complement_bound = std::max(0.0, 1.0 - 1.0 / d);
    return cert;
}

namespace {

// max_x min_{y in F} of the columns y of (I - Q_r / beta)^{-1}
double resolvent_gap(const ReactionNetwork& net, const Truncation& T,
                     const std::vector<int>& f_idx, double beta) {
    SparseMatrix Qr = assemble_Qr(net, T);
    std::vector<std::tuple<int, int, double>> trip;
    trip.reserve(Qr.vals.size() + static_cast<std::size_t>(Qr.rows));
    for (int i = 0; i < Qr.rows; ++i) {
        bool diag_seen = false;
        for (int k = Qr.row_ptr[static_cast<std::size_t>(i)];
             k < Qr.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            int j = Qr.col_idx[static_cast<std::size_t>(k)];
            double v = -Qr.vals[static_cast<std::size_t>(k)] / beta;
            if (j == i) {
                v += 1.0;
                diag_seen = true;
            }
            trip.emplace_back(i, j, v);
        }
        if (!diag_seen) trip.emplace_back(i, i, 1.0);
    }
    SparseMatrix A = SparseMatrix::from_triplets(Qr.rows, Qr.cols, std::move(trip));
    LUFactorization lu(A);
    if (lu.singular()) {
        throw SchemeError("resolvent matrix is singular at beta = " + std::to_string(beta));
    }
    const std::size_t n = static_cast<std::size_t>(T.size());
    std::vector<double> rowmin(n, std::numeric_limits<double>::infinity());
    std::vector<double> e(n, 0.0);
    for (int y : f_idx) {
        e[static_cast<std::size_t>(y)] = 1.0;
        std::vector<double> col = lu.solve(e);
        e[static_cast<std::size_t>(y)] = 0.0;
        for (std::size_t i = 0; i < n; ++i) rowmin[i] = std::min(rowmin[i], col[i]);
    }
    return *std::max_element(rowmin.begin(), rowmin.end());
}

std::vector<int> locate_in_truncation(const Truncation& T, const std::vector<State>& F) {
    std::vector<int> idx;
    idx.reserve(F.size());
    for (const auto& x : F) {
        int i = T.index_of(x);
        if (i < 0) {
            throw SchemeError("finite set state " + state_to_string(x) +
                              " lies outside the truncation");
        }
        idx.push_back(i);
    }
    return idx;
}

void validate_bound_input(const LyapunovBoundInput& in, double beta) {
    if (in.F.empty()) throw SchemeError("the finite set of the certificate is empty");
    if (!(in.d > 0)) throw SchemeError("drift constant must be positive");
    if (!(beta > 0)) throw SchemeError("beta must be positive");
}

}  // namespace

LyapunovBoundResult lyapunov_error_bound(const ReactionNetwork& net,
                                         std::shared_ptr<const Truncation> T,
                                         const State& z, const LyapunovBoundInput& in,
                                         double beta) {
    auto res = lyapunov_error_bound_scan(net, std::move(T), z, in, {beta});
    return res.front();
}

std::vector<LyapunovBoundResult> lyapunov_error_bound_scan(
    const ReactionNetwork& net, std::shared_ptr<const Truncation> T, const State& z,
    const LyapunovBoundInput& in, const std::vector<double>& betas) {
    if (betas.empty()) throw SchemeError("empty beta grid");
    for (double b : betas) validate_bound_input(in, b);
    std::vector<int> f_idx = locate_in_truncation(*T, in.F);
    if (T->index_of(z) < 0) {
        throw SchemeError("re-entry state lies outside the truncation");
    }
    double vz = in.v.eval_checked(z);

    auto sys = build_augmented(net, T, ReentrySpec::fixed(z));
    TruncatedDistribution pi = ta_solve(sys);
    double outflow = ta_diagnostics(sys, pi).outflow;

    std::vector<LyapunovBoundResult> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        double phi_bar = resolvent_gap(net, *T, f_idx, beta);
        if (!(phi_bar > 0)) {
            throw SchemeError("bound inapplicable at this truncation: the resolvent gap "
                              "is not positive (beta = " +
                              std::to_string(beta) + ")");
        }
        LyapunovBoundResult r;
        r.beta = beta;
        r.phi_bar = phi_bar;
        r.outflow = outflow;
        r.bound = (vz + in.d / (beta * phi_bar)) * outflow;
        out.push_back(r);
    }
    return out;
}

RefinedBoundResult tighten_bound_lp(const ReactionNetwork& net,
                                    std::shared_ptr<const Truncation> T, const State& z,
                                    const LyapunovBoundInput& in, double beta) {
    LyapunovBoundResult plain = lyapunov_error_bound(net, T, z, in, beta);

    std::unordered_set<State, StateHash> fset(in.F.begin(), in.F.end());
    // core: states of F with no single-jump exit from F
    std::vector<State> core;
    std::unordered_map<State, int, StateHash> core_idx;
    for (const auto& x : in.F) {
        bool stays = true;
        for (const auto& [y, q] : rate_row(net, x)) {
            (void)q;
            if (!fset.count(y)) {
                stays = false;
                break;
            }
        }
        if (stays) {
            core_idx.emplace(x, static_cast<int>(core.size()));
            core.push_back(x);
        }
    }

    // variables: w over the core, then the drift constant e (free)
    const int nw = static_cast<int>(core.size());
    LinearProgram p = LinearProgram::make(nw + 1);
    p.lo[static_cast<std::size_t>(nw)] = -std::numeric_limits<double>::infinity();
    for (const auto& x : in.F) {
        std::vector<std::pair<int, double>> coef;
        double cst = 0;
        for (const auto& [y, q] : rate_row(net, x)) {
            auto it = core_idx.find(y);
            if (it != core_idx.end()) coef.emplace_back(it->second, q);
            else cst += q * in.v.eval_checked(y);
        }
        double qx = exit_rate(net, x);
        auto self = core_idx.find(x);
        if (self != core_idx.end()) coef.emplace_back(self->second, -qx);
        else cst -= qx * in.v.eval_checked(x);
        coef.emplace_back(nw, -1.0);
        p.add_row(std::move(coef), Rel::LE, -1.0 - cst);
    }
    auto zit = core_idx.find(z);
    if (zit != core_idx.end()) p.obj[static_cast<std::size_t>(zit->second)] = 1.0;
    p.obj[static_cast<std::size_t>(nw)] = 1.0 / (beta * plain.phi_bar);
    p.maximize = false;

    LPSolution sol = solve_lp(p);
    if (sol.status != LPStatus::Optimal) {
        throw SchemeError("tightening program did not solve (" + sol.message +
                          "); its feasibility is guaranteed by the input certificate");
    }
    RefinedBoundResult res;
    res.core_size = core.size();
    res.c_r = sol.objective;
    res.plain_bound = plain.bound;
    double vz = in.v.eval_checked(z);
    res.bound = (zit != core_idx.end() ? res.c_r : vz + res.c_r) * plain.outflow;
    if (res.bound > plain.bound * (1.0 + 1e-9) + 1e-12) {
        throw SchemeError("refined bound exceeds the plain bound; numerical failure");
    }
    res.bound = std::min(res.bound, plain.bound);
    return res;
}

double stationary_residual(const ReactionNetwork& net, const TruncatedDistribution& rho,
                           const std::vector<State>& states) {
    double worst = 0;
    std::unordered_set<State, StateHash> sources;
    for (const auto& x : states) {
        double acc = -rho.at(x) * exit_rate(net, x);
        sources.clear();
        for (const auto& rxn : net.reactions) {
            State z = x;
            bool ok = true;
            for (std::size_t k = 0; k < z.size(); ++k) {
                z[k] -= rxn.nu[k];
                if (z[k] < 0) ok = false;
            }
            if (!ok || !sources.insert(z).second) continue;
            double rz = rho.at(z);
            if (rz == 0) continue;
            for (const auto& [y, q] : rate_row(net, z)) {
                if (y == x) acc += rz * q;
            }
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

}  // namespace ctmc

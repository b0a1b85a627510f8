#include "ctmc/ta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace ctmc {

ReentrySpec ReentrySpec::fixed(State z) {
    ReentrySpec e;
    e.kind = Kind::FixedState;
    e.state = std::move(z);
    return e;
}

ReentrySpec ReentrySpec::uniform() {
    ReentrySpec e;
    e.kind = Kind::Uniform;
    return e;
}

ReentrySpec ReentrySpec::boundary_mid() {
    ReentrySpec e;
    e.kind = Kind::BoundaryMid;
    return e;
}

ReentrySpec ReentrySpec::custom(
    std::unordered_map<int, std::vector<std::pair<int, double>>> rows) {
    ReentrySpec e;
    e.kind = Kind::Custom;
    e.rows = std::move(rows);
    return e;
}

ReentrySpec ReentrySpec::conditional_series(int depth) {
    ReentrySpec e;
    e.kind = Kind::ConditionalSeries;
    e.depth = depth;
    return e;
}

namespace {

void validate_custom_rows(const ReentrySpec& e, const OutBoundary& ob, int n) {
    for (int b : ob.boundary) {
        auto it = e.rows.find(b);
        if (it == e.rows.end()) {
            throw SchemeError("re-entry row missing for out-boundary index " +
                              std::to_string(b));
        }
        double s = 0;
        for (const auto& [j, p] : it->second) {
            if (j < 0 || j >= n) throw SchemeError("re-entry row targets an index outside T");
            if (p < 0) throw SchemeError("negative re-entry probability");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12) {
            throw SchemeError("re-entry row does not sum to 1 (sum = " + std::to_string(s) +
                              ")");
        }
    }
}

}  // namespace

AugmentedSystem build_augmented(const ReactionNetwork& net,
                                std::shared_ptr<const Truncation> T, ReentrySpec e) {
    AugmentedSystem sys;
    sys.trunc = std::move(T);
    const Truncation& tr = *sys.trunc;
    sys.net = net;
    sys.Qr = assemble_Qr(net, tr);
    sys.ob = out_boundary(net, tr);
    sys.exit.reserve(tr.states.size());
    for (const auto& x : tr.states) sys.exit.push_back(exit_rate(net, x));

    if (e.kind == ReentrySpec::Kind::ConditionalSeries) {
        ReentrySpec resolved = conditional_reentry_approx(net, tr, e.depth);
        resolved.kind = ReentrySpec::Kind::ConditionalSeries;
        resolved.depth = e.depth;
        e = std::move(resolved);
    }
    switch (e.kind) {
        case ReentrySpec::Kind::FixedState:
            sys.fixed_index = tr.index_of(e.state);
            if (sys.fixed_index < 0) {
                throw SchemeError("re-entry state " + state_to_string(e.state) +
                                  " lies outside the truncation");
            }
            break;
        case ReentrySpec::Kind::Uniform:
        case ReentrySpec::Kind::BoundaryMid: {
            std::vector<int> ib = in_boundary(net, tr);
            std::sort(ib.begin(), ib.end());  // lexicographic state order
            if (ib.empty()) {
                if (!sys.ob.boundary.empty()) {
                    throw SchemeError(
                        "truncation has out-flow but an empty in-boundary; no re-entry "
                        "target available");
                }
            } else if (e.kind == ReentrySpec::Kind::BoundaryMid) {
                sys.fixed_index = ib[ib.size() / 2];
                e.state = tr.states[static_cast<std::size_t>(sys.fixed_index)];
            } else {
                double p = 1.0 / static_cast<double>(ib.size());
                std::vector<std::pair<int, double>> row;
                row.reserve(ib.size());
                for (int j : ib) row.emplace_back(j, p);
                for (int b : sys.ob.boundary) e.rows[b] = row;
            }
            break;
        }
        case ReentrySpec::Kind::Custom:
        case ReentrySpec::Kind::ConditionalSeries:
            validate_custom_rows(e, sys.ob, tr.size());
            break;
    }
    sys.spec = std::move(e);

    // Q^e = Qr + diag(q_o) E
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < sys.Qr.rows; ++i) {
        for (int k = sys.Qr.row_ptr[static_cast<std::size_t>(i)];
             k < sys.Qr.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            trip.emplace_back(i, sys.Qr.col_idx[static_cast<std::size_t>(k)],
                              sys.Qr.vals[static_cast<std::size_t>(k)]);
        }
    }
    for (int b : sys.ob.boundary) {
        double qo = sys.ob.q_o[static_cast<std::size_t>(b)];
        if (sys.fixed_index >= 0) {
            trip.emplace_back(b, sys.fixed_index, qo);
        } else if (!sys.spec.rows.empty()) {
            for (const auto& [j, p] : sys.spec.rows.at(b)) trip.emplace_back(b, j, qo * p);
        }
    }
    sys.Qe = SparseMatrix::from_triplets(tr.size(), tr.size(), std::move(trip));

    // conservative-rows check
    for (int i = 0; i < sys.Qe.rows; ++i) {
        double s = 0, scale = 0;
        for (int k = sys.Qe.row_ptr[static_cast<std::size_t>(i)];
             k < sys.Qe.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            s += sys.Qe.vals[static_cast<std::size_t>(k)];
            scale += std::abs(sys.Qe.vals[static_cast<std::size_t>(k)]);
        }
        if (std::abs(s) > 1e-12 * (1.0 + scale)) {
            throw SchemeError("augmented rate matrix row " + std::to_string(i) +
                              " is not conservative (sum " + std::to_string(s) + ")");
        }
    }
    return sys;
}

AugmentedSystem build_augmented(const ReactionNetwork& net, Truncation T, ReentrySpec e) {
    return build_augmented(net, share(std::move(T)), std::move(e));
}

namespace {

// Below this size the stationary vector is computed by state reduction with
// subtraction-free updates (Grassmann-Taksar-Heyman elimination). All
// intermediate quantities stay nonnegative, so every component comes out with
// full relative accuracy even when the distribution spans hundreds of orders
// of magnitude -- a regime where an LU solve loses the relative weight of
// well-separated modes once the condition number passes 1/eps. The dense
// O(n^3) cost is the price; larger systems fall back to sparse LU.
constexpr int kDenseStationaryLimit = 1200;

// Stationary vector of the conservative generator Qe, or nullopt when some
// state cannot reach the states ordered before it (reducible chain).
std::optional<std::vector<double>> gth_stationary(const SparseMatrix& Qe) {
    const int n = Qe.rows;
    std::vector<double> W(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int k = Qe.row_ptr[static_cast<std::size_t>(i)];
             k < Qe.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            int j = Qe.col_idx[static_cast<std::size_t>(k)];
            if (j != i) {
                W[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(j)] = Qe.vals[static_cast<std::size_t>(k)];
            }
        }
    }
    auto row = [&](int i) { return W.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n); };
    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    for (int k = n - 1; k >= 1; --k) {
        double* wk = row(k);
        double sk = 0;
        for (int j = 0; j < k; ++j) sk += wk[j];
        if (!(sk > 0) || !std::isfinite(sk)) return std::nullopt;
        s[static_cast<std::size_t>(k)] = sk;
        for (int j = 0; j < k; ++j) wk[j] /= sk;
        for (int i = 0; i < k; ++i) {
            double* wi = row(i);
            double w = wi[k];
            if (w == 0) continue;
            for (int j = 0; j < k; ++j) {
                if (j != i) wi[j] += w * wk[j];
            }
        }
    }
    std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
    pi[0] = 1.0;
    double sum = 1.0;
    for (int k = 1; k < n; ++k) {
        double acc = 0;
        for (int i = 0; i < k; ++i) acc += pi[static_cast<std::size_t>(i)] * row(i)[k];
        pi[static_cast<std::size_t>(k)] = acc / s[static_cast<std::size_t>(k)];
        sum += pi[static_cast<std::size_t>(k)];
    }
    if (!(sum > 0) || !std::isfinite(sum)) return std::nullopt;
    for (double& v : pi) v /= sum;
    return pi;
}

std::string class_diagnostics(const ReactionNetwork& net, const Truncation& T) {
    ClassDecomposition cd = communicating_classes(net, T);
    std::ostringstream os;
    os << cd.closed_classes.size() << " closed class(es) and " << cd.transient.size()
       << " transient state(s) in the truncated graph";
    return os.str();
}

}  // namespace

TruncatedDistribution ta_solve(const AugmentedSystem& sys, bool force_general) {
    const int n = sys.trunc->size();
    if (n == 0) throw SchemeError("empty truncation");

    if (!force_general && n <= kDenseStationaryLimit) {
        auto pi = gth_stationary(sys.Qe);
        if (!pi) {
            throw SchemeError("augmented chain has no unique stationary distribution: " +
                              class_diagnostics(sys.net, *sys.trunc));
        }
        return make_distribution(sys.trunc, std::move(*pi));
    }

    if (!force_general && sys.fixed_index >= 0) {
        LUFactorization lu(sys.Qr.transposed());
        if (!lu.singular()) {
            std::vector<double> e(static_cast<std::size_t>(n), 0.0);
            e[static_cast<std::size_t>(sys.fixed_index)] = 1.0;
            std::vector<double> y = lu.solve(e);
            double pos = 0, neg = 0;
            for (double v : y) {
                if (v > 0) pos = std::max(pos, v);
                else neg = std::max(neg, -v);
            }
            double big = std::max(pos, neg), small = std::min(pos, neg);
            if (big > 0 && small <= 1e-10 * big) {
                double sum = 0;
                std::vector<double> v(y.size());
                bool negative_branch = neg > pos;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    double t = negative_branch ? -y[i] : y[i];
                    v[i] = t > 0 ? t : 0.0;
                    sum += v[i];
                }
                for (double& t : v) t /= sum;
                return make_distribution(sys.trunc, std::move(v));
            }
        }
        // sign-inconsistent or singular: fall through to the general path
    }

    // replace the stationary equation of the state with the largest exit rate
    int rep = static_cast<int>(
        std::max_element(sys.exit.begin(), sys.exit.end()) - sys.exit.begin());
    std::vector<std::tuple<int, int, double>> trip;
    for (int i = 0; i < sys.Qe.rows; ++i) {
        for (int k = sys.Qe.row_ptr[static_cast<std::size_t>(i)];
             k < sys.Qe.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            int j = sys.Qe.col_idx[static_cast<std::size_t>(k)];
            if (j == rep) continue;
            trip.emplace_back(j, i, sys.Qe.vals[static_cast<std::size_t>(k)]);
        }
    }
    for (int j = 0; j < n; ++j) trip.emplace_back(rep, j, 1.0);
    SparseMatrix A = SparseMatrix::from_triplets(n, n, std::move(trip));
    LUFactorization lu(A);
    if (lu.singular()) {
        throw SchemeError("augmented chain has no unique stationary distribution: " +
                          class_diagnostics(sys.net, *sys.trunc));
    }
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    b[static_cast<std::size_t>(rep)] = 1.0;
    std::vector<double> pi = lu.solve(b);

    // the replaced equation must hold to 1e-8 of the largest row scale
    double res = 0, scale = 0;
    for (int i = 0; i < sys.Qe.rows; ++i) {
        double rowabs = 0;
        for (int k = sys.Qe.row_ptr[static_cast<std::size_t>(i)];
             k < sys.Qe.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            double v = sys.Qe.vals[static_cast<std::size_t>(k)];
            rowabs += std::abs(v);
            if (sys.Qe.col_idx[static_cast<std::size_t>(k)] == rep) {
                res += pi[static_cast<std::size_t>(i)] * v;
            }
        }
        scale = std::max(scale, rowabs);
    }
    if (std::abs(res) > 1e-8 * std::max(scale, 1.0)) {
        throw SchemeError("discarded stationary equation violated (residual " +
                          std::to_string(res) + "); " +
                          class_diagnostics(sys.net, *sys.trunc));
    }
    double sum = 0;
    for (double v : pi) sum += v;
    for (double& v : pi) v /= sum;
    return make_distribution(sys.trunc, std::move(pi), 1e-9);
}

ReentrySpec conditional_reentry_approx(const ReactionNetwork& net, const Truncation& T,
                                       int depth, std::size_t state_cap) {
    if (depth < 0) throw SchemeError("series depth must be nonnegative");
    OutBoundary ob = out_boundary(net, T);
    std::unordered_map<int, std::vector<std::pair<int, double>>> rows;
    for (int b : ob.boundary) {
        const State& x = T.states[static_cast<std::size_t>(b)];
        double qo = ob.q_o[static_cast<std::size_t>(b)];
        std::map<State, double> outside;  // ordered for determinism
        for (const auto& [y, rate] : rate_row(net, x)) {
            if (!T.contains(y)) outside[y] += rate / qo;
        }
        std::unordered_map<int, double> hits;
        std::unordered_map<State, std::vector<std::pair<State, double>>, StateHash> jumps;
        for (int step = 0; step <= depth; ++step) {
            std::map<State, double> next;
            for (const auto& [z, wz] : outside) {
                auto it = jumps.find(z);
                if (it == jumps.end()) {
                    it = jumps.emplace(z, jump_probs(net, z)).first;
                    if (jumps.size() > state_cap) {
                        throw SchemeError("exterior shell exceeds the state cap");
                    }
                }
                for (const auto& [y, p] : it->second) {
                    int j = T.index_of(y);
                    if (j >= 0) hits[j] += wz * p;
                    else next[y] += wz * p;
                }
            }
            outside = std::move(next);
        }
        double s = 0;
        for (const auto& [j, h] : hits) s += h;
        if (s <= 0) {
            throw SchemeError("no re-entry path within depth " + std::to_string(depth) +
                              " from " + state_to_string(x));
        }
        std::vector<std::pair<int, double>> row(hits.begin(), hits.end());
        std::sort(row.begin(), row.end());
        for (auto& [j, h] : row) h /= s;
        rows[b] = std::move(row);
    }
    return ReentrySpec::custom(std::move(rows));
}

TaDiagnostics ta_diagnostics(const AugmentedSystem& sys, const TruncatedDistribution& pi,
                             const Expr* w) {
    TaDiagnostics d;
    for (int b : sys.ob.boundary) {
        d.outflow += pi.values[static_cast<std::size_t>(b)] *
                     sys.ob.q_o[static_cast<std::size_t>(b)];
    }
    if (w) {
        if (sys.ob.boundary.empty()) {
            d.conv_factor = 0.0;
        } else if (sys.fixed_index >= 0) {
            double vz =
                w->eval(sys.trunc->states[static_cast<std::size_t>(sys.fixed_index)]);
            double vb = 0;
            for (int b : sys.ob.boundary) {
                vb = std::max(vb, w->eval(sys.trunc->states[static_cast<std::size_t>(b)]));
            }
            d.conv_factor = (vz + vb) * d.outflow;
        }
    }
    return d;
}

}  // namespace ctmc

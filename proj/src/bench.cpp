#include "ctmc/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/ita.hpp"
#include "ctmc/lp_scheme.hpp"
#include "ctmc/qbd.hpp"
#include "ctmc/ta.hpp"

namespace ctmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kToggleModel = R"(
# two mutually repressing genes
species P1 P2
reaction 0 -> P1 : 20 / (1 + P2)
reaction P1 -> 0 : P1
reaction 0 -> P2 : 20 / (1 + P1)
reaction P2 -> 0 : P2
)";

}  // namespace

TruncatedDistribution series_reference(const ReactionNetwork& net, double tol,
                                       int state_cap) {
    if (!(tol > 0 && tol < 1)) throw SchemeError("tolerance must lie in (0, 1)");
    auto spec = BirthDeathSpec::from_network(net);
    std::vector<double> lg{0.0};
    double lgmax = 0, acc = 0;
    const double log_tol = std::log(tol);
    int consec = 0;
    bool settled = false, closed = false;
    for (int x = 1; x < state_cap; ++x) {
        double ap = spec.ap(x - 1);
        double am = spec.am(x);
        if (!(ap > 0)) {  // no births past x-1: the series terminates exactly
            closed = true;
            break;
        }
        if (!(am > 0)) {
            throw SchemeError("death rate vanishes at state " + std::to_string(x) +
                              " while births continue; the series diverges");
        }
        acc += std::log(ap) - std::log(am);
        lg.push_back(acc);
        if (acc > lgmax) {
            lgmax = acc;
            consec = 0;
        } else if (acc - lgmax < log_tol) {
            if (++consec >= 50) {
                settled = true;
                break;
            }
        } else {
            consec = 0;
        }
    }
    if (!settled && !closed) {
        throw SchemeError("stationary series not settled within " +
                          std::to_string(state_cap) + " states");
    }
    std::vector<double> vals(lg.size());
    double sum = 0;
    for (std::size_t i = 0; i < lg.size(); ++i) {
        vals[i] = std::exp(lg[i] - lgmax);
        sum += vals[i];
    }
    for (double& v : vals) v /= sum;
    std::vector<State> states;
    states.reserve(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) states.push_back({static_cast<std::int64_t>(i)});
    return make_distribution(share(make_explicit_truncation(std::move(states))),
                             std::move(vals));
}

ReactionNetwork schlogl_network(double k1, double k2, double k3, double k4) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "species S\n"
       << "param k1 = " << k1 << "\nparam k2 = " << k2 << "\nparam k3 = " << k3
       << "\nparam k4 = " << k4 << "\n"
       << "reaction 2 S -> 3 S : mass_action(k1)\n"
       << "reaction 3 S -> 2 S : mass_action(k2)\n"
       << "reaction 0 -> S : mass_action(k3)\n"
       << "reaction S -> 0 : mass_action(k4)\n";
    return parse_model(os.str());
}

TruncatedDistribution schlogl_reference(double k1, double k2, double k3, double k4,
                                        double tol) {
    return series_reference(schlogl_network(k1, k2, k3, k4), tol);
}

CertifiedReference certified_reference(const ReactionNetwork& net, const Expr& w, double c,
                                       double r_ref) {
    auto T = share(build_sublevel_truncation(net, w, r_ref));
    auto sweep = ita_sweep(net, T);
    CertifiedReference ref;
    ref.bounds = ita_bounds(sweep, c, r_ref);
    double lmass = 0;
    for (double v : ref.bounds.lower.values) lmass += v;
    ref.guarantee = 1.0 - lmass;
    std::vector<double> mid(ref.bounds.lower.values.size());
    for (std::size_t i = 0; i < mid.size(); ++i) {
        mid[i] = 0.5 * (ref.bounds.lower.values[i] + ref.bounds.upper.values[i]);
    }
    ref.midpoint = make_distribution(T, std::move(mid));
    return ref;
}

CertifiedReference toggle_reference(double c, double r_ref, double guarantee_tol) {
    if (r_ref <= 0) r_ref = std::pow(238.0, 6.0);
    auto net = parse_model(kToggleModel);
    Expr w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
    auto ref = certified_reference(net, w, c, r_ref);
    if (guarantee_tol > 0 && !(ref.guarantee < guarantee_tol)) {
        throw SchemeError("certified guarantee " + std::to_string(ref.guarantee) +
                          " misses the requested " + std::to_string(guarantee_tol));
    }
    return ref;
}

BenchmarkCase make_benchmark_case(const std::string& id) {
    BenchmarkCase bc;
    bc.id = id;
    if (id == "schlogl-bimodal" || id == "schlogl-unimodal") {
        bc.net = id == "schlogl-bimodal"
                     ? schlogl_network(0.025, 4.17e-5, 60, 3.127)
                     : schlogl_network(6, 1.0 / 3.0, 50, 3);
        bc.w = *parse_expr("S", {"S"}, {});
        bc.level_fn = parse_expr("S", {"S"}, {});
        auto ref = series_reference(bc.net);
        double mean = 0;
        for (std::size_t i = 0; i < ref.values.size(); ++i) {
            mean += static_cast<double>(i) * ref.values[i];
        }
        bc.c = std::ceil(1.2 * mean);
        bc.r_grid = {100, 200, 300, 400, 500, 600};
        bc.schemes = {"bdp", "ta", "ldqbdp", "lp"};
    } else if (id == "toggle") {
        bc.net = parse_model(kToggleModel);
        bc.w = *parse_expr("(P1 + P2) ^ 6", {"P1", "P2"}, {});
        bc.level_fn = parse_expr("P1 + P2", {"P1", "P2"}, {});
        bc.c = 1.8e7;
        bc.r_ref = std::pow(120.0, 6.0);
        for (double k : {17.0, 22.0, 27.0, 32.0, 37.0, 42.0}) {
            bc.r_grid.push_back(std::pow(k, 6.0));
        }
        bc.schemes = {"ta", "ldqbdp", "lp", "ita", "ilp"};
    } else {
        throw SchemeError("unknown benchmark case '" + id + "'");
    }
    return bc;
}

namespace {

double l1_vs_reference(const Truncation& T, const std::vector<double>& vals,
                       const TruncatedDistribution& ref) {
    double s = 0;
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        s += std::abs(vals[i] - ref.at(T.states[i]));
    }
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

CompareTable compare_schemes(const BenchmarkCase& bc) {
    TruncatedDistribution ref;
    if (bc.net.n_species() == 1) {
        ref = series_reference(bc.net);
    } else {
        ref = certified_reference(bc.net, bc.w, bc.c, bc.r_ref).midpoint;
    }

    CompareTable table;
    for (const auto& scheme : bc.schemes) {
        for (double r : bc.r_grid) {
            CompareRow row;
            row.scheme = scheme;
            row.r = r;
            row.tail_bound = tail_bound(bc.c, r);
            row.l1_scheme_error = kNaN;
            row.tv_lower_error = kNaN;
            row.tv_upper_bracket_lo = kNaN;
            row.tv_upper_bracket_hi = kNaN;
            row.wall_ms = kNaN;
            try {
                auto T = share(build_sublevel_truncation(bc.net, bc.w, r));
                row.states = static_cast<std::size_t>(T->size());
                auto t0 = std::chrono::steady_clock::now();
                TruncatedDistribution dist;
                BoundsPair bp;
                bool has_bounds = false;
                if (scheme == "bdp") {
                    auto spec = BirthDeathSpec::from_network(bc.net);
                    dist = bdp_conditional(spec, static_cast<int>(r));
                } else if (scheme == "ta") {
                    auto sys = build_augmented(bc.net, T, ReentrySpec::boundary_mid());
                    dist = ta_solve(sys);
                } else if (scheme == "ldqbdp") {
                    auto levels = detect_levels(bc.net, *T, *bc.level_fn);
                    auto blocks = extract_blocks(bc.net, T, levels);
                    auto rs = r_matrix_recursion(blocks, blocks.n_levels());
                    dist = ldqbdp_solve(blocks, rs);
                } else if (scheme == "lp") {
                    auto poly = build_polytope(bc.net, T, bc.w, bc.c, r);
                    dist = lp_approximate(poly);
                } else if (scheme == "ita") {
                    auto sweep = ita_sweep(bc.net, T);
                    bp = ita_bounds(sweep, bc.c, r);
                    has_bounds = true;
                } else if (scheme == "ilp") {
                    auto poly = build_polytope(bc.net, T, bc.w, bc.c, r);
                    bp = ilp_statewise_bounds(poly).bounds;
                    has_bounds = true;
                } else {
                    throw SchemeError("unknown scheme '" + scheme + "'");
                }
                auto t1 = std::chrono::steady_clock::now();
                row.wall_ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();
                if (has_bounds) {
                    auto s = bound_errors(bp, row.tail_bound);
                    row.l1_scheme_error = l1_vs_reference(*T, bp.upper.values, ref);
                    row.tv_lower_error = s.lower_tv;
                    row.tv_upper_bracket_lo = s.upper_tv_lo;
                    row.tv_upper_bracket_hi = s.upper_tv_hi;
                } else {
                    row.l1_scheme_error = l1_vs_reference(*T, dist.values, ref);
                }
            } catch (const std::exception& e) {
                row.note = e.what();
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string CompareTable::to_csv() const {
    std::ostringstream os;
    os << "scheme,r,states,l1_scheme_error,tv_lower_error,tv_upper_bracket_lo,"
          "tv_upper_bracket_hi,tail_bound,wall_ms\n";
    for (const auto& row : rows) {
        os << row.scheme << ',' << fmt(row.r) << ',' << row.states << ','
           << fmt(row.l1_scheme_error) << ',' << fmt(row.tv_lower_error) << ','
           << fmt(row.tv_upper_bracket_lo) << ',' << fmt(row.tv_upper_bracket_hi) << ','
           << fmt(row.tail_bound) << ',' << fmt(row.wall_ms) << '\n';
    }
    for (const auto& row : rows) {
        if (!row.note.empty()) {
            os << "# " << row.scheme << ',' << fmt(row.r) << ": " << row.note << '\n';
        }
    }
    return os.str();
}

}  // namespace ctmc

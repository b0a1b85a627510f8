// Command-line front end: dispatches the truncation schemes, the benchmark
// harness, the simulator and the structural diagnostics over model files.
// Exit codes: 0 success, 1 usage/model error, 2 numerical failure.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ctmc/bench.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/ita.hpp"
#include "ctmc/lp_scheme.hpp"
#include "ctmc/qbd.hpp"
#include "ctmc/simulate.hpp"
#include "ctmc/ta.hpp"

namespace {

using namespace ctmc;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

ReactionNetwork load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_model(os.str());
}

Expr parse_fn(const std::string& text, const ReactionNetwork& net,
              const char* what) {
    auto e = parse_expr(text, net.species, net.params);
    if (!e) throw UsageError(std::string("cannot parse ") + what + " '" + text + "'");
    return *e;
}

State parse_counts(const std::string& text, std::size_t n_species, const char* what) {
    State x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size() || v < 0) {
            throw UsageError(std::string("bad count '") + tok + "' in " + what);
        }
        x.push_back(v);
    }
    if (x.size() != n_species) {
        throw UsageError(std::string(what) + " needs one count per species");
    }
    return x;
}

ReentrySpec parse_reentry(const std::string& text, std::size_t n_species) {
    if (text == "boundary-mid") return ReentrySpec::boundary_mid();
    if (text == "uniform") return ReentrySpec::uniform();
    if (text.rfind("state:", 0) == 0) {
        return ReentrySpec::fixed(parse_counts(text.substr(6), n_species, "--reentry"));
    }
    if (text.rfind("conditional:", 0) == 0) {
        int depth = std::stoi(text.substr(12));
        if (depth < 0) throw UsageError("conditional re-entry depth must be >= 0");
        return ReentrySpec::conditional_series(depth);
    }
    throw UsageError("unknown re-entry spec '" + text +
                     "' (state:<counts> | uniform | boundary-mid | conditional:<depth>)");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
}

void emit(const std::string& out_prefix, const std::string& suffix,
          const std::string& content) {
    if (out_prefix.empty()) {
        std::cout << content;
    } else {
        write_file(out_prefix + suffix, content);
    }
}

std::string dist_csv(const ReactionNetwork& net, const TruncatedDistribution& d) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& s : net.species) os << s << ',';
    os << "probability\n";
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        for (auto v : d.trunc->states[i]) os << v << ',';
        os << d.values[i] << '\n';
    }
    return os.str();
}

std::string bounds_csv(const ReactionNetwork& net, const BoundsPair& bp) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& s : net.species) os << s << ',';
    os << "lower,upper\n";
    for (std::size_t i = 0; i < bp.upper.values.size(); ++i) {
        for (auto v : bp.upper.trunc->states[i]) os << v << ',';
        os << (bp.has_lower ? bp.lower.values[i] : 0.0) << ',' << bp.upper.values[i]
           << '\n';
    }
    return os.str();
}

std::string marginal_csv(const std::string& species, const MarginalBounds& mb) {
    std::ostringstream os;
    os.precision(17);
    os << species << ",lower,upper\n";
    for (std::size_t i = 0; i < mb.counts.size(); ++i) {
        os << mb.counts[i] << ',' << mb.lower[i] << ',' << mb.upper[i] << '\n';
    }
    return os.str();
}

std::string trunc_label(const std::string& w, double r) {
    std::ostringstream os;
    os.precision(17);
    os << w << " < " << r;
    return os.str();
}

struct CommonOpts {
    std::string model, trunc_w, out;
    double trunc_r = 0;
    std::string moment_w;
    double moment_c = -1;
    double tol = 1e-12;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_trunc) {
    cmd->add_option("--model", o.model, "model file")->required();
    auto* w = cmd->add_option("--trunc-w", o.trunc_w, "truncation function expression");
    auto* r = cmd->add_option("--trunc-r", o.trunc_r, "truncation level (states with w < r)");
    if (need_trunc) {
        w->required();
        r->required();
    }
    cmd->add_option("--moment-w", o.moment_w,
                    "moment function (defaults to the truncation function)");
    cmd->add_option("--moment-c", o.moment_c, "certified stationary moment bound");
    cmd->add_option("--out", o.out, "output path prefix (stdout when omitted)");
    cmd->add_option("--tol", o.tol, "numerical clip tolerance");
    cmd->add_option("--threads", o.threads,
                    "worker cap (schemes are currently single-threaded)");
}

int run_solve(const CommonOpts& o, const std::string& scheme, const std::string& reentry,
              const std::string& levels) {
    auto net = load_model(o.model);
    Expr w = parse_fn(o.trunc_w, net, "--trunc-w");
    auto T = share(build_sublevel_truncation(net, w, o.trunc_r));

    ErrorReport report;
    report.scheme = scheme;
    report.truncation = trunc_label(o.trunc_w, o.trunc_r);
    TruncatedDistribution dist;
    if (scheme == "bdp") {
        auto spec = BirthDeathSpec::from_network(net);
        dist = bdp_conditional(spec, static_cast<int>(o.trunc_r));
    } else if (scheme == "ta") {
        auto sys = build_augmented(net, T, parse_reentry(reentry, net.n_species()));
        dist = ta_solve(sys);
        auto diag = ta_diagnostics(sys, dist, &w);
        report.add("outflow", diag.outflow, Rigor::Heuristic);
        if (diag.conv_factor) {
            report.add("conv_factor", *diag.conv_factor, Rigor::Heuristic);
        }
    } else if (scheme == "ldqbdp") {
        if (levels.empty()) throw UsageError("--scheme ldqbdp requires --levels");
        Expr lf = parse_fn(levels, net, "--levels");
        auto lev = detect_levels(net, *T, lf);
        auto blocks = extract_blocks(net, T, lev);
        auto rs = r_matrix_recursion(blocks, blocks.n_levels());
        dist = ldqbdp_solve(blocks, rs);
    } else if (scheme == "lp") {
        if (o.moment_c < 0) throw UsageError("--scheme lp requires --moment-c");
        Expr mw = o.moment_w.empty() ? w : parse_fn(o.moment_w, net, "--moment-w");
        auto poly = build_polytope(net, T, mw, o.moment_c, o.trunc_r);
        dist = lp_approximate(poly);
    } else {
        throw UsageError("unknown scheme '" + scheme + "' (bdp | ta | ldqbdp | lp)");
    }
    report.add("mass", dist.mass(), Rigor::Heuristic);
    auto interior = interior_set(net, *dist.trunc);
    std::vector<State> probe;
    probe.reserve(interior.size());
    for (int i : interior) probe.push_back(dist.trunc->states[static_cast<std::size_t>(i)]);
    report.add("interior_residual", stationary_residual(net, dist, probe),
               Rigor::Heuristic);
    if (o.moment_c >= 0) {
        report.add("tail_bound", tail_bound(o.moment_c, o.trunc_r), Rigor::Rigorous);
    }
    emit(o.out, ".csv", dist_csv(net, dist));
    emit(o.out, ".json", report.to_json() + "\n");
    return 0;
}

int run_bounds(const CommonOpts& o, const std::string& scheme,
               const std::string& objective) {
    auto net = load_model(o.model);
    if (o.moment_c < 0) throw UsageError("bounds require --moment-c");
    Expr w = parse_fn(o.trunc_w, net, "--trunc-w");
    auto T = share(build_sublevel_truncation(net, w, o.trunc_r));

    ErrorReport report;
    report.scheme = scheme;
    report.truncation = trunc_label(o.trunc_w, o.trunc_r);

    int marginal_species = -1;
    if (objective.rfind("marginal:", 0) == 0) {
        marginal_species = net.species_index(objective.substr(9));
        if (marginal_species < 0) {
            throw UsageError("unknown species in objective '" + objective + "'");
        }
    } else if (objective != "statewise") {
        throw UsageError("unknown objective '" + objective +
                         "' (statewise | marginal:<species>)");
    }

    if (scheme == "ita") {
        auto sweep = ita_sweep(net, T);
        if (marginal_species >= 0) {
            auto mb = ita_marginal_bounds(sweep, marginal_species, o.moment_c, o.trunc_r);
            report.add("tv_lower_error", mb.lower_error_exact, Rigor::Rigorous);
            report.add("upper_tv_bracket_lo", mb.upper_tv_lo, Rigor::Rigorous);
            report.add("upper_tv_bracket_hi", mb.upper_tv_hi, Rigor::Rigorous);
            emit(o.out, ".csv",
                 marginal_csv(net.species[static_cast<std::size_t>(marginal_species)], mb));
        } else {
            auto bp = ita_bounds(sweep, o.moment_c, o.trunc_r);
            auto s = bound_errors(bp, bp.tail_bound_used);
            report.add("tv_lower_error", s.lower_tv, Rigor::Rigorous);
            report.add("upper_tv_bracket_lo", s.upper_tv_lo, Rigor::Rigorous);
            report.add("upper_tv_bracket_hi", s.upper_tv_hi, Rigor::Rigorous);
            report.add("upper_l1_bound", s.upper_l1_hi, Rigor::Rigorous);
            emit(o.out, ".csv", bounds_csv(net, bp));
        }
    } else if (scheme == "ilp") {
        Expr mw = o.moment_w.empty() ? w : parse_fn(o.moment_w, net, "--moment-w");
        auto poly = build_polytope(net, T, mw, o.moment_c, o.trunc_r);
        if (marginal_species >= 0) {
            auto mb = ilp_marginal_bounds(poly, marginal_species);
            report.add("tv_lower_error", mb.lower_error_exact, Rigor::Rigorous);
            report.add("upper_tv_bracket_lo", mb.upper_tv_lo, Rigor::Rigorous);
            report.add("upper_tv_bracket_hi", mb.upper_tv_hi, Rigor::Rigorous);
            emit(o.out, ".csv",
                 marginal_csv(net.species[static_cast<std::size_t>(marginal_species)], mb));
        } else {
            auto res = ilp_statewise_bounds(poly);
            auto s = bound_errors(res.bounds, res.bounds.tail_bound_used);
            report.add("tv_lower_error", s.lower_tv, Rigor::Rigorous);
            report.add("upper_tv_bracket_lo", s.upper_tv_lo, Rigor::Rigorous);
            report.add("upper_tv_bracket_hi", s.upper_tv_hi, Rigor::Rigorous);
            report.add("uniqueness_certificate", res.uniqueness_certificate ? 1 : 0,
                       Rigor::Rigorous);
            emit(o.out, ".csv", bounds_csv(net, res.bounds));
        }
    } else {
        throw UsageError("unknown bounds scheme '" + scheme + "' (ita | ilp)");
    }
    report.add("tail_bound", tail_bound(o.moment_c, o.trunc_r), Rigor::Rigorous);
    emit(o.out, ".json", report.to_json() + "\n");
    return 0;
}

int run_compare(const std::string& case_id, const std::string& out) {
    auto bc = make_benchmark_case(case_id);
    auto table = compare_schemes(bc);
    emit(out, ".csv", table.to_csv());
    return 0;
}

int run_simulate(const CommonOpts& o, const std::string& x0_text, double t_final,
                 std::uint64_t seed, double burn_in, std::uint64_t jump_cap) {
    auto net = load_model(o.model);
    State x0(net.n_species(), 0);
    if (!x0_text.empty()) x0 = parse_counts(x0_text, net.n_species(), "--x0");
    GillespieOptions opt;
    opt.jump_cap = jump_cap;
    opt.burn_in_fraction = burn_in;
    auto run = gillespie(net, x0, t_final, seed, opt);
    auto eps = empirical_distribution(run);
    emit(o.out, ".csv", dist_csv(net, eps));
    ErrorReport report;
    report.scheme = "simulate";
    report.truncation = "visited states";
    report.add("jumps", static_cast<double>(run.jumps), Rigor::Heuristic);
    report.add("absorbed", run.absorbed ? 1 : 0, Rigor::Heuristic);
    emit(o.out, ".json", report.to_json() + "\n");
    return 0;
}

int run_classes(const CommonOpts& o) {
    auto net = load_model(o.model);
    Expr w = parse_fn(o.trunc_w, net, "--trunc-w");
    auto T = build_sublevel_truncation(net, w, o.trunc_r);
    auto cd = communicating_classes(net, T);
    std::ostringstream os;
    os << "truncation " << trunc_label(o.trunc_w, o.trunc_r) << ": " << T.size()
       << " states\n"
       << "note: classification ignores jumps leaving the truncation; 'closed' is "
          "relative to the truncated graph\n"
       << "closed classes: " << cd.closed_classes.size() << "\n";
    for (std::size_t k = 0; k < cd.closed_classes.size(); ++k) {
        os << "  class " << k << " (" << cd.closed_classes[k].size() << " states):";
        std::size_t shown = 0;
        for (int i : cd.closed_classes[k]) {
            if (shown++ == 8) {
                os << " ...";
                break;
            }
            os << ' ' << state_to_string(T.states[static_cast<std::size_t>(i)]);
        }
        os << '\n';
    }
    os << "transient states: " << cd.transient.size() << '\n';
    emit(o.out, ".txt", os.str());
    return 0;
}

int run_drift_check(const CommonOpts& o, const std::string& v_text,
                    const std::string& f_text, double check_r, double beta,
                    const std::string& reentry) {
    auto net = load_model(o.model);
    Expr w = parse_fn(o.trunc_w, net, "--trunc-w");
    Expr v = parse_fn(v_text, net, "--v");
    Expr f = parse_fn(f_text, net, "--f");
    if (check_r <= 0) check_r = 10 * o.trunc_r;
    auto F_trunc = build_sublevel_truncation(net, w, o.trunc_r);
    auto check = share(build_sublevel_truncation(net, w, check_r));
    auto cert = drift_apply(net, v, f, F_trunc.states, check->states);

    ErrorReport report;
    report.scheme = "drift-check";
    report.truncation = trunc_label(o.trunc_w, o.trunc_r);
    report.add("d", cert.d, Rigor::Rigorous);
    report.add("pi_f_bound", cert.pi_f_bound, Rigor::Rigorous);
    report.add("complement_bound", cert.complement_bound, Rigor::Rigorous);
    report.add("max_residual", cert.max_residual, Rigor::Rigorous);
    report.add("finite_set_size", static_cast<double>(cert.f_size), Rigor::Rigorous);
    report.add("check_set_size", static_cast<double>(cert.check_size), Rigor::Rigorous);

    if (beta > 0) {
        // error bound of the single-re-entry scheme on the check truncation
        auto probe = build_augmented(net, check, parse_reentry(reentry, net.n_species()));
        if (probe.fixed_index < 0) {
            throw UsageError("--beta needs a re-entry spec resolving to one state");
        }
        State z = check->states[static_cast<std::size_t>(probe.fixed_index)];
        LyapunovBoundInput in{v, F_trunc.states, cert.d};
        auto plain = lyapunov_error_bound(net, check, z, in, beta);
        auto refined = tighten_bound_lp(net, check, z, in, beta);
        report.add("tv_error_bound", plain.bound, Rigor::Rigorous);
        report.add("tv_error_bound_refined", refined.bound, Rigor::Rigorous);
        report.add("resolvent_gap", plain.phi_bar, Rigor::Rigorous);
        report.add("outflow", plain.outflow, Rigor::Rigorous);
    }
    std::string scope_note = "# scope: " + cert.scope + "\n";
    emit(o.out, ".json", report.to_json() + "\n" + scope_note);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary distributions of reaction networks via truncation schemes"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string scheme = "ta", reentry = "boundary-mid", levels, objective = "statewise";
    std::string case_id, x0_text, v_text, f_text = "1";
    double t_final = 0, burn_in = 0, check_r = 0, beta = 0;
    std::uint64_t seed = 1, jump_cap = 100000000;

    auto* solve = app.add_subcommand("solve", "approximate the stationary distribution");
    add_common(solve, o, true);
    solve->add_option("--scheme", scheme, "bdp | ta | ldqbdp | lp")->required();
    solve->add_option("--reentry", reentry,
                      "state:<counts> | uniform | boundary-mid | conditional:<depth>");
    solve->add_option("--levels", levels, "level function for the ldqbdp scheme");

    auto* bounds = app.add_subcommand("bounds", "statewise or marginal bounds");
    add_common(bounds, o, true);
    bounds->add_option("--scheme", scheme, "ita | ilp")->required();
    bounds->add_option("--objective", objective, "statewise | marginal:<species>");

    auto* compare = app.add_subcommand("compare", "benchmark scheme comparison");
    compare->add_option("--case", case_id,
                        "schlogl-bimodal | schlogl-unimodal | toggle")
        ->required();
    compare->add_option("--out", o.out, "output path prefix (stdout when omitted)");

    auto* simulate = app.add_subcommand("simulate", "exact stochastic simulation");
    add_common(simulate, o, false);
    simulate->add_option("--t-final", t_final, "simulated time horizon")->required();
    simulate->add_option("--x0", x0_text, "initial counts (default: all zero)");
    simulate->add_option("--seed", seed, "generator seed");
    simulate->add_option("--burn-in", burn_in, "discarded fraction of [0, t_final]");
    simulate->add_option("--jump-cap", jump_cap, "explosion guard");

    auto* classes = app.add_subcommand("classes", "communicating classes of a truncation");
    add_common(classes, o, true);

    auto* drift = app.add_subcommand("drift-check", "verify a drift certificate");
    add_common(drift, o, true);
    drift->add_option("--v", v_text, "Lyapunov function")->required();
    drift->add_option("--f", f_text, "drift target function (>= 1)");
    drift->add_option("--check-r", check_r, "check-set level (default: 10 x trunc-r)");
    drift->add_option("--beta", beta, "also compute the error bound at this beta");
    drift->add_option("--reentry", reentry, "re-entry used by the error bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return run_solve(o, scheme, reentry, levels);
        if (bounds->parsed()) return run_bounds(o, scheme, objective);
        if (compare->parsed()) return run_compare(case_id, o.out);
        if (simulate->parsed()) {
            return run_simulate(o, x0_text, t_final, seed, burn_in, jump_cap);
        }
        if (classes->parsed()) return run_classes(o);
        if (drift->parsed()) return run_drift_check(o, v_text, f_text, check_r, beta, reentry);
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

#include "ctmc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "ctmc/statespace.hpp"

namespace ctmc {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53 random bits; value in [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimulationRun gillespie(const ReactionNetwork& net, const State& x0, double t_final,
                        std::uint64_t seed, const GillespieOptions& opt) {
    if (!(t_final > 0)) throw SimulationError("final time must be positive");
    if (opt.burn_in_fraction < 0 || opt.burn_in_fraction >= 1) {
        throw SimulationError("burn-in fraction must lie in [0, 1)");
    }
    if (x0.size() != net.n_species()) {
        throw SimulationError("initial state dimension does not match the network");
    }

    SimulationRun run;
    run.seed = seed;
    run.t_final = t_final;
    run.burn_in = opt.burn_in_fraction * t_final;
    run.x0 = x0;

    std::mt19937_64 rng(seed);
    std::unordered_map<State, double, StateHash> dwell;
    std::vector<double> a(net.reactions.size());
    State x = x0;
    double t = 0;

    auto record = [&](const State& s, double from, double to) {
        double lo = std::max(from, run.burn_in);
        double hi = std::min(to, t_final);
        if (hi > lo) dwell[s] += hi - lo;
    };

    while (true) {
        double q = 0;
        for (std::size_t j = 0; j < net.reactions.size(); ++j) {
            double aj = net.reactions[j].propensity->eval_checked(x);
            if (aj < 0) {
                throw SimulationError("negative propensity at state " + state_to_string(x));
            }
            a[j] = aj;
            q += aj;
        }
        if (q <= 0) {  // absorbing: the remaining interval is one sojourn
            record(x, t, t_final);
            run.absorbed = true;
            break;
        }
        double tau = -std::log1p(-uniform01(rng)) / q;
        record(x, t, t + tau);
        t += tau;
        if (t >= t_final) break;
        if (++run.jumps > opt.jump_cap) {
            throw SimulationError(
                "jump cap reached at t = " + std::to_string(t) +
                " before the final time; the chain may be explosive");
        }
        double u = uniform01(rng) * q;
        std::size_t pick = net.reactions.size() - 1;  // rounding fallback
        double acc = 0;
        for (std::size_t j = 0; j < net.reactions.size(); ++j) {
            acc += a[j];
            if (u < acc && a[j] > 0) {
                pick = j;
                break;
            }
        }
        const auto& nu = net.reactions[pick].nu;
        for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] += nu[k];
            if (x[k] < 0) {
                throw SimulationError("reaction with positive rate leaves the lattice at " +
                                      state_to_string(x));
            }
        }
    }
    run.final_state = x;

    run.dwell.assign(dwell.begin(), dwell.end());
    std::sort(run.dwell.begin(), run.dwell.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return run;
}

TruncatedDistribution empirical_distribution(const SimulationRun& run) {
    if (run.dwell.empty()) throw SimulationError("run has no recorded dwell time");
    double total = 0;
    for (const auto& [s, d] : run.dwell) total += d;
    std::vector<State> states;
    std::vector<double> vals;
    states.reserve(run.dwell.size());
    vals.reserve(run.dwell.size());
    for (const auto& [s, d] : run.dwell) {
        states.push_back(s);
        vals.push_back(d / total);
    }
    return make_distribution(share(make_explicit_truncation(std::move(states))),
                             std::move(vals));
}

}  // namespace ctmc

#pragma once

#include <cstdint>

#include "ctmc/distribution.hpp"
#include "ctmc/model.hpp"

namespace ctmc {

class SimulationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One exact trajectory, summarized as per-state dwell times. The generator is
// std::mt19937_64 seeded directly; uniforms are (bits >> 11) * 2^-53 and
// sojourns come from inverse-transform exponentials, so a seed pins the
// trajectory bit-for-bit on any platform with IEEE doubles.
struct SimulationRun {
    std::uint64_t seed = 0;
    double t_final = 0;
    double burn_in = 0;  // discarded prefix of [0, t_final]
    State x0;
    State final_state;
    std::uint64_t jumps = 0;
    bool absorbed = false;
    // dwell time inside [burn_in, t_final] per visited state, sorted by state;
    // the entries sum to t_final - burn_in (last sojourn clipped)
    std::vector<std::pair<State, double>> dwell;
};

struct GillespieOptions {
    std::uint64_t jump_cap = 100000000;  // explosion guard
    double burn_in_fraction = 0;         // drop this fraction of [0, t_final]
};

SimulationRun gillespie(const ReactionNetwork& net, const State& x0, double t_final,
                        std::uint64_t seed, const GillespieOptions& opt = {});

// Fraction of the observed window spent in each visited state; sums to one.
TruncatedDistribution empirical_distribution(const SimulationRun& run);

}  // namespace ctmc

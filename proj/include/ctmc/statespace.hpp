#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctmc/model.hpp"

namespace ctmc {

class StateSpaceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TruncationKind { Sublevel, Superlevel, Levels, Explicit };

// Ordered finite state set with a bidirectional state<->index mapping.
// States are kept in lexicographic order so indices are deterministic.
struct Truncation {
    std::vector<State> states;
    std::unordered_map<State, int, StateHash> index;
    double r = 0;
    TruncationKind kind = TruncationKind::Explicit;
    // Tail bound attached by the construction: c/r style bounds are supplied
    // by callers; the superlevel construction attaches 1/(r+1) itself.
    std::optional<double> attached_tail_bound;

    int size() const { return static_cast<int>(states.size()); }
    bool contains(const State& x) const { return index.count(x) > 0; }
    int index_of(const State& x) const {
        auto it = index.find(x);
        return it == index.end() ? -1 : it->second;
    }
    std::string to_csv() const;  // species columns + final index column
};

inline constexpr std::size_t kDefaultStateCap = 5'000'000;

Truncation make_explicit_truncation(std::vector<State> states);

// Sublevel set {x in N^n : w(x) < r}, enumerated by breadth-first unit-step
// lattice expansion from the seeds (default: origin), then sorted.
Truncation build_sublevel_truncation(const ReactionNetwork& net, const Expr& w, double r,
                                     std::vector<State> seeds = {},
                                     std::size_t state_cap = kDefaultStateCap);

// Superlevel set {x : Qu(x) > -r * qu_max}; qu_max = max_x Qu(x) is a
// caller-supplied input. Attaches the tail bound 1/(r+1).
Truncation build_superlevel_truncation(const ReactionNetwork& net, const Expr& u, double r,
                                       double qu_max,
                                       std::vector<State> seeds = {},
                                       std::size_t state_cap = kDefaultStateCap);

struct OutBoundary {
    std::vector<double> q_o;          // aligned with truncation indices
    std::vector<int> boundary;        // indices with q_o > 0
};

OutBoundary out_boundary(const ReactionNetwork& net, const Truncation& T);

// {y in T : exists x outside T with q(x,y) > 0}, as truncation indices.
std::vector<int> in_boundary(const ReactionNetwork& net, const Truncation& T);

// T minus in_boundary: states not reachable in a single jump from outside.
std::vector<int> interior_set(const ReactionNetwork& net, const Truncation& T);

struct LevelStructure {
    std::vector<std::vector<int>> levels;  // level l -> truncation indices
    std::vector<int> level_of;             // truncation index -> level number
    std::int64_t base_value = 0;           // f-value of level 0
};

// Groups states by integer f-value after validating that every admissible
// jump changes f by at most 1.
LevelStructure detect_levels(const ReactionNetwork& net, const Truncation& T, const Expr& f);

struct ClassDecomposition {
    std::vector<std::vector<int>> closed_classes;  // truncation indices
    std::vector<int> transient;
    // Classification ignores edges leaving the truncation, so "closed" is
    // relative to the truncated graph.
    bool truncation_relative = true;
};

ClassDecomposition communicating_classes(const ReactionNetwork& net, const Truncation& T);

}  // namespace ctmc

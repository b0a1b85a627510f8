#include "ctmc/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>

namespace ctmc {

std::string Truncation::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (auto v : states[i]) os << v << ",";
        os << i << "\n";
    }
    return os.str();
}

Truncation make_explicit_truncation(std::vector<State> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    if (states.empty()) throw StateSpaceError("truncation must be nonempty");
    Truncation T;
    T.states = std::move(states);
    T.kind = TruncationKind::Explicit;
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        T.index.emplace(T.states[i], static_cast<int>(i));
    }
    return T;
}

namespace {

// Breadth-first enumeration over unit-step lattice neighbors of all states
// satisfying `member`, starting from the given seeds.
std::vector<State> lattice_enumerate(std::size_t n, const std::vector<State>& seeds,
                                     const std::function<bool(const State&)>& member,
                                     std::size_t cap) {
    std::unordered_map<State, char, StateHash> seen;
    std::deque<State> queue;
    for (const auto& s : seeds) {
        if (!member(s)) continue;
        if (seen.emplace(s, 1).second) queue.push_back(s);
    }
    std::vector<State> out;
    while (!queue.empty()) {
        State x = std::move(queue.front());
        queue.pop_front();
        out.push_back(x);
        if (out.size() > cap) {
            throw StateSpaceError(
                "state cap exceeded during truncation enumeration; the level function may "
                "not be norm-like or r is too large");
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (int step : {+1, -1}) {
                State y = x;
                y[i] += step;
                if (y[i] < 0) continue;
                if (seen.count(y)) continue;
                if (!member(y)) continue;
                seen.emplace(y, 1);
                queue.push_back(y);
            }
        }
    }
    return out;
}

Truncation finish(std::vector<State> states, double r, TruncationKind kind) {
    if (states.empty()) {
        throw StateSpaceError("truncation is empty (no seed satisfies the membership test)");
    }
    std::sort(states.begin(), states.end());
    Truncation T;
    T.states = std::move(states);
    T.r = r;
    T.kind = kind;
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        T.index.emplace(T.states[i], static_cast<int>(i));
    }
    return T;
}

}  // namespace

Truncation build_sublevel_truncation(const ReactionNetwork& net, const Expr& w, double r,
                                     std::vector<State> seeds, std::size_t state_cap) {
    std::size_t n = net.n_species();
    if (seeds.empty()) seeds.push_back(State(n, 0));
    auto member = [&](const State& x) { return w.eval_checked(x) < r; };
    return finish(lattice_enumerate(n, seeds, member, state_cap), r, TruncationKind::Sublevel);
}

Truncation build_superlevel_truncation(const ReactionNetwork& net, const Expr& u, double r,
                                       double qu_max, std::vector<State> seeds,
                                       std::size_t state_cap) {
    if (qu_max <= 0) {
        throw StateSpaceError("superlevel construction needs qu_max = max Qu > 0");
    }
    std::size_t n = net.n_species();
    if (seeds.empty()) seeds.push_back(State(n, 0));
    auto member = [&](const State& x) { return apply_generator(net, u, x) > -r * qu_max; };
    Truncation T =
        finish(lattice_enumerate(n, seeds, member, state_cap), r, TruncationKind::Superlevel);
    T.attached_tail_bound = 1.0 / (r + 1.0);
    return T;
}

OutBoundary out_boundary(const ReactionNetwork& net, const Truncation& T) {
    OutBoundary ob;
    ob.q_o.assign(T.states.size(), 0.0);
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        for (const auto& [y, rate] : rate_row(net, T.states[i])) {
            if (!T.contains(y)) ob.q_o[i] += rate;
        }
        if (ob.q_o[i] > 0) ob.boundary.push_back(static_cast<int>(i));
    }
    return ob;
}

std::vector<int> in_boundary(const ReactionNetwork& net, const Truncation& T) {
    std::vector<int> out;
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        const State& y = T.states[i];
        bool hit = false;
        for (const auto& rx : net.reactions) {
            State x = y;
            bool ok = true;
            for (std::size_t k = 0; k < x.size(); ++k) {
                x[k] -= rx.nu[k];
                if (x[k] < 0) ok = false;
            }
            if (!ok || T.contains(x) || x == y) continue;
            if (rx.propensity->eval_checked(x) > 0) {
                hit = true;
                break;
            }
        }
        if (hit) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> interior_set(const ReactionNetwork& net, const Truncation& T) {
    auto bi = in_boundary(net, T);
    std::vector<char> is_b(T.states.size(), 0);
    for (int i : bi) is_b[static_cast<std::size_t>(i)] = 1;
    std::vector<int> out;
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        if (!is_b[i]) out.push_back(static_cast<int>(i));
    }
    return out;
}

LevelStructure detect_levels(const ReactionNetwork& net, const Truncation& T, const Expr& f) {
    std::vector<std::int64_t> fval(T.states.size());
    std::int64_t fmin = std::numeric_limits<std::int64_t>::max();
    std::int64_t fmax = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        double v = f.eval_checked(T.states[i]);
        auto iv = static_cast<std::int64_t>(std::llround(v));
        if (std::abs(v - static_cast<double>(iv)) > 1e-9 || iv < 0) {
            throw StateSpaceError("level function is not a nonnegative integer at state " +
                                  state_to_string(T.states[i]));
        }
        fval[i] = iv;
        fmin = std::min(fmin, iv);
        fmax = std::max(fmax, iv);
    }
    // every admissible jump must change f by at most one
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        const State& x = T.states[i];
        for (std::size_t j = 0; j < net.reactions.size(); ++j) {
            const auto& rx = net.reactions[j];
            if (rx.propensity->eval_checked(x) <= 0) continue;
            State y = x;
            bool ok = true;
            for (std::size_t k = 0; k < y.size(); ++k) {
                y[k] += rx.nu[k];
                if (y[k] < 0) ok = false;
            }
            if (!ok) continue;
            double fy = f.eval_checked(y);
            if (std::abs(fy - static_cast<double>(fval[i])) > 1.0 + 1e-9) {
                throw StateSpaceError("level step violation: reaction " + std::to_string(j) +
                                      " at state " + state_to_string(x) +
                                      " changes the level by more than one");
            }
        }
    }
    LevelStructure ls;
    ls.base_value = fmin;
    ls.levels.assign(static_cast<std::size_t>(fmax - fmin + 1), {});
    ls.level_of.resize(T.states.size());
    for (std::size_t i = 0; i < T.states.size(); ++i) {
        int l = static_cast<int>(fval[i] - fmin);
        ls.level_of[i] = l;
        ls.levels[static_cast<std::size_t>(l)].push_back(static_cast<int>(i));
    }
    for (const auto& lvl : ls.levels) {
        if (lvl.empty()) {
            throw StateSpaceError("level structure has an empty intermediate level");
        }
    }
    return ls;
}

namespace {

// Iterative Tarjan over the truncated jump graph.
struct TarjanState {
    std::vector<int> idx, low, comp;
    std::vector<char> on_stack;
    std::vector<int> stack;
    int counter = 0;
    int ncomp = 0;
};

}  // namespace

ClassDecomposition communicating_classes(const ReactionNetwork& net, const Truncation& T) {
    int n = T.size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (const auto& [y, rate] : rate_row(net, T.states[static_cast<std::size_t>(i)])) {
            int j = T.index_of(y);
            if (j >= 0) adj[static_cast<std::size_t>(i)].push_back(j);
        }
    }
    TarjanState t;
    t.idx.assign(static_cast<std::size_t>(n), -1);
    t.low.resize(static_cast<std::size_t>(n));
    t.comp.assign(static_cast<std::size_t>(n), -1);
    t.on_stack.assign(static_cast<std::size_t>(n), 0);

    // explicit DFS stack: (vertex, next child position)
    std::vector<std::pair<int, std::size_t>> dfs;
    for (int root = 0; root < n; ++root) {
        if (t.idx[static_cast<std::size_t>(root)] != -1) continue;
        dfs.emplace_back(root, 0);
        while (!dfs.empty()) {
            auto& [v, ci] = dfs.back();
            auto sv = static_cast<std::size_t>(v);
            if (ci == 0) {
                t.idx[sv] = t.low[sv] = t.counter++;
                t.stack.push_back(v);
                t.on_stack[sv] = 1;
            }
            bool descended = false;
            while (ci < adj[sv].size()) {
                int w = adj[sv][ci++];
                auto sw = static_cast<std::size_t>(w);
                if (t.idx[sw] == -1) {
                    dfs.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (t.on_stack[sw]) t.low[sv] = std::min(t.low[sv], t.idx[sw]);
            }
            if (descended) continue;
            if (t.low[sv] == t.idx[sv]) {
                int w;
                do {
                    w = t.stack.back();
                    t.stack.pop_back();
                    t.on_stack[static_cast<std::size_t>(w)] = 0;
                    t.comp[static_cast<std::size_t>(w)] = t.ncomp;
                } while (w != v);
                ++t.ncomp;
            }
            int child = v;
            dfs.pop_back();
            if (!dfs.empty()) {
                auto& [p, pc] = dfs.back();
                t.low[static_cast<std::size_t>(p)] = std::min(
                    t.low[static_cast<std::size_t>(p)], t.low[static_cast<std::size_t>(child)]);
            }
        }
    }

    std::vector<std::vector<int>> members(static_cast<std::size_t>(t.ncomp));
    for (int i = 0; i < n; ++i) {
        members[static_cast<std::size_t>(t.comp[static_cast<std::size_t>(i)])].push_back(i);
    }
    std::vector<char> closed(static_cast<std::size_t>(t.ncomp), 1);
    for (int i = 0; i < n; ++i) {
        for (int j : adj[static_cast<std::size_t>(i)]) {
            if (t.comp[static_cast<std::size_t>(i)] != t.comp[static_cast<std::size_t>(j)]) {
                closed[static_cast<std::size_t>(t.comp[static_cast<std::size_t>(i)])] = 0;
            }
        }
    }
    ClassDecomposition cd;
    for (int c = 0; c < t.ncomp; ++c) {
        auto& m = members[static_cast<std::size_t>(c)];
        std::sort(m.begin(), m.end());
        if (closed[static_cast<std::size_t>(c)]) {
            cd.closed_classes.push_back(m);
        } else {
            cd.transient.insert(cd.transient.end(), m.begin(), m.end());
        }
    }
    std::sort(cd.transient.begin(), cd.transient.end());
    std::sort(cd.closed_classes.begin(), cd.closed_classes.end());
    return cd;
}

}  // namespace ctmc

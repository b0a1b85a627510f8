#include "ctmc/bdp.hpp"

#include <algorithm>
#include <cmath>

namespace ctmc {

TruncatedDistribution make_distribution(std::shared_ptr<const Truncation> trunc,
                                        std::vector<double> values, double clip_tol) {
    if (!trunc || values.size() != trunc->states.size()) {
        throw SchemeError("distribution values do not match the truncation");
    }
    for (double& v : values) {
        if (v < 0) {
            if (v < -clip_tol) {
                throw SchemeError("distribution has a significantly negative entry " +
                                  std::to_string(v));
            }
            v = 0;
        }
    }
    return TruncatedDistribution{std::move(trunc), std::move(values)};
}

std::shared_ptr<const Truncation> share(Truncation&& T) {
    return std::make_shared<const Truncation>(std::move(T));
}

BirthDeathSpec BirthDeathSpec::from_network(const ReactionNetwork& net) {
    if (net.n_species() != 1) {
        throw SchemeError("birth-death classification needs exactly one species");
    }
    // aggregate all +1 reactions into a_plus and all -1 reactions into a_minus
    auto zero = std::make_shared<Expr>();
    zero->kind = Expr::Kind::Num;
    zero->value = 0;
    ExprPtr plus = zero, minus = zero;
    auto add = [](ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Add;
        e->kids = {std::move(a), std::move(b)};
        return e;
    };
    for (const auto& rx : net.reactions) {
        if (rx.nu[0] == 1) {
            plus = plus == zero ? rx.propensity : add(plus, rx.propensity);
        } else if (rx.nu[0] == -1) {
            minus = minus == zero ? rx.propensity : add(minus, rx.propensity);
        } else if (rx.nu[0] != 0) {
            throw SchemeError("network jumps by more than one; not a birth-death process");
        }
    }
    return BirthDeathSpec{plus, minus};
}

ReactionNetwork BirthDeathSpec::to_network() const {
    ReactionNetwork net;
    net.species = {"X"};
    Reaction birth;
    birth.nu_minus = {0};
    birth.nu_plus = {1};
    birth.nu = {1};
    birth.propensity = a_plus;
    Reaction death;
    death.nu_minus = {1};
    death.nu_plus = {0};
    death.nu = {-1};
    death.propensity = a_minus;
    net.reactions = {birth, death};
    return net;
}

std::vector<double> bdp_log_gamma(const BirthDeathSpec& spec, int r) {
    std::vector<double> lg(static_cast<std::size_t>(r));
    lg[0] = 0.0;
    for (int x = 1; x < r; ++x) {
        double am = spec.am(x);
        if (am <= 0) {
            throw SchemeError("death propensity vanishes at state " + std::to_string(x));
        }
        double ap = spec.ap(x - 1);
        if (ap < 0) throw SchemeError("birth propensity negative at " + std::to_string(x - 1));
        lg[static_cast<std::size_t>(x)] =
            ap == 0 ? -std::numeric_limits<double>::infinity()
                    : lg[static_cast<std::size_t>(x - 1)] + std::log(ap) - std::log(am);
    }
    return lg;
}

std::vector<double> bdp_gamma(const BirthDeathSpec& spec, int r) {
    auto lg = bdp_log_gamma(spec, r);
    std::vector<double> g(lg.size());
    for (std::size_t i = 0; i < lg.size(); ++i) g[i] = std::exp(lg[i]);
    return g;
}

namespace {

Truncation first_r_states(int r) {
    std::vector<State> states;
    states.reserve(static_cast<std::size_t>(r));
    for (int x = 0; x < r; ++x) states.push_back({x});
    Truncation T = make_explicit_truncation(std::move(states));
    T.r = r;
    T.kind = TruncationKind::Sublevel;
    return T;
}

}  // namespace

TruncatedDistribution bdp_conditional(const BirthDeathSpec& spec, int r) {
    auto lg = bdp_log_gamma(spec, r);
    double lmax = *std::max_element(lg.begin(), lg.end());
    std::vector<double> v(lg.size());
    double sum = 0;
    for (std::size_t i = 0; i < lg.size(); ++i) {
        v[i] = std::exp(lg[i] - lmax);
        sum += v[i];
    }
    for (double& x : v) x /= sum;
    return make_distribution(share(first_r_states(r)), std::move(v));
}

BoundsPair bdp_bounds(const BirthDeathSpec& spec, int r, double c) {
    if (c < 0) throw SchemeError("moment bound c must be nonnegative");
    BoundsPair bp;
    bp.upper = bdp_conditional(spec, r);
    bp.tail_bound_used = c / r;
    bp.validity = BoundsValidity::StatewiseOnPi;
    if (r > c) {
        double alpha = 1.0 - c / r;
        std::vector<double> lo(bp.upper.values);
        for (double& v : lo) v *= alpha;
        bp.lower = TruncatedDistribution{bp.upper.trunc, std::move(lo)};
        bp.has_lower = true;
    }
    return bp;
}

}  // namespace ctmc

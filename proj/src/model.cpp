#include "ctmc/model.hpp"

#include <cmath>
#include <sstream>

namespace ctmc {

int ReactionNetwork::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i) {
        if (species[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

// One side of a reaction arrow: list of (coefficient, species index).
std::vector<std::int64_t> parse_side(const std::string& text,
                                     const std::vector<std::string>& species,
                                     int line_no) {
    std::vector<std::int64_t> stoich(species.size(), 0);
    std::string s = text;
    // trim
    auto notws = [](char c) { return c != ' ' && c != '\t'; };
    std::size_t b = 0, e = s.size();
    while (b < e && !notws(s[b])) ++b;
    while (e > b && !notws(s[e - 1])) --e;
    s = s.substr(b, e - b);
    if (s == "0") return stoich;
    std::size_t pos = 0;
    for (;;) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        std::int64_t coef = 1;
        std::size_t dstart = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos > dstart) coef = std::stoll(s.substr(dstart, pos - dstart));
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        std::size_t istart = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            ++pos;
        }
        if (istart == pos) {
            throw ParseError("expected species name in reaction side", line_no,
                             static_cast<int>(pos) + 1);
        }
        std::string name = s.substr(istart, pos - istart);
        int idx = -1;
        for (std::size_t i = 0; i < species.size(); ++i) {
            if (species[i] == name) idx = static_cast<int>(i);
        }
        if (idx < 0) {
            throw ParseError("unknown species '" + name + "' in reaction", line_no,
                             static_cast<int>(istart) + 1);
        }
        stoich[static_cast<std::size_t>(idx)] += coef;
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        if (pos >= s.size()) break;
        if (s[pos] != '+') {
            throw ParseError("expected '+' between reaction terms", line_no,
                             static_cast<int>(pos) + 1);
        }
        ++pos;
    }
    return stoich;
}

}  // namespace

ReactionNetwork parse_model(const std::string& text) {
    ReactionNetwork net;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    // reaction lines are parsed after all declarations so species can be
    // declared anywhere; we keep the encounter order of reactions.
    std::vector<std::pair<int, std::string>> reaction_lines;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "species") {
            std::string name;
            bool any = false;
            while (ls >> name) {
                any = true;
                if (net.species_index(name) >= 0) {
                    throw ParseError("duplicate species '" + name + "'", line_no, 1);
                }
                net.species.push_back(name);
            }
            if (!any) throw ParseError("species declaration lists no names", line_no, 1);
        } else if (kw == "param") {
            std::string name, eq;
            ls >> name >> eq;
            if (eq != "=") throw ParseError("expected '=' in param declaration", line_no, 1);
            std::string rest;
            std::getline(ls, rest);
            double v;
            try {
                std::size_t used = 0;
                v = std::stod(rest, &used);
                while (used < rest.size() && (rest[used] == ' ' || rest[used] == '\t')) ++used;
                if (used != rest.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("expected a numeric parameter value", line_no, 1);
            }
            net.params.emplace_back(name, v);
        } else if (kw == "reaction") {
            std::string rest;
            std::getline(ls, rest);
            reaction_lines.emplace_back(line_no, rest);
        } else {
            throw ParseError("unknown directive '" + kw + "'", line_no, 1);
        }
    }

    for (const auto& [ln, body] : reaction_lines) {
        auto arrow = body.find("->");
        if (arrow == std::string::npos) {
            throw ParseError("reaction is missing '->'", ln, 1);
        }
        auto colon = body.find(':', arrow + 2);
        if (colon == std::string::npos) {
            throw ParseError("reaction is missing ': propensity'", ln, 1);
        }
        Reaction rx;
        rx.nu_minus = parse_side(body.substr(0, arrow), net.species, ln);
        rx.nu_plus = parse_side(body.substr(arrow + 2, colon - arrow - 2), net.species, ln);
        rx.nu.resize(net.species.size());
        for (std::size_t i = 0; i < net.species.size(); ++i) {
            rx.nu[i] = rx.nu_plus[i] - rx.nu_minus[i];
        }
        std::string prop = body.substr(colon + 1);
        std::size_t p = prop.find_first_not_of(" \t");
        if (p != std::string::npos && prop.compare(p, 11, "mass_action") == 0) {
            auto open = prop.find('(', p + 11);
            auto close = prop.rfind(')');
            if (open == std::string::npos || close == std::string::npos || close <= open) {
                throw ParseError("malformed mass_action(...)", ln, 1);
            }
            std::string inner = prop.substr(open + 1, close - open - 1);
            auto ma = std::make_shared<Expr>();
            ma->kind = Expr::Kind::MassAction;
            ma->kids.push_back(parse_expr(inner, net.species, net.params, ln));
            ma->ma_nu_minus = rx.nu_minus;
            // reject plainly negative rate constants up front
            if (ma->kids[0]->kind == Expr::Kind::Num && ma->kids[0]->value < 0) {
                throw ParseError("negative rate constant in mass_action", ln, 1);
            }
            rx.propensity = ma;
        } else {
            rx.propensity = parse_expr(prop, net.species, net.params, ln);
        }
        net.reactions.push_back(std::move(rx));
    }
    return net;
}

std::string pretty_print(const ReactionNetwork& net) {
    std::ostringstream os;
    os.precision(17);
    if (!net.species.empty()) {
        os << "species";
        for (const auto& s : net.species) os << " " << s;
        os << "\n";
    }
    for (const auto& [name, val] : net.params) {
        os << "param " << name << " = " << val << "\n";
    }
    auto side = [&](const std::vector<std::int64_t>& stoich) {
        std::ostringstream ss;
        bool any = false;
        for (std::size_t i = 0; i < stoich.size(); ++i) {
            if (stoich[i] == 0) continue;
            if (any) ss << " + ";
            if (stoich[i] != 1) ss << stoich[i] << " ";
            ss << net.species[i];
            any = true;
        }
        return any ? ss.str() : std::string("0");
    };
    for (const auto& rx : net.reactions) {
        os << "reaction " << side(rx.nu_minus) << " -> " << side(rx.nu_plus) << " : "
           << rx.propensity->to_string() << "\n";
    }
    return os.str();
}

std::vector<std::pair<State, double>> rate_row(const ReactionNetwork& net, const State& x) {
    std::vector<std::pair<State, double>> out;
    for (std::size_t j = 0; j < net.reactions.size(); ++j) {
        const Reaction& rx = net.reactions[j];
        double a = rx.propensity->eval_checked(x);
        if (a < 0) {
            throw ModelError("propensity of reaction " + std::to_string(j) +
                             " is negative at state " + state_to_string(x));
        }
        if (a == 0) continue;
        State y = x;
        bool ok = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] += rx.nu[i];
            if (y[i] < 0) ok = false;
        }
        if (!ok) {
            throw ModelError("reaction " + std::to_string(j) + " has positive propensity at " +
                             state_to_string(x) + " but its jump target leaves N^n");
        }
        if (y == x) continue;  // null net change contributes nothing off-diagonal
        bool merged = false;
        for (auto& [t, r] : out) {
            if (t == y) {
                r += a;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(std::move(y), a);
    }
    return out;
}

double exit_rate(const ReactionNetwork& net, const State& x) {
    double q = 0;
    for (const auto& [y, r] : rate_row(net, x)) q += r;
    return q;
}

std::vector<std::pair<State, double>> jump_probs(const ReactionNetwork& net, const State& x) {
    auto row = rate_row(net, x);
    double q = 0;
    for (const auto& [y, r] : row) q += r;
    if (q <= 0) {
        return {{x, 1.0}};
    }
    for (auto& [y, r] : row) r /= q;
    return row;
}

double apply_generator(const ReactionNetwork& net, const Expr& v, const State& x) {
    double vx = v.eval_checked(x);
    double acc = 0;
    for (const auto& rx : net.reactions) {
        double a = rx.propensity->eval_checked(x);
        if (a == 0) continue;
        State y = x;
        bool ok = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] += rx.nu[i];
            if (y[i] < 0) ok = false;
        }
        if (!ok) continue;  // rate_row would raise; generator treats it as no-jump
        acc += a * (v.eval_checked(y) - vx);
    }
    return acc;
}

}  // namespace ctmc

#include "ctmc/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace ctmc {

std::string state_to_string(const State& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) os << ",";
        os << x[i];
    }
    os << ")";
    return os.str();
}

ParseError::ParseError(const std::string& msg, int line_, int col_)
    : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                         std::to_string(col_)),
      line(line_),
      col(col_) {}

double Expr::eval(const State& x) const {
    switch (kind) {
        case Kind::Num:
        case Kind::Param:
            return value;
        case Kind::Species:
            return static_cast<double>(x[static_cast<std::size_t>(species)]);
        case Kind::Add:
            return kids[0]->eval(x) + kids[1]->eval(x);
        case Kind::Sub:
            return kids[0]->eval(x) - kids[1]->eval(x);
        case Kind::Mul:
            return kids[0]->eval(x) * kids[1]->eval(x);
        case Kind::Div:
            return kids[0]->eval(x) / kids[1]->eval(x);
        case Kind::Neg:
            return -kids[0]->eval(x);
        case Kind::Pow: {
            double b = kids[0]->eval(x);
            double r = 1.0;
            for (unsigned i = 0; i < expo; ++i) r *= b;
            return r;
        }
        case Kind::MassAction: {
            double a = kids[0]->eval(x);
            for (std::size_t i = 0; i < ma_nu_minus.size(); ++i) {
                for (std::int64_t k = 0; k < ma_nu_minus[i]; ++k) {
                    a *= static_cast<double>(x[i] - k);
                }
                if (x[i] < ma_nu_minus[i]) return 0.0;  // falling factorial hit zero/negative
            }
            return a;
        }
    }
    return 0.0;
}

double Expr::eval_checked(const State& x) const {
    double v = eval(x);
    if (!std::isfinite(v)) {
        throw EvalError("expression '" + to_string() + "' is not finite at state " +
                        state_to_string(x));
    }
    return v;
}

namespace {

int precedence(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
            return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div:
            return 2;
        case Expr::Kind::Neg:
            return 3;
        case Expr::Kind::Pow:
            return 4;
        default:
            return 5;
    }
}

void print(const Expr& e, std::ostringstream& os, int parent_prec) {
    int prec = precedence(e.kind);
    bool paren = prec < parent_prec;
    switch (e.kind) {
        case Expr::Kind::Num: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e.value;
            std::string s = tmp.str();
            if (e.value < 0) paren = parent_prec > 1;
            if (paren) os << "(";
            os << s;
            if (paren) os << ")";
            return;
        }
        case Expr::Kind::Species:
        case Expr::Kind::Param:
            os << e.name;
            return;
        case Expr::Kind::MassAction:
            os << "mass_action(";
            print(*e.kids[0], os, 0);
            os << ")";
            return;
        default:
            break;
    }
    if (paren) os << "(";
    switch (e.kind) {
        case Expr::Kind::Add:
            print(*e.kids[0], os, prec);
            os << " + ";
            print(*e.kids[1], os, prec + 1);
            break;
        case Expr::Kind::Sub:
            print(*e.kids[0], os, prec);
            os << " - ";
            print(*e.kids[1], os, prec + 1);
            break;
        case Expr::Kind::Mul:
            print(*e.kids[0], os, prec);
            os << " * ";
            print(*e.kids[1], os, prec + 1);
            break;
        case Expr::Kind::Div:
            print(*e.kids[0], os, prec);
            os << " / ";
            print(*e.kids[1], os, prec + 1);
            break;
        case Expr::Kind::Neg:
            os << "-";
            print(*e.kids[0], os, prec);
            break;
        case Expr::Kind::Pow:
            print(*e.kids[0], os, prec + 1);
            os << "^" << e.expo;
            break;
        default:
            break;
    }
    if (paren) os << ")";
}

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    int line;

    Lexer(const std::string& t, int line_no) : text(t), line(line_no) {}

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    int col() const { return static_cast<int>(pos) + 1; }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", line, col());
        }
    }
    bool ident_start() {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        if (start == pos) throw ParseError("expected identifier", line, col());
        return text.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        std::size_t consumed = 0;
        double v;
        try {
            v = std::stod(text.substr(pos), &consumed);
        } catch (const std::exception&) {
            throw ParseError("expected number", line, col());
        }
        pos += consumed;
        return v;
    }
    unsigned uint_literal() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw ParseError("expected nonnegative integer exponent", line, col());
        return static_cast<unsigned>(std::stoul(text.substr(start, pos - start)));
    }
};

struct ExprParser {
    Lexer& lx;
    const std::vector<std::string>& species;
    const std::vector<std::pair<std::string, double>>& params;

    ExprPtr make(Expr::Kind k) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        return e;
    }

    ExprPtr atom() {
        if (lx.accept('(')) {
            auto e = expr();
            lx.expect(')');
            return e;
        }
        if (lx.ident_start()) {
            int col = lx.col();
            std::string id = lx.ident();
            for (std::size_t i = 0; i < species.size(); ++i) {
                if (species[i] == id) {
                    auto e = make(Expr::Kind::Species);
                    e->species = static_cast<int>(i);
                    e->name = id;
                    return e;
                }
            }
            for (const auto& [pname, pval] : params) {
                if (pname == id) {
                    auto e = make(Expr::Kind::Param);
                    e->value = pval;
                    e->name = id;
                    return e;
                }
            }
            throw ParseError("unknown identifier '" + id + "'", lx.line, col);
        }
        auto e = make(Expr::Kind::Num);
        e->value = lx.number();
        return e;
    }

    ExprPtr pow() {
        auto base = atom();
        if (lx.accept('^')) {
            auto e = make(Expr::Kind::Pow);
            e->expo = lx.uint_literal();
            e->kids.push_back(base);
            return e;
        }
        return base;
    }

    ExprPtr unary() {
        if (lx.accept('-')) {
            auto e = make(Expr::Kind::Neg);
            e->kids.push_back(unary());
            return e;
        }
        return pow();
    }

    ExprPtr mul() {
        auto lhs = unary();
        for (;;) {
            if (lx.accept('*')) {
                auto e = make(Expr::Kind::Mul);
                e->kids = {lhs, unary()};
                lhs = e;
            } else if (lx.accept('/')) {
                auto e = make(Expr::Kind::Div);
                e->kids = {lhs, unary()};
                lhs = e;
            } else {
                return lhs;
            }
        }
    }

    ExprPtr expr() {
        auto lhs = mul();
        for (;;) {
            if (lx.accept('+')) {
                auto e = make(Expr::Kind::Add);
                e->kids = {lhs, mul()};
                lhs = e;
            } else if (lx.peek() == '-') {
                lx.accept('-');
                auto e = make(Expr::Kind::Sub);
                e->kids = {lhs, mul()};
                lhs = e;
            } else {
                return lhs;
            }
        }
    }
};

}  // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    print(*this, os, 0);
    return os.str();
}

ExprPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& species,
                   const std::vector<std::pair<std::string, double>>& params,
                   int line_no) {
    Lexer lx(text, line_no);
    ExprParser p{lx, species, params};
    auto e = p.expr();
    if (!lx.eof()) {
        throw ParseError("unexpected trailing input", lx.line, lx.col());
    }
    return e;
}

}  // namespace ctmc

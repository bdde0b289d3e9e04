#include "daekit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace daekit::expr {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call } kind;
    double value = 0.0;
    std::string name;
    char op = 0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
    const std::string& text;
    size_t pos = 0;
    const std::vector<std::string>& allowed;
    std::vector<std::string> used;

    explicit Parser(const std::string& t, const std::vector<std::string>& a)
        : text(t), allowed(a) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    NodePtr make(Expression::Node n) { return std::make_shared<Expression::Node>(std::move(n)); }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-') break;
            ++pos;
            NodePtr rhs = parse_term();
            Expression::Node n;
            n.kind = Expression::Node::Kind::Binary;
            n.op = c;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = make(std::move(n));
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/') break;
            ++pos;
            NodePtr rhs = parse_factor();
            Expression::Node n;
            n.kind = Expression::Node::Kind::Binary;
            n.op = c;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = make(std::move(n));
        }
        return lhs;
    }

    NodePtr parse_factor() {
        NodePtr base = parse_unary();
        if (peek() == '^') {
            ++pos;
            NodePtr exponent = parse_factor(); // right associative
            Expression::Node n;
            n.kind = Expression::Node::Kind::Binary;
            n.op = '^';
            n.lhs = base;
            n.rhs = exponent;
            return make(std::move(n));
        }
        return base;
    }

    NodePtr parse_unary() {
        int sign = 1;
        while (true) {
            const char c = peek();
            if (c == '-') {
                sign = -sign;
                ++pos;
            } else if (c == '+') {
                ++pos;
            } else {
                break;
            }
        }
        NodePtr prim = parse_primary();
        if (sign == 1) return prim;
        Expression::Node n;
        n.kind = Expression::Node::Kind::Unary;
        n.op = '-';
        n.lhs = prim;
        return make(std::move(n));
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("expression ended unexpectedly");
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(text.c_str() + pos, &end);
            if (end == text.c_str() + pos) throw ParseError("bad number in expression");
            pos = static_cast<size_t>(end - text.c_str());
            Expression::Node n;
            n.kind = Expression::Node::Kind::Number;
            n.value = v;
            return make(std::move(n));
        }
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!eat(')')) throw ParseError("missing ')' in expression");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string name = text.substr(start, pos - start);
            static const std::vector<std::string> funcs = {"sin", "cos", "exp", "abs"};
            if (peek() == '(') {
                if (std::find(funcs.begin(), funcs.end(), name) == funcs.end())
                    throw ParseError("unknown function '" + name + "'");
                ++pos;
                NodePtr arg = parse_expr();
                if (!eat(')')) throw ParseError("missing ')' after " + name);
                Expression::Node n;
                n.kind = Expression::Node::Kind::Call;
                n.name = std::move(name);
                n.lhs = arg;
                return make(std::move(n));
            }
            if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
                throw ParseError("unknown variable '" + name + "'");
            if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(name);
            Expression::Node n;
            n.kind = Expression::Node::Kind::Variable;
            n.name = std::move(name);
            return make(std::move(n));
        }
        throw ParseError(std::string("unexpected character '") + c + "' in expression");
    }
};

double eval_node(const Expression::Node& n, const std::map<std::string, double>& vars) {
    using Kind = Expression::Node::Kind;
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::Variable: {
            auto it = vars.find(n.name);
            if (it == vars.end()) throw Error("unbound variable '" + n.name + "'");
            return it->second;
        }
        case Kind::Unary: return -eval_node(*n.lhs, vars);
        case Kind::Binary: {
            const double a = eval_node(*n.lhs, vars);
            const double b = eval_node(*n.rhs, vars);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            throw Error("bad operator");
        }
        case Kind::Call: {
            const double a = eval_node(*n.lhs, vars);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "abs") return std::abs(a);
            throw Error("bad function");
        }
    }
    throw Error("bad expression node");
}

} // namespace

double Expression::eval(const std::map<std::string, double>& vars) const {
    if (!root) throw Error("empty expression");
    return eval_node(*root, vars);
}

Expression parse(const std::string& text, const std::vector<std::string>& allowed) {
    Parser p(text, allowed);
    Expression e;
    e.root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError("trailing input in expression: '" + text.substr(p.pos) + "'");
    e.vars_ = std::move(p.used);
    return e;
}

double eval_tx(const Expression& e, double t, const Vector& x) {
    std::map<std::string, double> vars;
    vars["t"] = t;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        vars["x" + std::to_string(i + 1)] = x(i);
    return e.eval(vars);
}

} // namespace daekit::expr

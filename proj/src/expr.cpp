#include "heatsys/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace heatsys::expr {

double ExprAst::eval(double t) const {
    struct Eval {
        double t;
        double run(const Node& n) const {
            switch (n.kind) {
                case NodeKind::Constant: return n.value;
                case NodeKind::Variable: return t;
                case NodeKind::Negate:   return -run(*n.lhs);
                case NodeKind::Add:      return run(*n.lhs) + run(*n.rhs);
                case NodeKind::Sub:      return run(*n.lhs) - run(*n.rhs);
                case NodeKind::Mul:      return run(*n.lhs) * run(*n.rhs);
                case NodeKind::Div:      return run(*n.lhs) / run(*n.rhs);
                case NodeKind::Pow:      return std::pow(run(*n.lhs), run(*n.rhs));
                case NodeKind::Func:
                    switch (n.func) {
                        case FuncKind::Exp:  return std::exp(run(*n.lhs));
                        case FuncKind::Log:  return std::log(run(*n.lhs));
                        case FuncKind::Sqrt: return std::sqrt(run(*n.lhs));
                        case FuncKind::Sin:  return std::sin(run(*n.lhs));
                        case FuncKind::Cos:  return std::cos(run(*n.lhs));
                    }
            }
            return std::nan("");
        }
    };
    if (!root_) throw std::logic_error("eval of empty expression");
    return Eval{t}.run(*root_);
}

namespace {

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Exp:  return "exp";
        case FuncKind::Log:  return "log";
        case FuncKind::Sqrt: return "sqrt";
        case FuncKind::Sin:  return "sin";
        case FuncKind::Cos:  return "cos";
    }
    return "?";
}

void print_node(const Node& n, std::string& out) {
    char buf[40];
    switch (n.kind) {
        case NodeKind::Constant:
            if (n.value < 0) {
                // Negative literals only arise from constructed trees; keep
                // them parseable by wrapping in a unary minus.
                std::snprintf(buf, sizeof buf, "(-%.17g)", -n.value);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
            }
            out += buf;
            break;
        case NodeKind::Variable: out += 't'; break;
        case NodeKind::Negate:
            out += "(-";
            print_node(*n.lhs, out);
            out += ')';
            break;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Pow: {
            const char op = n.kind == NodeKind::Add ? '+'
                          : n.kind == NodeKind::Sub ? '-'
                          : n.kind == NodeKind::Mul ? '*'
                          : n.kind == NodeKind::Div ? '/' : '^';
            out += '(';
            print_node(*n.lhs, out);
            out += op;
            print_node(*n.rhs, out);
            out += ')';
            break;
        }
        case NodeKind::Func:
            out += func_name(n.func);
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            break;
    }
}

NodePtr make(NodeKind k, NodePtr l, NodePtr r = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, char var) : src_(src), var_(var) {}

    static constexpr int kMaxDepth = 256;

    NodePtr run() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("empty input", 0);
        NodePtr e = expr();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    char var_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth)
                throw ParseError("expression nested too deeply", p.pos_);
        }
        ~DepthGuard() { --p.depth_; }
    };

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }
    bool consume(char c) {
        if (peek_is(c)) { ++pos_; return true; }
        return false;
    }

    NodePtr expr() {
        DepthGuard guard(*this);
        NodePtr lhs = term();
        for (;;) {
            if (consume('+')) lhs = make(NodeKind::Add, lhs, term());
            else if (consume('-')) lhs = make(NodeKind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*')) lhs = make(NodeKind::Mul, lhs, factor());
            else if (consume('/')) lhs = make(NodeKind::Div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        if (consume('-')) return make(NodeKind::Negate, power());
        return power();
    }

    NodePtr power() {
        DepthGuard guard(*this);
        NodePtr base = atom();
        if (consume('^')) return make(NodeKind::Pow, base, power());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            NodePtr e = expr();
            if (!consume(')'))
                throw ParseError("unbalanced parenthesis", open);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        const char* begin = src_.data() + start;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            throw ParseError("malformed number", start);
        // strtod accepts leading signs and inf/nan; the grammar reached here
        // on a digit or '.', so only the digit forms survive.
        pos_ = start + static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Constant;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name.size() == 1 && name[0] == var_) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Variable;
            return n;
        }
        FuncKind f;
        if (name == "exp") f = FuncKind::Exp;
        else if (name == "log") f = FuncKind::Log;
        else if (name == "sqrt") f = FuncKind::Sqrt;
        else if (name == "sin") f = FuncKind::Sin;
        else if (name == "cos") f = FuncKind::Cos;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        if (!consume('('))
            throw ParseError("expected '(' after function name", pos_);
        NodePtr arg = expr();
        if (!consume(')'))
            throw ParseError("unbalanced parenthesis in function call", pos_);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Func;
        n->func = f;
        n->lhs = arg;
        return n;
    }
};

}  // namespace

std::string ExprAst::print() const {
    if (!root_) return {};
    std::string out;
    print_node(*root_, out);
    return out;
}

ExprAst parse_expr(std::string_view source) { return parse_expr_in(source, 't'); }

ExprAst parse_expr_in(std::string_view source, char variable) {
    return ExprAst(Parser(source, variable).run());
}

ExprAst constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return ExprAst(n);
}

ExprAst variable() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    return ExprAst(n);
}

ExprAst add(ExprAst a, ExprAst b) { return ExprAst(make(NodeKind::Add, a.root(), b.root())); }
ExprAst mul(ExprAst a, ExprAst b) { return ExprAst(make(NodeKind::Mul, a.root(), b.root())); }
ExprAst div(ExprAst a, ExprAst b) { return ExprAst(make(NodeKind::Div, a.root(), b.root())); }
ExprAst pow(ExprAst base, ExprAst exponent) {
    return ExprAst(make(NodeKind::Pow, base.root(), exponent.root()));
}

}  // namespace heatsys::expr

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace heatsys::expr {

/// Parse failure with the byte offset of the offending token.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t offset_)
        : std::runtime_error(what), offset(offset_) {}
    std::size_t offset;
};

enum class NodeKind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Func };
enum class FuncKind { Exp, Log, Sqrt, Sin, Cos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One node of an expression tree. Nodes are immutable and shared, so
/// copying an ExprAst is cheap and concurrent evaluation is safe.
struct Node {
    NodeKind kind;
    double value = 0.0;      // Constant
    FuncKind func = FuncKind::Exp;
    NodePtr lhs, rhs;        // rhs empty for unary nodes
};

/// Expression in the single variable `t`.
///
/// Grammar (parse):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-')? power
///   power  := atom ('^' power)?          -- '^' is right-associative
///   atom   := number | 't' | func '(' expr ')' | '(' expr ')'
///   func   := 'exp'|'log'|'sqrt'|'sin'|'cos'
class ExprAst {
public:
    ExprAst() = default;
    explicit ExprAst(NodePtr root) : root_(std::move(root)) {}

    /// Evaluate at t. May return non-finite values outside the domain
    /// (e.g. log of a negative number); callers decide how to react.
    double eval(double t) const;

    /// Canonical text form; parse(print()) evaluates identically.
    std::string print() const;

    bool empty() const { return root_ == nullptr; }
    const NodePtr& root() const { return root_; }

private:
    NodePtr root_;
};

/// Parse an expression in `t`. Throws ParseError (with byte offset) on
/// unknown identifiers, unbalanced parentheses, empty input or trailing
/// garbage.
ExprAst parse_expr(std::string_view source);

/// Same grammar with the variable spelled `s`; used for custom
/// nonlinearities b(s).
ExprAst parse_expr_in(std::string_view source, char variable);

// Programmatic builders for composed integrands.
ExprAst constant(double v);
ExprAst variable();
ExprAst add(ExprAst a, ExprAst b);
ExprAst mul(ExprAst a, ExprAst b);
ExprAst div(ExprAst a, ExprAst b);
ExprAst pow(ExprAst base, ExprAst exponent);

}  // namespace heatsys::expr

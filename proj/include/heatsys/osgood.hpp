#pragma once

#include <memory>
#include <variant>

#include "heatsys/coeffs.hpp"
#include "heatsys/expr.hpp"
#include "heatsys/quadrature.hpp"

namespace heatsys::osgood {

/// b(s) = s^alpha.
struct PowerLaw {
    double alpha;
};

/// b(s) = s^p (log s)^q on (s0, inf), s0 > 1.
struct PowerLog {
    double p;
    double q;
    double s0 = 1.0;
};

/// b(s) = s^p exp(c s^a), c > 0, a > 0.
struct ExpPower {
    double p;
    double c;
    double a;
};

/// b(s) given by an expression in s with a declared tail class for 1/b.
struct Custom {
    expr::ExprAst b;
    quadrature::TailDescriptor inv_tail;  // tail of 1/b(s)
};

using Nonlinearity = std::variant<PowerLaw, PowerLog, ExpPower, Custom>;

double b_eval(const Nonlinearity& b, double s);

/// The scalar problem y' = f(t) b(y), y(0) = y0 > 0.
struct OsgoodProblem {
    double y0;
    coeffs::TimeCoefficient f;
    Nonlinearity b;
};

struct OsgoodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// B(x) = int_{y0}^{x} ds / b(s); closed form for PowerLaw, quadrature
/// otherwise.
double B_transform(const OsgoodProblem& prob, double x, double rel_tol = 1e-11);

struct ExtValue {
    enum class Status { Finite, Infinite, Undetermined };
    Status status;
    double value;  // +inf when Infinite

    static ExtValue finite(double v) { return {Status::Finite, v}; }
    static ExtValue infinite() {
        return {Status::Infinite, std::numeric_limits<double>::infinity()};
    }
    static ExtValue undetermined(double lower_bound) {
        return {Status::Undetermined, lower_bound};
    }
    bool is_finite() const { return status == Status::Finite; }
    bool is_infinite() const { return status == Status::Infinite; }
};

/// B(inf); closed form where available (see module notes), otherwise via
/// the improper machinery. Custom descriptors with unknown tails can come
/// back Undetermined -- never guessed.
ExtValue B_infinity(const OsgoodProblem& prob, double rel_tol = 1e-11);

/// F(inf) = int_0^inf f.
ExtValue F_infinity(const OsgoodProblem& prob, double rel_tol = 1e-11);

/// Solved problem: y(t) = B^{-1}(F(t)) with blow-up time F^{-1}(B(inf)).
/// Immutable and safe to evaluate concurrently.
class OsgoodSolution {
public:
    enum class Kind {
        FiniteBlowUp,   // blow_up_time() is the finite blow-up time
        Global,         // blow_up_time() == +inf
        BeyondCap,      // blow-up not before 1e9; reported as "> 1e9"
        Undetermined,   // B(inf) undetermined (custom tail unknown)
    };

    Kind kind() const { return kind_; }
    double blow_up_time() const { return blow_up_time_; }
    ExtValue B_inf() const { return b_inf_; }
    ExtValue F_inf() const { return f_inf_; }

    /// y(t) for t < blow_up_time; B inverted by bisection.
    double value_at(double t) const;

    const OsgoodProblem& problem() const { return *prob_; }

private:
    friend OsgoodSolution solve(OsgoodProblem prob, double rel_tol);
    std::shared_ptr<const OsgoodProblem> prob_;
    std::shared_ptr<coeffs::CumulativeIntegral> F_;  // cached cumulative int of f
    Kind kind_;
    double blow_up_time_;
    ExtValue b_inf_ = ExtValue::finite(0);
    ExtValue f_inf_ = ExtValue::finite(0);
    double rel_tol_ = 1e-11;
};

/// Evaluate the transforms and locate the blow-up time. The F^{-1} bracket
/// doubles from t=1 and is capped at 1e9 (Kind::BeyondCap past the cap).
OsgoodSolution solve(OsgoodProblem prob, double rel_tol = 1e-11);

/// Convenience: the extended-real blow-up time (+inf when global). Throws
/// OsgoodError when undetermined.
double blow_up_time(const OsgoodProblem& prob, double rel_tol = 1e-11);

}  // namespace heatsys::osgood

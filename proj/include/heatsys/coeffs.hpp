#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "heatsys/expr.hpp"
#include "heatsys/quadrature.hpp"

namespace heatsys::coeffs {

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A positive continuous function of t, defined by an expression. The
/// positivity certificate is a dense sample over [0, t_max] (default
/// 10001 points) plus sign checks at every quadrature node that later
/// touches the function -- a certificate, not a proof.
class TimeCoefficient {
public:
    /// Throws ConstructionError if any sample on [0, t_max] is <= 0 or
    /// non-finite.
    TimeCoefficient(expr::ExprAst expr, double t_max = 50.0, int samples = 10001,
                    quadrature::TailDescriptor tail = quadrature::TailDescriptor::unknown());

    /// Convenience: parse then construct.
    static TimeCoefficient parse(const std::string& source, double t_max = 50.0,
                                 quadrature::TailDescriptor tail = quadrature::TailDescriptor::unknown());

    double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    /// Checked evaluation used at quadrature nodes: throws on a
    /// non-positive or non-finite value.
    double eval_checked(double t) const;

    const expr::ExprAst& expression() const { return expr_; }
    double t_max() const { return t_max_; }
    double sampled_min() const { return sampled_min_; }
    int sample_count() const { return samples_; }
    const quadrature::TailDescriptor& tail() const { return tail_; }

    /// Max relative deviation from the value at 0 over the sampled horizon;
    /// "constant" means <= 1e-12.
    double constancy_deviation() const { return constancy_dev_; }
    bool is_constant() const { return constancy_dev_ <= 1e-12; }

private:
    expr::ExprAst expr_;
    double t_max_;
    int samples_;
    double sampled_min_;
    double constancy_dev_;
    quadrature::TailDescriptor tail_;
};

/// Adaptive definite integral of a time coefficient with positivity checks
/// at every node.
double integrate(const TimeCoefficient& f, double s, double t, double rel_tol = 1e-10);

/// Improper integral of a time coefficient over [0, inf) using its tail
/// descriptor.
quadrature::ImproperResult improper_integral(const TimeCoefficient& f, double rel_tol = 1e-10);

/// Cumulative integral K(s, t) = int_s^t f(r) dr of a nonnegative
/// integrand, with a checkpoint cache so repeated evaluations along an
/// advancing front stay cheap. K(t, t) == 0 exactly; K(s, t) =
/// K(t0, t) - K(t0, s) up to quadrature tolerance.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> f, double t0 = 0.0,
                       double rel_tol = 1e-12);
    explicit CumulativeIntegral(const TimeCoefficient& f, double t0 = 0.0,
                                double rel_tol = 1e-12);

    /// K(t0, t); caches the result.
    double from_origin(double t) const;
    /// K(s, t) for s <= t.
    double operator()(double s, double t) const;

    double origin() const { return t0_; }

private:
    std::function<double(double)> f_;
    double t0_;
    double rel_tol_;
    mutable std::mutex mu_;
    mutable std::map<double, double> checkpoints_;  // t -> K(t0, t)
};

/// The ratio h_i/h_j with sampled monotonicity and constancy certificates.
class HtildeRatio {
public:
    HtildeRatio(TimeCoefficient numerator, TimeCoefficient denominator,
                int samples = 10001);

    double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    /// Sampled "(h~)' <= 0" check: eval(t2) <= eval(t1) + tol for all
    /// sampled t1 < t2. A failure downgrades the bound verdicts that
    /// need it; it is not an error.
    bool nonincreasing() const { return nonincreasing_; }
    /// Max relative deviation from eval(0) over the sampled horizon.
    double constancy_deviation() const { return constancy_dev_; }
    bool is_constant() const { return constancy_dev_ <= 1e-12; }
    double horizon() const { return horizon_; }

    const TimeCoefficient& numerator() const { return num_; }
    const TimeCoefficient& denominator() const { return den_; }

private:
    TimeCoefficient num_, den_;
    double horizon_;
    bool nonincreasing_;
    double constancy_dev_;
};

}  // namespace heatsys::coeffs

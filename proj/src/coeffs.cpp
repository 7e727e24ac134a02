#include "heatsys/coeffs.hpp"

#include <algorithm>
#include <cmath>

namespace heatsys::coeffs {

TimeCoefficient::TimeCoefficient(expr::ExprAst expr, double t_max, int samples,
                                 quadrature::TailDescriptor tail)
    : expr_(std::move(expr)), t_max_(t_max), samples_(samples), tail_(tail) {
    if (expr_.empty()) throw ConstructionError("time coefficient: empty expression");
    if (!(t_max > 0) || samples < 2)
        throw ConstructionError("time coefficient: invalid horizon or sample count");
    double lo = std::numeric_limits<double>::infinity();
    const double v0 = expr_.eval(0.0);
    double dev = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = t_max * static_cast<double>(i) / (samples - 1);
        const double v = expr_.eval(t);
        if (!std::isfinite(v) || v <= 0.0)
            throw ConstructionError("time coefficient: value " + std::to_string(v) +
                                    " at t=" + std::to_string(t) + " violates positivity");
        lo = std::min(lo, v);
        dev = std::max(dev, std::abs(v - v0) / std::max(std::abs(v0), 1e-300));
    }
    sampled_min_ = lo;
    constancy_dev_ = dev;
}

TimeCoefficient TimeCoefficient::parse(const std::string& source, double t_max,
                                       quadrature::TailDescriptor tail) {
    return TimeCoefficient(expr::parse_expr(source), t_max, 10001, tail);
}

double TimeCoefficient::eval(double t) const { return expr_.eval(t); }

double TimeCoefficient::eval_checked(double t) const {
    const double v = expr_.eval(t);
    if (!std::isfinite(v) || v <= 0.0)
        throw ConstructionError("time coefficient: non-positive value at quadrature node t=" +
                                std::to_string(t));
    return v;
}

double integrate(const TimeCoefficient& f, double s, double t, double rel_tol) {
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    return quadrature::integrate([&f](double r) { return f.eval_checked(r); }, s, t, opt);
}

quadrature::ImproperResult improper_integral(const TimeCoefficient& f, double rel_tol) {
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    return quadrature::improper_integral([&f](double r) { return f.eval_checked(r); }, 0.0,
                                         f.tail(), opt);
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double t0,
                                       double rel_tol)
    : f_(std::move(f)), t0_(t0), rel_tol_(rel_tol) {
    checkpoints_[t0_] = 0.0;
}

CumulativeIntegral::CumulativeIntegral(const TimeCoefficient& f, double t0, double rel_tol)
    : CumulativeIntegral([f](double t) { return f.eval_checked(t); }, t0, rel_tol) {}

double CumulativeIntegral::from_origin(double t) const {
    if (t == t0_) return 0.0;
    if (t < t0_) throw quadrature::QuadratureError("cumulative integral queried before origin");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = checkpoints_.upper_bound(t);
    --it;  // largest checkpoint <= t; t0 is always present
    const double base_t = it->first;
    const double base_v = it->second;
    if (base_t == t) return base_v;
    quadrature::Options opt;
    opt.rel_tol = rel_tol_;
    const double inc = quadrature::integrate(f_, base_t, t, opt);
    const double v = base_v + inc;
    checkpoints_.emplace(t, v);
    return v;
}

double CumulativeIntegral::operator()(double s, double t) const {
    if (s == t) return 0.0;
    if (s > t) throw quadrature::QuadratureError("cumulative integral: requires s <= t");
    const double v = from_origin(t) - from_origin(s);
    return std::max(v, 0.0);  // clamp roundoff on a nonnegative integrand
}

HtildeRatio::HtildeRatio(TimeCoefficient numerator, TimeCoefficient denominator, int samples)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    horizon_ = std::min(num_.t_max(), den_.t_max());
    const double tol = 1e-12;
    const double v0 = eval(0.0);
    bool mono = true;
    double dev = 0.0;
    double running_min = v0;
    for (int i = 1; i < samples; ++i) {
        const double t = horizon_ * static_cast<double>(i) / (samples - 1);
        const double v = eval(t);
        // nonincreasing: eval(t2) <= eval(t1) + tol for every sampled t1 < t2
        if (v > running_min * (1.0 + tol) + tol) mono = false;
        running_min = std::min(running_min, v);
        dev = std::max(dev, std::abs(v - v0) / std::max(std::abs(v0), 1e-300));
    }
    nonincreasing_ = mono;
    constancy_dev_ = dev;
}

double HtildeRatio::eval(double t) const { return num_.eval(t) / den_.eval(t); }

}  // namespace heatsys::coeffs

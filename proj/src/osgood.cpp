#include "heatsys/osgood.hpp"

#include <cmath>

namespace heatsys::osgood {

namespace {

constexpr double kBracketCap = 1e9;

struct BEval {
    // Integrand of B in the working variable; PowerLog works in u = log s
    // to keep the log factor well scaled.
    std::function<double(double)> integrand;
    double origin;                       // working-variable image of y0
    std::function<double(double)> to_working;  // s -> working variable
};

BEval b_integrand(const OsgoodProblem& prob) {
    const double y0 = prob.y0;
    if (const auto* pl = std::get_if<PowerLog>(&prob.b)) {
        const double p = pl->p, q = pl->q;
        return {[p, q](double u) { return std::exp((1.0 - p) * u) * std::pow(u, -q); },
                std::log(y0),
                [](double s) { return std::log(s); }};
    }
    if (const auto* cu = std::get_if<Custom>(&prob.b)) {
        const expr::ExprAst b = cu->b;
        return {[b](double s) {
                    const double v = b.eval(s);
                    if (!(v > 0.0) || !std::isfinite(v))
                        throw OsgoodError("custom nonlinearity vanishes inside the B integral");
                    return 1.0 / v;
                },
                y0,
                [](double s) { return s; }};
    }
    const Nonlinearity b = prob.b;
    return {[b](double s) { return 1.0 / b_eval(b, s); }, y0,
            [](double s) { return s; }};
}

void validate(const OsgoodProblem& prob) {
    if (!(prob.y0 > 0)) throw OsgoodError("osgood: y0 must be positive");
    if (const auto* pl = std::get_if<PowerLaw>(&prob.b)) {
        if (!(pl->alpha >= 0)) throw OsgoodError("osgood: PowerLaw exponent must be >= 0");
    } else if (const auto* plog = std::get_if<PowerLog>(&prob.b)) {
        if (!(plog->p >= 0)) throw OsgoodError("osgood: PowerLog p must be >= 0");
        if (plog->q != 0.0 && !(prob.y0 > 1.0 && prob.y0 > plog->s0))
            throw OsgoodError("osgood: PowerLog requires y0 > max(1, s0)");
    } else if (const auto* ep = std::get_if<ExpPower>(&prob.b)) {
        if (!(ep->p >= 0 && ep->c > 0 && ep->a > 0))
            throw OsgoodError("osgood: ExpPower requires p >= 0, c > 0, a > 0");
    } else if (const auto* cu = std::get_if<Custom>(&prob.b)) {
        // Sampled positivity certificate on [y0, 1e6 * max(1, y0)].
        const double hi = 1e6 * std::max(1.0, prob.y0);
        for (int i = 0; i < 1000; ++i) {
            const double s = prob.y0 * std::pow(hi / prob.y0, i / 999.0);
            const double v = cu->b.eval(s);
            if (!std::isfinite(v) || v <= 0.0)
                throw OsgoodError("osgood: custom b(s) fails the positivity certificate at s=" +
                                  std::to_string(s));
        }
    }
}

}  // namespace

double b_eval(const Nonlinearity& b, double s) {
    if (const auto* pl = std::get_if<PowerLaw>(&b)) return std::pow(s, pl->alpha);
    if (const auto* plog = std::get_if<PowerLog>(&b))
        return std::pow(s, plog->p) * std::pow(std::log(s), plog->q);
    if (const auto* ep = std::get_if<ExpPower>(&b))
        return std::pow(s, ep->p) * std::exp(ep->c * std::pow(s, ep->a));
    return std::get<Custom>(b).b.eval(s);
}

double B_transform(const OsgoodProblem& prob, double x, double rel_tol) {
    if (!(x >= prob.y0)) throw OsgoodError("B_transform: requires x >= y0");
    if (const auto* pl = std::get_if<PowerLaw>(&prob.b)) {
        const double a = pl->alpha;
        if (a == 1.0) return std::log(x / prob.y0);
        return (std::pow(prob.y0, 1.0 - a) - std::pow(x, 1.0 - a)) / (a - 1.0);
    }
    BEval be = b_integrand(prob);
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    return quadrature::integrate(be.integrand, be.origin, be.to_working(x), opt);
}

ExtValue B_infinity(const OsgoodProblem& prob, double rel_tol) {
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    if (const auto* pl = std::get_if<PowerLaw>(&prob.b)) {
        if (pl->alpha > 1.0)
            return ExtValue::finite(std::pow(prob.y0, 1.0 - pl->alpha) / (pl->alpha - 1.0));
        return ExtValue::infinite();
    }
    if (const auto* plog = std::get_if<PowerLog>(&prob.b)) {
        const double p = plog->p, q = plog->q;
        if (p > 1.0) {
            BEval be = b_integrand(prob);
            auto r = quadrature::improper_integral(
                be.integrand, be.origin,
                quadrature::TailDescriptor::exponential(1.0 - p, -q), opt);
            return ExtValue::finite(r.value);
        }
        if (p == 1.0 && q > 1.0)
            return ExtValue::finite(std::pow(std::log(prob.y0), 1.0 - q) / (q - 1.0));
        return ExtValue::infinite();
    }
    if (std::holds_alternative<ExpPower>(prob.b)) {
        BEval be = b_integrand(prob);
        auto r = quadrature::improper_integral(be.integrand, be.origin,
                                               quadrature::TailDescriptor::unknown(), opt);
        // The exp(c s^a) factor always wins; the windowed scheme converges.
        if (r.status != quadrature::ImproperResult::Status::Finite)
            throw OsgoodError("B_infinity: ExpPower integral failed to converge");
        return ExtValue::finite(r.value);
    }
    const auto& cu = std::get<Custom>(prob.b);
    BEval be = b_integrand(prob);
    auto r = quadrature::improper_integral(be.integrand, be.origin, cu.inv_tail, opt);
    switch (r.status) {
        case quadrature::ImproperResult::Status::Finite: return ExtValue::finite(r.value);
        case quadrature::ImproperResult::Status::Divergent: return ExtValue::infinite();
        default: return ExtValue::undetermined(r.value);
    }
}

ExtValue F_infinity(const OsgoodProblem& prob, double rel_tol) {
    auto r = coeffs::improper_integral(prob.f, rel_tol);
    switch (r.status) {
        case quadrature::ImproperResult::Status::Finite: return ExtValue::finite(r.value);
        case quadrature::ImproperResult::Status::Divergent: return ExtValue::infinite();
        default: return ExtValue::undetermined(r.value);
    }
}

OsgoodSolution solve(OsgoodProblem prob, double rel_tol) {
    validate(prob);
    OsgoodSolution sol;
    sol.prob_ = std::make_shared<OsgoodProblem>(std::move(prob));
    sol.rel_tol_ = rel_tol;
    const OsgoodProblem& p = *sol.prob_;
    sol.F_ = std::make_shared<coeffs::CumulativeIntegral>(p.f, 0.0, rel_tol);
    sol.b_inf_ = B_infinity(p, rel_tol);
    sol.f_inf_ = F_infinity(p, rel_tol);

    // Decide blow-up vs global, exploiting one-sided information:
    // an Undetermined integral still carries a certified lower bound.
    bool blows;
    if (sol.b_inf_.is_infinite()) {
        blows = false;  // global no matter what F(inf) is
    } else if (sol.b_inf_.is_finite()) {
        if (sol.f_inf_.is_infinite()) {
            blows = true;
        } else if (sol.f_inf_.is_finite()) {
            blows = sol.b_inf_.value < sol.f_inf_.value;
        } else if (sol.f_inf_.value > sol.b_inf_.value) {
            blows = true;  // F(inf) >= its lower bound > B(inf)
        } else {
            sol.kind_ = OsgoodSolution::Kind::Undetermined;
            sol.blow_up_time_ = std::numeric_limits<double>::infinity();
            return sol;
        }
    } else {
        // B(inf) undetermined: global only if its lower bound already
        // dominates a finite F(inf).
        if (sol.f_inf_.is_finite() && sol.b_inf_.value >= sol.f_inf_.value) {
            blows = false;
        } else {
            sol.kind_ = OsgoodSolution::Kind::Undetermined;
            sol.blow_up_time_ = std::numeric_limits<double>::infinity();
            return sol;
        }
    }
    if (!blows) {
        sol.kind_ = OsgoodSolution::Kind::Global;
        sol.blow_up_time_ = std::numeric_limits<double>::infinity();
        return sol;
    }

    // tau = F^{-1}(B(inf)): geometric bracket expansion from t=1, then
    // bisection on the cached cumulative integral.
    const double target = sol.b_inf_.value;
    double hi = 1.0;
    while (sol.F_->from_origin(hi) < target) {
        hi *= 2.0;
        if (hi > kBracketCap) {
            sol.kind_ = OsgoodSolution::Kind::BeyondCap;
            sol.blow_up_time_ = kBracketCap;
            return sol;
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sol.F_->from_origin(mid) < target) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    sol.kind_ = OsgoodSolution::Kind::FiniteBlowUp;
    sol.blow_up_time_ = 0.5 * (lo + hi);
    return sol;
}

double OsgoodSolution::value_at(double t) const {
    if (kind_ == Kind::Undetermined)
        throw OsgoodError("value_at: solution undetermined");
    if (!(t >= 0)) throw OsgoodError("value_at: t must be >= 0");
    if (kind_ == Kind::FiniteBlowUp && !(t < blow_up_time_))
        throw OsgoodError("value_at: t beyond blow-up time");
    if (t == 0.0) return prob_->y0;

    const double target = F_->from_origin(t);
    const OsgoodProblem& p = *prob_;

    // Closed-form inverse for PowerLaw; bisection otherwise.
    if (const auto* pl = std::get_if<PowerLaw>(&p.b)) {
        const double a = pl->alpha;
        if (a == 1.0) return p.y0 * std::exp(target);
        const double base = std::pow(p.y0, 1.0 - a) - (a - 1.0) * target;
        if (base <= 0.0) throw OsgoodError("value_at: t beyond blow-up time");
        return std::pow(base, 1.0 / (1.0 - a));
    }

    auto B_of = [&](double x) { return B_transform(p, x, rel_tol_); };
    double lo = p.y0;
    double hi = std::max(2.0 * p.y0, 1.0);
    while (B_of(hi) < target) {
        hi *= 2.0;
        if (hi > 1e306) throw OsgoodError("value_at: inversion bracket overflow");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (B_of(mid) < target) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double blow_up_time(const OsgoodProblem& prob, double rel_tol) {
    OsgoodSolution s = solve(prob, rel_tol);
    if (s.kind() == OsgoodSolution::Kind::Undetermined)
        throw OsgoodError("blow_up_time: undetermined tail");
    return s.blow_up_time();
}

}  // namespace heatsys::osgood

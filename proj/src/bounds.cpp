#include "heatsys/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace heatsys::bounds {

namespace {

constexpr double kZeroTol = 1e-12;  // exact-zero test on computed a_i

bool is_zero(double a) { return std::abs(a) <= kZeroTol; }

coeffs::HtildeRatio htilde(const companion::CompanionProblem& prob, int i) {
    return coeffs::HtildeRatio(prob.h(i), prob.h(3 - i));
}

/// Composed time coefficient c_pow * h_j * (h_i/h_j)^q with the matching
/// tail class.
coeffs::TimeCoefficient weighted_coeff(const companion::CompanionProblem& prob, int base,
                                       int ratio_num, double q, double scale) {
    const auto& hb = prob.h(base);
    const auto& hn = prob.h(ratio_num);
    const auto& hd = prob.h(3 - ratio_num);
    expr::ExprAst ast = expr::mul(
        expr::constant(scale),
        expr::mul(hb.expression(),
                  expr::pow(expr::div(hn.expression(), hd.expression()), expr::constant(q))));
    const auto tail = hb.tail() * (hn.tail() / hd.tail()).pow(q);
    const double t_max = std::min(hb.t_max(), std::min(hn.t_max(), hd.t_max()));
    return coeffs::TimeCoefficient(ast, t_max, 10001, tail);
}

coeffs::TimeCoefficient scaled_coeff(const coeffs::TimeCoefficient& h, double scale) {
    return coeffs::TimeCoefficient(expr::mul(expr::constant(scale), h.expression()), h.t_max(),
                                   10001, h.tail());
}

Verdict unverified(int component, const char* label, std::string which) {
    Verdict v;
    v.component = component;
    v.kind = Verdict::Kind::HypothesisUnverified;
    v.case_label = label;
    v.reason = std::move(which);
    return v;
}

void put_ext(std::map<std::string, double>& audit, const std::string& key,
             const osgood::ExtValue& v) {
    audit[key] = v.value;
}

}  // namespace

Constants power_comparison_constant(const companion::CompanionProblem& prob, int i) {
    const int j = 3 - i;
    const auto& e = prob.exponents;
    const double ai = e.a(i), aj = e.a(j);
    if (!(ai > 0) || is_zero(aj))
        throw std::invalid_argument("power comparison constant: requires a_i > 0 and a_j != 0");
    const double h0 = prob.h(i).eval(0.0) / prob.h(j).eval(0.0);
    const double M = std::max(aj / ai, h0 * std::pow(prob.y0(j), aj) / std::pow(prob.y0(i), ai));
    if (!(M > 0)) throw std::invalid_argument("power comparison constant: nonpositive M");
    return {M, std::pow(M, -1.0 / ai)};
}

Constants log_comparison_constant(const companion::CompanionProblem& prob, int i) {
    const int j = 3 - i;
    const auto& e = prob.exponents;
    const double ai = e.a(i);
    if (!(ai > 0) || !is_zero(e.a(j)))
        throw std::invalid_argument("log comparison constant: requires a_i > 0 and a_j == 0");
    const double h0 = prob.h(i).eval(0.0) / prob.h(j).eval(0.0);
    const double M =
        std::max(1.0 / ai, std::log(prob.y0(j)) * h0 / std::pow(prob.y0(i), ai));
    if (!(M > 0)) throw std::invalid_argument("log comparison constant: nonpositive M");
    return {M, 1.0 / M};
}

CaseInfo case_dispatch(const companion::ExponentMatrix& e, std::optional<Case> declared) {
    CaseInfo info;
    info.a1 = e.a(1);
    info.a2 = e.a(2);
    const bool z1 = is_zero(info.a1), z2 = is_zero(info.a2);

    if (declared) {
        info.label = *declared;
    } else if (z1 && z2) {
        info.label = Case::C;
    } else if ((info.a1 > 0 && z2) || (info.a2 > 0 && z1)) {
        info.label = Case::B;
    } else if ((info.a1 > 0 && !z2) || (info.a2 > 0 && !z1)) {
        info.label = Case::A;
    } else {
        info.label = Case::Unsupported;  // both a_i < 0: no case applies
    }

    switch (info.label) {
        case Case::A:
            if (info.a1 > 0 && !is_zero(info.a2)) info.roles.emplace_back(1, 2);
            if (info.a2 > 0 && !is_zero(info.a1)) info.roles.emplace_back(2, 1);
            break;
        case Case::B:
            if (info.a1 > 0 && is_zero(info.a2)) info.roles.emplace_back(1, 2);
            if (info.a2 > 0 && is_zero(info.a1)) info.roles.emplace_back(2, 1);
            break;
        case Case::C:
            info.roles.emplace_back(1, 2);
            info.roles.emplace_back(2, 1);
            break;
        case Case::Unsupported:
            break;
    }
    return info;
}

Verdict verdict_a1(const companion::CompanionProblem& prob, int i, int j) {
    const auto& e = prob.exponents;
    const double ai = e.a(i), aj = e.a(j);
    if (!(ai > 0) || is_zero(aj)) return unverified(j, "a.1", "case (a) roles do not apply");
    const auto ratio = htilde(prob, i);
    if (!ratio.nonincreasing())
        return unverified(j, "a.1", "sampled h~ monotonicity check failed");

    Verdict v;
    v.component = j;
    v.case_label = "a.1";
    const double alpha_j = e.p(j, j) + e.p(j, i) * aj / ai;
    v.audit["alpha_j"] = alpha_j;
    if (!(alpha_j > 1.0)) {
        v.kind = Verdict::Kind::Inconclusive;
        v.reason = "alpha_j <= 1";
        return v;
    }
    const Constants c = power_comparison_constant(prob, i);
    v.audit["M"] = c.M;
    v.audit["c"] = c.c;
    const double pji = e.p(j, i);
    const double threshold = std::pow(prob.y0(j), 1.0 - alpha_j) / (alpha_j - 1.0);
    v.audit["threshold"] = threshold;

    osgood::OsgoodProblem scalar{prob.y0(j),
                                 weighted_coeff(prob, j, i, pji / ai, std::pow(c.c, pji)),
                                 osgood::PowerLaw{alpha_j}};
    osgood::OsgoodSolution sol = osgood::solve(std::move(scalar));
    put_ext(v.audit, "F_inf", sol.F_inf());
    switch (sol.kind()) {
        case osgood::OsgoodSolution::Kind::FiniteBlowUp:
            v.kind = Verdict::Kind::UpperBound;
            v.tau_bar = sol.blow_up_time();
            return v;
        case osgood::OsgoodSolution::Kind::BeyondCap:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "bound beyond the 1e9 inversion cap";
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "F(inf) does not exceed the threshold";
            return v;
    }
}

Verdict verdict_a2(const companion::CompanionProblem& prob, int i, int j) {
    const auto& e = prob.exponents;
    const double ai = e.a(i), aj = e.a(j);
    if (!(ai > 0) || is_zero(aj)) return unverified(i, "a.2", "case (a) roles do not apply");
    const auto ratio = htilde(prob, i);
    if (!ratio.nonincreasing())
        return unverified(i, "a.2", "sampled h~ monotonicity check failed");

    Verdict v;
    v.component = i;
    v.case_label = "a.2";
    if (aj < 0) {
        // Rearranging the power comparison for an upper bound on y_j flips
        // direction when a_j < 0; no certificate is available on this side.
        v.kind = Verdict::Kind::Inconclusive;
        v.reason = "a_j < 0: the comparison rearrangement needs a_j > 0";
        return v;
    }
    const double alpha_i = e.alpha(i);
    v.audit["alpha_i"] = alpha_i;
    if (alpha_i <= 1.0) {
        v.kind = Verdict::Kind::GlobalCertificate;
        return v;
    }
    const Constants c = power_comparison_constant(prob, i);
    v.audit["M"] = c.M;
    v.audit["c"] = c.c;
    const double pij = e.p(i, j);
    const double threshold = std::pow(prob.y0(i), 1.0 - alpha_i) / (alpha_i - 1.0);
    v.audit["threshold"] = threshold;

    // F_{1,i} carries c^{p_ii - alpha_i} = c^{-p_ij a_i / a_j}.
    osgood::OsgoodProblem scalar{
        prob.y0(i),
        weighted_coeff(prob, i, i, -pij / aj, std::pow(c.c, e.p(i, i) - alpha_i)),
        osgood::PowerLaw{alpha_i}};
    osgood::OsgoodSolution sol = osgood::solve(std::move(scalar));
    put_ext(v.audit, "F_inf", sol.F_inf());
    switch (sol.kind()) {
        case osgood::OsgoodSolution::Kind::Global:
            v.kind = Verdict::Kind::GlobalCertificate;
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "F(inf) exceeds the global-existence threshold";
            return v;
    }
}

Verdict verdict_b1(const companion::CompanionProblem& prob, int i, int j) {
    const auto& e = prob.exponents;
    const double ai = e.a(i);
    if (!(ai > 0) || !is_zero(e.a(j)))
        return unverified(j, "b.1", "case (b) roles do not apply");
    const auto ratio = htilde(prob, i);
    if (!ratio.nonincreasing())
        return unverified(j, "b.1", "sampled h~ monotonicity check failed");
    if (!(prob.y0(j) > 1.0)) return unverified(j, "b.1", "requires y_j(0) > 1");

    Verdict v;
    v.component = j;
    v.case_label = "b.1";
    const Constants c = log_comparison_constant(prob, i);
    v.audit["M"] = c.M;
    v.audit["c"] = c.c;
    const double q = e.p(j, i) / ai;
    v.audit["log_power_q"] = q;

    // Raising the log comparison y_i^{a_i} >= c h~ log y_j to the power
    // p_ji/a_i puts c^{p_ji/a_i} in front of the scalar growth coefficient.
    osgood::OsgoodProblem scalar{prob.y0(j),
                                 weighted_coeff(prob, j, i, q, std::pow(c.c, q)),
                                 osgood::PowerLog{e.p(j, j), q, 1.0}};
    osgood::OsgoodSolution sol = osgood::solve(std::move(scalar));
    put_ext(v.audit, "F_inf", sol.F_inf());
    put_ext(v.audit, "B_inf", sol.B_inf());
    switch (sol.kind()) {
        case osgood::OsgoodSolution::Kind::FiniteBlowUp:
            v.kind = Verdict::Kind::UpperBound;
            v.tau_bar = sol.blow_up_time();
            return v;
        case osgood::OsgoodSolution::Kind::BeyondCap:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "bound beyond the 1e9 inversion cap";
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "F_{2,j}(inf) does not exceed B_{2,j}(inf)";
            return v;
    }
}

Verdict verdict_b2(const companion::CompanionProblem& prob, int i, int j) {
    const auto& e = prob.exponents;
    const double ai = e.a(i);
    if (!(ai > 0) || !is_zero(e.a(j)))
        return unverified(i, "b.2", "case (b) roles do not apply");
    const auto ratio = htilde(prob, i);
    if (!ratio.is_constant())
        return unverified(i, "b.2", "requires h~ constant (sampled deviation too large)");

    Verdict v;
    v.component = i;
    v.case_label = "b.2";
    const double c_tilde = ratio.eval(0.0);
    v.audit["c_tilde"] = c_tilde;
    const Constants c = log_comparison_constant(prob, i);
    v.audit["M"] = c.M;
    v.audit["c"] = c.c;

    const double pij = e.p(i, j);
    osgood::Nonlinearity b =
        pij > 0 ? osgood::Nonlinearity(osgood::ExpPower{e.p(i, i), pij / (c.c * c_tilde), ai})
                : osgood::Nonlinearity(osgood::PowerLaw{e.p(i, i)});
    osgood::OsgoodSolution sol = osgood::solve({prob.y0(i), prob.h(i), std::move(b)});
    put_ext(v.audit, "F_inf", sol.F_inf());
    put_ext(v.audit, "B_inf", sol.B_inf());
    switch (sol.kind()) {
        case osgood::OsgoodSolution::Kind::Global:
            v.kind = Verdict::Kind::GlobalCertificate;
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "F_{2,i}(inf) exceeds B_{2,i}(inf)";
            return v;
    }
}

namespace {

/// Case (c): the log-variables are proportional, so component m satisfies
/// y_m' = kappa h_m y_m^{gamma_m} exactly, with gamma_m = p_mm + p_mo /
/// c~_m and kappa = (y_o(0) / y_m(0)^{1/c~_m})^{p_mo}.
struct CaseCScalar {
    double gamma;
    double kappa;
    double c_tilde;
    osgood::OsgoodSolution sol;
};

std::optional<CaseCScalar> case_c_scalar(const companion::CompanionProblem& prob, int m,
                                         bool declared, std::string* why) {
    const auto& e = prob.exponents;
    if (!declared && (!is_zero(e.a(1)) || !is_zero(e.a(2)))) {
        if (why) *why = "case (c) requires a_1 = a_2 = 0";
        return std::nullopt;
    }
    const int o = 3 - m;
    const auto ratio = htilde(prob, m);
    if (!ratio.is_constant()) {
        if (why) *why = "requires h~ constant (sampled deviation too large)";
        return std::nullopt;
    }
    const double c_tilde = ratio.eval(0.0);
    const double gamma = e.p(m, m) + e.p(m, o) / c_tilde;
    const double kappa =
        std::pow(prob.y0(o) / std::pow(prob.y0(m), 1.0 / c_tilde), e.p(m, o));
    osgood::OsgoodSolution sol =
        osgood::solve({prob.y0(m), scaled_coeff(prob.h(m), kappa), osgood::PowerLaw{gamma}});
    return CaseCScalar{gamma, kappa, c_tilde, std::move(sol)};
}

}  // namespace

Verdict verdict_c1(const companion::CompanionProblem& prob, int m, bool declared) {
    std::string why;
    auto sc = case_c_scalar(prob, m, declared, &why);
    if (!sc) return unverified(m, "c.1", why);

    Verdict v;
    v.component = m;
    v.case_label = "c.1";
    v.audit["c_tilde"] = sc->c_tilde;
    v.audit["beta"] = sc->gamma;
    v.audit["prefactor"] = sc->kappa;
    put_ext(v.audit, "F_inf", sc->sol.F_inf());
    if (!(sc->gamma > 1.0)) {
        v.kind = Verdict::Kind::Inconclusive;
        v.reason = "beta <= 1";
        return v;
    }
    v.audit["threshold"] = std::pow(prob.y0(m), 1.0 - sc->gamma) / (sc->gamma - 1.0);
    switch (sc->sol.kind()) {
        case osgood::OsgoodSolution::Kind::FiniteBlowUp:
            v.kind = Verdict::Kind::UpperBound;
            v.tau_bar = sc->sol.blow_up_time();
            return v;
        case osgood::OsgoodSolution::Kind::BeyondCap:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "bound beyond the 1e9 inversion cap";
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "F_{3}(inf) does not exceed the threshold";
            return v;
    }
}

Verdict verdict_c2(const companion::CompanionProblem& prob, int m, bool declared) {
    std::string why;
    auto sc = case_c_scalar(prob, m, declared, &why);
    if (!sc) return unverified(m, "c.2", why);

    Verdict v;
    v.component = m;
    v.case_label = "c.2";
    v.audit["c_tilde"] = sc->c_tilde;
    v.audit["gamma"] = sc->gamma;
    v.audit["prefactor"] = sc->kappa;
    put_ext(v.audit, "F_inf", sc->sol.F_inf());
    switch (sc->sol.kind()) {
        case osgood::OsgoodSolution::Kind::Global:
            v.kind = Verdict::Kind::GlobalCertificate;
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined improper integral";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "gamma > 1 and F(inf) exceeds the threshold";
            return v;
    }
}

Verdict single_power_criterion(const companion::CompanionProblem& prob, int i) {
    const auto& e = prob.exponents;
    Verdict v;
    v.component = i;
    v.case_label = "single-power";
    if (!(e.p(i, i) > 1.0)) {
        v.kind = Verdict::Kind::Inconclusive;
        v.reason = "requires p_ii > 1";
        return v;
    }
    const int j = 3 - i;
    const double scale = std::pow(prob.y0(j), e.p(i, j));
    const double threshold =
        std::pow(prob.y0(i), 1.0 - e.p(i, i)) / ((e.p(i, i) - 1.0) * scale);
    v.audit["threshold_int_h"] = threshold;

    osgood::OsgoodSolution sol =
        osgood::solve({prob.y0(i), scaled_coeff(prob.h(i), scale), osgood::PowerLaw{e.p(i, i)}});
    put_ext(v.audit, "F_inf", sol.F_inf());
    put_ext(v.audit, "B_inf", sol.B_inf());
    switch (sol.kind()) {
        case osgood::OsgoodSolution::Kind::FiniteBlowUp:
            v.kind = Verdict::Kind::BlowUpCertificate;
            v.tau_bar = sol.blow_up_time();
            return v;
        case osgood::OsgoodSolution::Kind::BeyondCap:
            v.kind = Verdict::Kind::BlowUpCertificate;
            v.tau_bar = std::numeric_limits<double>::infinity();
            v.reason = "blow-up certified; bound beyond the 1e9 inversion cap";
            return v;
        case osgood::OsgoodSolution::Kind::Undetermined:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "undetermined tail for int h_i";
            return v;
        default:
            v.kind = Verdict::Kind::Inconclusive;
            v.reason = "int h_i does not exceed the threshold";
            return v;
    }
}

ClassifierVerdict classify_constant_coefficients(const companion::ExponentMatrix& e) {
    if (e.p11 > 1.0 || e.p22 > 1.0) return ClassifierVerdict::BlowUp;
    if ((e.p11 - 1.0) * (e.p22 - 1.0) - e.p12 * e.p21 < 0.0) return ClassifierVerdict::BlowUp;
    return ClassifierVerdict::NotCovered;
}

Report analyze(const companion::CompanionProblem& prob, std::optional<Case> declared_case) {
    Report rep;
    rep.case_info = case_dispatch(prob.exponents, declared_case);

    switch (rep.case_info.label) {
        case Case::A:
            for (auto [i, j] : rep.case_info.roles) {
                rep.verdicts.push_back(verdict_a1(prob, i, j));
                rep.verdicts.push_back(verdict_a2(prob, i, j));
            }
            break;
        case Case::B:
            for (auto [i, j] : rep.case_info.roles) {
                rep.verdicts.push_back(verdict_b1(prob, i, j));
                rep.verdicts.push_back(verdict_b2(prob, i, j));
            }
            break;
        case Case::C: {
            const bool declared = declared_case.has_value();
            for (int m = 1; m <= 2; ++m) {
                rep.verdicts.push_back(verdict_c1(prob, m, declared));
                rep.verdicts.push_back(verdict_c2(prob, m, declared));
            }
            break;
        }
        case Case::Unsupported:
            break;
    }
    for (int i = 1; i <= 2; ++i)
        if (prob.exponents.p(i, i) > 1.0) rep.verdicts.push_back(single_power_criterion(prob, i));

    if (prob.h1.is_constant() && prob.h2.is_constant())
        rep.classifier = classify_constant_coefficients(prob.exponents);

    for (const auto& v : rep.verdicts) {
        const bool bounds_tau = v.kind == Verdict::Kind::UpperBound ||
                                v.kind == Verdict::Kind::BlowUpCertificate;
        if (bounds_tau && std::isfinite(v.tau_bar)) {
            if (!rep.system_upper_bound || v.tau_bar < *rep.system_upper_bound)
                rep.system_upper_bound = v.tau_bar;
        }
    }
    return rep;
}

companion::BracketResult bracket_or_global(const companion::CompanionProblem& prob,
                                           const companion::BracketOptions& opts) {
    Report rep = analyze(prob);
    bool global1 = false, global2 = false;
    for (const auto& v : rep.verdicts) {
        if (v.kind == Verdict::Kind::GlobalCertificate) {
            (v.component == 1 ? global1 : global2) = true;
        }
    }
    companion::BracketOptions forwarded = opts;
    forwarded.certified_global = opts.certified_global || (global1 && global2);
    return companion::blow_up_bracket(prob, forwarded);
}

namespace {

InequalityCheck run_check(const companion::CompanionTrajectory& traj,
                          const std::function<double(const companion::TrajectorySample&)>& lhs,
                          const std::function<double(const companion::TrajectorySample&)>& rhs) {
    InequalityCheck chk;
    for (const auto& s : traj.samples) {
        const double l = lhs(s), r = rhs(s);
        const double slack = (l - r) / std::max({std::abs(l), std::abs(r), 1e-300});
        chk.worst_slack = std::min(chk.worst_slack, slack);
        if (slack < -1e-8) chk.ok = false;
        ++chk.samples;
    }
    return chk;
}

}  // namespace

InequalityCheck check_power_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i) {
    const int j = 3 - i;
    const auto& e = prob.exponents;
    const Constants c = power_comparison_constant(prob, i);
    const double ai = e.a(i), aj = e.a(j);
    return run_check(
        traj, [&, i](const companion::TrajectorySample& s) { return s.y(i); },
        [&, i, j](const companion::TrajectorySample& s) {
            const double ht = prob.h(i).eval(s.t) / prob.h(j).eval(s.t);
            return c.c * std::pow(ht, 1.0 / ai) * std::pow(s.y(j), aj / ai);
        });
}

InequalityCheck check_log_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i) {
    const int j = 3 - i;
    const double ai = prob.exponents.a(i);
    const Constants c = log_comparison_constant(prob, i);
    return run_check(
        traj, [&, i](const companion::TrajectorySample& s) { return std::pow(s.y(i), ai); },
        [&, i, j](const companion::TrajectorySample& s) {
            const double ht = prob.h(i).eval(s.t) / prob.h(j).eval(s.t);
            return c.c * ht * std::log(s.y(j));
        });
}

InequalityCheck check_proportional_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i) {
    const int j = 3 - i;
    return run_check(
        traj, [&, i](const companion::TrajectorySample& s) { return s.y(i); },
        [&, i, j](const companion::TrajectorySample& s) {
            const double ht = prob.h(i).eval(s.t) / prob.h(j).eval(s.t);
            return prob.y0(i) * std::pow(s.y(j) / prob.y0(j), ht);
        });
}

}  // namespace heatsys::bounds

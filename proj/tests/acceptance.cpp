// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fails. Every tolerance is pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "heatsys/bounds.hpp"
#include "heatsys/osgood.hpp"
#include "heatsys/pde.hpp"
#include "heatsys/verify.hpp"

using namespace heatsys;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<std::string()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    if (!detail.empty() && detail[0] == '!') {
        pass = false;
        detail = detail.substr(1);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] C%-2d %-34s %s [%.2f s]\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fail(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return std::string("!") + buf;
}

std::string ok(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

coeffs::TimeCoefficient const_coeff(double v) {
    return coeffs::TimeCoefficient(expr::constant(v), 50.0, 10001,
                                   quadrature::TailDescriptor::power(0.0));
}

coeffs::TimeCoefficient exp_coeff(double rate) {
    auto ast = expr::parse_expr("exp(" + std::to_string(-rate) + "*t)");
    return coeffs::TimeCoefficient(ast, 50.0, 10001,
                                   quadrature::TailDescriptor::exponential(-rate));
}

pde::PdeConfig bump_run_config() {
    return pde::PdeConfig{1,
                          512,
                          0.0,  // auto box
                          {pde::ConstantMinusBump{1.0, 0.5, 1.0},
                           pde::ConstantMinusBump{1.0, 0.5, 1.0}},
                          {0.0, 2.0, 2.0, 0.0},
                          const_coeff(1.0),
                          const_coeff(1.0),
                          const_coeff(1.0),
                          const_coeff(1.0),
                          1.05,
                          {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99}};
}

}  // namespace

int main() {
    std::printf("acceptance criteria\n");

    criterion(1, "scalar blow-up formula", [] {
        std::mt19937_64 rng(1001);
        std::uniform_real_distribution<double> up(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double p = 1.0 + 4.0 * std::max(up(rng), 1e-3);
            const double M = 0.5 + 9.5 * up(rng);
            const double tau = osgood::blow_up_time({M, const_coeff(1.0), osgood::PowerLaw{p}});
            const double expect = std::pow(M, 1.0 - p) / (p - 1.0);
            worst = std::max(worst, std::abs(tau - expect) / expect);
        }
        if (worst > 1e-10) return fail("worst rel err %.2e > 1e-10", worst);
        return ok("20 (p,M) pairs, worst rel err %.2e", worst);
    });

    criterion(2, "non-autonomous scalar", [] {
        const double tau = osgood::blow_up_time({2.0, exp_coeff(1.0), osgood::PowerLaw{2.0}});
        const double err = std::abs(tau - std::log(2.0));
        if (err > 1e-9) return fail("|tau - ln 2| = %.2e > 1e-9", err);
        const double tau2 = osgood::blow_up_time({0.5, exp_coeff(1.0), osgood::PowerLaw{2.0}});
        if (!std::isinf(tau2)) return fail("y0 = 0.5 should be global, got %.6f", tau2);
        return ok("tau = ln 2 (err %.2e); y0 = 1/2 global", err);
    });

    criterion(3, "symmetric system exactness", [] {
        companion::CompanionProblem prob{{0.0, 2.0, 2.0, 0.0}, const_coeff(1.0), const_coeff(1.0),
                                         1.0, 1.0};
        auto bracket = companion::blow_up_bracket(prob);
        if (bracket.kind != companion::BracketResult::Kind::Bracket)
            return fail("no bracket produced %.0f", 0.0);
        if (!(bracket.t_lo <= 1.0 && 1.0 <= bracket.t_hi))
            return fail("bracket [%.12f, %.12f] misses 1.0", bracket.t_lo, bracket.t_hi);
        if (bracket.t_hi - bracket.t_lo > 1e-6)
            return fail("bracket width %.2e > 1e-6", bracket.t_hi - bracket.t_lo);
        auto v = bounds::verdict_a1(prob, 1, 2);
        if (v.kind != bounds::Verdict::Kind::UpperBound)
            return fail("a.1 verdict is not an upper bound %.0f", 0.0);
        if (std::abs(v.tau_bar - 1.0) > 1e-9)
            return fail("a.1 bound %.12f != 1.0 +- 1e-9", v.tau_bar);
        if (bounds::classify_constant_coefficients(prob.exponents) !=
            bounds::ClassifierVerdict::BlowUp)
            return fail("classifier should say BlowUp %.0f", 0.0);
        return ok("bracket width %.1e contains 1; a.1 bound err %.1e",
                  bracket.t_hi - bracket.t_lo, std::abs(v.tau_bar - 1.0));
    });

    criterion(4, "case-c tightness", [] {
        companion::CompanionProblem prob{{2.0, 1.0, 1.0, 2.0}, const_coeff(1.0), const_coeff(1.0),
                                         1.0, 1.0};
        auto v = bounds::verdict_c1(prob, 2);
        if (v.kind != bounds::Verdict::Kind::UpperBound)
            return fail("c.1 verdict is not an upper bound %.0f", 0.0);
        if (std::abs(v.tau_bar - 0.5) > 1e-9)
            return fail("c.1 bound %.12f != 0.5 +- 1e-9", v.tau_bar);
        auto bracket = companion::blow_up_bracket(prob);
        if (bracket.kind != companion::BracketResult::Kind::Bracket ||
            !(bracket.t_lo <= 0.5 && 0.5 <= bracket.t_hi))
            return fail("bracket [%.12f, %.12f] misses 0.5", bracket.t_lo, bracket.t_hi);
        return ok("c.1 bound err %.1e; bracket contains 0.5",
                  std::abs(v.tau_bar - 0.5));
    });

    criterion(5, "single-power decaying-h boundary", [] {
        companion::CompanionProblem blow{{2.0, 0.0, 0.0, 0.0}, exp_coeff(1.0), exp_coeff(1.0),
                                         2.0, 1.0};
        auto v = bounds::single_power_criterion(blow, 1);
        if (v.kind != bounds::Verdict::Kind::BlowUpCertificate)
            return fail("y0 = 2 should certify blow-up %.0f", 0.0);
        if (std::abs(v.tau_bar - std::log(2.0)) > 1e-9)
            return fail("certificate time %.12f != ln 2 +- 1e-9", v.tau_bar);

        companion::CompanionProblem glob{{2.0, 0.0, 0.0, 0.0}, exp_coeff(1.0), exp_coeff(1.0),
                                         0.5, 1.0};
        if (bounds::single_power_criterion(glob, 1).kind != bounds::Verdict::Kind::Inconclusive)
            return fail("y0 = 1/2 should be inconclusive %.0f", 0.0);
        auto traj = companion::solve(glob, 1e3, {});
        if (traj.status != companion::RunStatus::Completed)
            return fail("global-evidence run did not reach t = 1e3 %.0f", 0.0);
        const double ymax = std::max(traj.samples.back().y1, traj.samples.back().y2);
        if (ymax >= 1e3 * 0.5) return fail("y(1e3) = %.3e not below 1e3*y0", ymax);
        return ok("tau = ln 2 (err %.1e); y(1e3) = %.3f stays bounded",
                  std::abs(v.tau_bar - std::log(2.0)), ymax);
    });

    criterion(6, "comparison-constant inequalities", [] {
        std::mt19937_64 rng(3003);
        std::uniform_real_distribution<double> up(0.0, 1.0);
        double worst = 0.0;
        int trajectories = 0;

        auto run_and_check = [&](const companion::CompanionProblem& prob,
                                 const std::vector<std::pair<int, int>>& checks) -> bool {
            auto traj = companion::solve(prob, 50.0, {});
            if (traj.status != companion::RunStatus::BlowUp) return false;
            ++trajectories;
            for (auto [which, i] : checks) {
                bounds::InequalityCheck chk;
                if (which == 19) chk = bounds::check_power_comparison(prob, traj, i);
                else if (which == 20) chk = bounds::check_log_comparison(prob, traj, i);
                else chk = bounds::check_proportional_comparison(prob, traj, i);
                worst = std::min(worst, chk.worst_slack);  // most negative slack
                if (!chk.ok) return false;
            }
            return true;
        };

        // case (a): strong symmetric-ish coupling; two constant-h, two with
        // a decaying ratio
        for (int k = 0; k < 4; ++k) {
            const bool decay = k >= 2;
            companion::CompanionProblem prob{
                {0.8 * up(rng), 1.8 + 0.6 * up(rng), 1.8 + 0.6 * up(rng), 0.8 * up(rng)},
                decay ? exp_coeff(0.05 + 0.15 * up(rng)) : const_coeff(1.0),
                const_coeff(1.0),
                1.2 + 0.8 * up(rng),
                1.2 + 0.8 * up(rng)};
            std::vector<std::pair<int, int>> checks{{19, 1}};
            if (!decay) checks.push_back({19, 2});  // both roles nonincreasing
            if (!run_and_check(prob, checks))
                return fail("case-a trajectory %.0f failed", k);
        }
        // case (b): a_2 = 0 structurally (p12 = p22 - 1)
        for (int k = 0; k < 3; ++k) {
            const double p22 = 1.6 + 0.6 * up(rng);
            const double p11 = 0.4 * up(rng);
            companion::CompanionProblem prob{{p11, p22 - 1.0, p11 + 0.6 + up(rng), p22},
                                             k == 0 ? const_coeff(1.0)
                                                    : exp_coeff(0.05 + 0.1 * up(rng)),
                                             const_coeff(1.0),
                                             0.8 + 0.7 * up(rng),
                                             1.3 + 0.9 * up(rng)};
            if (!run_and_check(prob, {{20, 1}}))
                return fail("case-b trajectory %.0f failed", k);
        }
        // case (c): p21 = p11 - 1, p12 = p22 - 1, constant ratio != 1
        for (int k = 0; k < 3; ++k) {
            const double p11 = 1.4 + up(rng);
            const double p22 = 1.4 + up(rng);
            companion::CompanionProblem prob{{p11, p22 - 1.0, p11 - 1.0, p22},
                                             const_coeff(0.5 + 1.5 * up(rng)),
                                             const_coeff(1.0),
                                             0.9 + 0.9 * up(rng),
                                             0.9 + 0.9 * up(rng)};
            if (!run_and_check(prob, {{21, 1}, {21, 2}}))
                return fail("case-c trajectory %.0f failed", k);
        }
        if (trajectories != 10)
            return fail("expected 10 blow-up trajectories, got %.0f", trajectories);
        return ok("10 blow-up trajectories, worst slack %.2e (tol -1e-8)", worst);
    });

    criterion(7, "power-product identity fuzz", [] {
        const double worst = verify::power_product_fuzz_worst(424242, 1000);
        if (worst > 1e-8) return fail("worst |lhs-rhs|/(1+|lhs|) = %.2e > 1e-8", worst);
        return ok("1000 seeded tuples, worst %.2e", worst);
    });

    criterion(8, "PDE homogeneous exactness", [] {
        pde::PdeConfig cfg{1,
                           64,
                           10.0,
                           {pde::Constant{1.0}, pde::Constant{1.0}},
                           {0.0, 2.0, 2.0, 0.0},
                           const_coeff(1.0),
                           const_coeff(1.0),
                           const_coeff(1.0),
                           const_coeff(1.0),
                           0.75,
                           {0.25, 0.5, 0.75}};
        pde::Simulator sim(cfg);
        auto run = sim.run();
        if (run.status != pde::SimulationRun::Status::Completed)
            return fail("run did not complete %.0f", 0.0);
        double worst = 0.0;
        for (const auto& s : run.snapshots) {
            const double y = 1.0 / (1.0 - s.t);
            for (int i = 0; i < 2; ++i) {
                worst = std::max({worst, std::abs(s.sup[i] - y) / y,
                                  std::abs(s.center[i] - y) / y, std::abs(s.far[i] - y) / y});
            }
        }
        if (worst > 1e-4) return fail("worst rel err %.2e > 1e-4", worst);
        return ok("sup/center/far vs y: worst rel err %.2e", worst);
    });

    // One bump run feeds criteria 9 and 10 ("the same run continued").
    static pde::SimulationRun bump_run;
    criterion(9, "far-field tracking", [] {
        pde::Simulator sim(bump_run_config());
        bump_run = sim.run();
        if (bump_run.status != pde::SimulationRun::Status::BlowUpDetected)
            return fail("expected BlowUpDetected %.0f", 0.0);
        double worst_track = 0.0, worst_dom = -1.0;
        for (const auto& s : bump_run.snapshots) {
            for (int i = 0; i < 2; ++i) {
                if (s.t <= 0.8 + 1e-12)
                    worst_track = std::max(worst_track, std::abs(s.far[i] - s.companion_y[i]));
                worst_dom = std::max(worst_dom, s.sup[i] / s.companion_y[i] - 1.0);
            }
        }
        if (worst_track > 1e-3) return fail("worst |far - y| = %.2e > 1e-3", worst_track);
        if (worst_dom > 1e-6) return fail("domination violated: sup/y - 1 = %.2e", worst_dom);
        return ok("|far-y| <= %.1e; sup/y-1 <= %.1e", worst_track, std::max(worst_dom, 0.0));
    });

    criterion(10, "interior/far separation at blow-up", [] {
        if (bump_run.snapshots.empty()) return fail("no run available %.0f", 0.0);
        const auto& last = bump_run.snapshots.back();
        for (int i = 0; i < 2; ++i)
            if (last.center[i] > 0.9 * last.far[i])
                return fail("center/far = %.3f > 0.9 at last stable time",
                            last.center[i] / last.far[i]);
        // ratio nonincreasing over the recorded window (t >= 0.8)
        double prev[2] = {2.0, 2.0};
        for (const auto& s : bump_run.snapshots) {
            if (s.t < 0.8 - 1e-12) continue;
            for (int i = 0; i < 2; ++i) {
                const double r = s.center[i] / s.far[i];
                if (r > prev[i] * (1.0 + 1e-9))
                    return fail("ratio increased to %.6f at t=%.3f", r, s.t);
                prev[i] = r;
            }
        }
        return ok("center/far at last stable = %.2e (<= 0.9); nonincreasing on [0.8, end]",
                  last.center[0] / last.far[0]);
    });

    criterion(11, "Picard vs splitting", [] {
        auto cfg = bump_run_config();
        cfg.n = 256;
        cfg.half_length = 12.0;
        cfg.snapshot_times.clear();
        pde::Simulator sim(cfg);
        auto rep = sim.picard_validate(0.0, 15);  // automatic contraction horizon
        if (rep.discrepancy > 1e-5)
            return fail("discrepancy %.2e > 1e-5", rep.discrepancy);
        if (!rep.contracted)
            return fail("iterates contracted slower than 2x (worst ratio %.3f)",
                        rep.worst_ratio);
        return ok("T=%.4f, discrepancy %.1e, contraction ok", rep.t_short, rep.discrepancy);
    });

    criterion(12, "diffusion exactness", [] {
        pde::PdeConfig cfg{1,
                           256,
                           20.0,
                           {pde::Constant{1.0}, pde::Constant{1.0}},
                           {0.0, 2.0, 2.0, 0.0},
                           const_coeff(1.0),
                           const_coeff(1.0),
                           const_coeff(1.0),
                           const_coeff(1.0),
                           1.0,
                           {}};
        pde::Simulator sim(cfg);
        const auto& g = sim.grid();
        // boundary tail of exp(-x^2/4) at |x| = 20 is e^{-100} << 1e-14
        std::vector<double> u(g.point_count());
        for (int m = 0; m < g.n; ++m)
            u[m] = std::exp(-g.coord(m) * g.coord(m) / 4.0);
        sim.apply_heat_multiplier(u, 1.0);
        double worst = 0.0;
        for (int m = 0; m < g.n; ++m) {
            const double x = g.coord(m);
            const double expect = std::sqrt(0.5) * std::exp(-x * x / 8.0);
            worst = std::max(worst, std::abs(u[m] - expect));
        }
        if (worst > 1e-10) return fail("worst abs err %.2e > 1e-10", worst);
        return ok("Gaussian evolution worst abs err %.2e", worst);
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
    return failures == 0 ? 0 : 1;
}

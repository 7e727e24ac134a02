#include "heatsys/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace heatsys::verify {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

}  // namespace

double power_product_fuzz_worst(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> operand(0.1, 10.0);
    std::uniform_real_distribution<double> expo(0.0, 4.0);
    struct Tuple {
        double a, b, c, d, p, q;
    };
    std::vector<Tuple> tuples(n);
    for (auto& t : tuples) t = {operand(rng), operand(rng), operand(rng),
                                operand(rng), expo(rng),    expo(rng)};
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
        const auto& t = tuples[i];
        const auto [lhs, rhs] = companion::power_product_identity(t.a, t.b, t.c, t.d, t.p, t.q);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    return worst;
}

std::vector<CheckResult> run_suite(const config::ExperimentConfig& cfg) {
    std::vector<CheckResult> results;

    // One shared simulation feeds the domination and far-field checks.
    pde::SimulationRun run;
    std::string run_error;
    try {
        pde::Simulator sim(cfg.pde_config());
        run = sim.run();
    } catch (const std::exception& e) {
        run_error = e.what();
    }

    {
        CheckResult r{"domination", false, ""};
        if (!run_error.empty()) {
            r.detail = run_error;
        } else {
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& s : run.snapshots)
                for (int i = 0; i < 2; ++i)
                    worst = std::max(worst, s.sup[i] / s.companion_y[i] - 1.0);
            r.pass = worst <= cfg.verify.domination_slack;
            r.detail = fmt("max sup_i/y_i - 1 = %.3e (tol %.1e)", worst,
                           cfg.verify.domination_slack);
        }
        results.push_back(std::move(r));
    }

    {
        CheckResult r{"far-field-tracking", false, ""};
        if (!run_error.empty()) {
            r.detail = run_error;
        } else {
            double worst = 0.0;
            for (const auto& s : run.snapshots)
                for (int i = 0; i < 2; ++i)
                    worst = std::max(worst, std::abs(s.far[i] - s.companion_y[i]));
            r.pass = worst <= cfg.verify.far_field_tol && !run.snapshots.empty();
            r.detail = fmt("max |far_i - y_i| = %.3e (tol %.1e)", worst, cfg.verify.far_field_tol);
        }
        results.push_back(std::move(r));
    }

    {
        CheckResult r{"comparison-harness", false, ""};
        try {
            const auto prob = cfg.companion_problem();
            const auto sup_rep = companion::comparison_check(
                prob, companion::Direction::Super, cfg.verify.comparison_horizon,
                cfg.verify.delta_scale);
            const auto sub_rep = companion::comparison_check(
                prob, companion::Direction::Sub, cfg.verify.comparison_horizon,
                cfg.verify.delta_scale);
            r.pass = sup_rep.pass() && sub_rep.pass();
            r.detail = fmt("worst margins: super %.3e, sub %.3e",
                           sup_rep.worst_hypothesis_margin, sub_rep.worst_hypothesis_margin);
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }

    {
        CheckResult r{"power-product-identity", false, ""};
        const double worst = power_product_fuzz_worst(cfg.seed, cfg.verify.power_product_samples);
        r.pass = worst <= 1e-8;
        r.detail = fmt("worst |lhs-rhs|/(1+|lhs|) = %.3e over seeded tuples (tol 1e-8)", worst);
        results.push_back(std::move(r));
    }

    {
        CheckResult r{"picard-validation", false, ""};
        try {
            pde::Simulator sim(cfg.pde_config());
            const auto rep = sim.picard_validate(cfg.picard.t_short, cfg.picard.iterations);
            r.pass = rep.discrepancy <= cfg.verify.picard_tol && rep.contracted;
            r.detail = fmt("discrepancy %.3e (tol %.1e)", rep.discrepancy, cfg.verify.picard_tol) +
                       fmt(", worst contraction ratio %.3f", rep.worst_ratio);
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }

    return results;
}

}  // namespace heatsys::verify

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "heatsys/bounds.hpp"
#include "heatsys/companion.hpp"

using namespace heatsys;
using companion::CompanionProblem;
using companion::ExponentMatrix;

namespace {

coeffs::TimeCoefficient one() {
    return coeffs::TimeCoefficient(expr::parse_expr("1"), 50.0, 10001,
                                   quadrature::TailDescriptor::power(0.0));
}

coeffs::TimeCoefficient exp_decay() {
    return coeffs::TimeCoefficient(expr::parse_expr("exp(-t)"), 50.0, 10001,
                                   quadrature::TailDescriptor::exponential(-1.0));
}

}  // namespace

TEST_CASE("exponent matrix derived quantities") {
    ExponentMatrix e{0.0, 2.0, 2.0, 0.0};
    CHECK(e.a(1) == doctest::Approx(3.0));
    CHECK(e.a(2) == doctest::Approx(3.0));
    CHECK(e.alpha(2) == doctest::Approx(2.0));  // p22 + p21 a2/a1 = 0 + 2
    ExponentMatrix c{2.0, 1.0, 1.0, 2.0};
    CHECK(c.a(1) == doctest::Approx(0.0));
    CHECK(c.a(2) == doctest::Approx(0.0));
    ExponentMatrix b{0.0, 1.0, 1.0, 2.0};
    CHECK(b.a(1) == doctest::Approx(2.0));
    CHECK(b.a(2) == doctest::Approx(0.0));
}

TEST_CASE("symmetric system reduces to the scalar closed form") {
    CompanionProblem prob{{0.0, 2.0, 2.0, 0.0}, one(), one(), 1.0, 1.0};
    companion::SolveControls controls;
    controls.record_times = {0.25, 0.5};
    auto traj = companion::solve(prob, 0.5, controls);
    REQUIRE(traj.status == companion::RunStatus::Completed);
    // symmetry reduces to y' = y^2, y = 1/(1-t)
    CHECK(traj.value_at(0.5, 1) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(traj.value_at(0.5, 2) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(traj.value_at(0.25, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    for (const auto& s : traj.samples)
        CHECK(std::abs(s.y1 - s.y2) <= 1e-9 * s.y1);
}

TEST_CASE("decoupled linear system") {
    CompanionProblem prob{{1.0, 0.0, 0.0, 1.0}, one(), one(), 3.0, 5.0};
    companion::SolveControls controls;
    controls.record_times = {1.0};
    auto traj = companion::solve(prob, 1.0, controls);
    CHECK(traj.value_at(1.0, 1) == doctest::Approx(3.0 * std::exp(1.0)).epsilon(1e-9));
    CHECK(traj.value_at(1.0, 2) == doctest::Approx(5.0 * std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("monotone growth along trajectories") {
    CompanionProblem prob{{0.5, 1.0, 0.3, 1.2}, exp_decay(), one(), 0.7, 1.3};
    auto traj = companion::solve(prob, 2.0, {});
    REQUIRE(traj.samples.size() > 4);
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        CHECK(traj.samples[k].t > traj.samples[k - 1].t);
        CHECK(traj.samples[k].y1 >= traj.samples[k - 1].y1 * (1.0 - 1e-12));
        CHECK(traj.samples[k].y2 >= traj.samples[k - 1].y2 * (1.0 - 1e-12));
    }
}

TEST_CASE("blow-up detection with bracket: decoupled decaying-h system") {
    CompanionProblem prob{{2.0, 0.0, 0.0, 2.0}, exp_decay(), exp_decay(), 2.0, 2.0};
    auto traj = companion::solve(prob, 10.0, {});
    REQUIRE(traj.status == companion::RunStatus::BlowUp);
    const double tau = std::log(2.0);
    CHECK(traj.bracket_lo <= tau);
    CHECK(traj.bracket_hi >= tau);
    CHECK(traj.bracket_hi - traj.bracket_lo <= 1e-6);
    // recorded trajectory ends at or just past the threshold
    CHECK(std::max(traj.samples.back().y1, traj.samples.back().y2) > 1e12 * (1.0 - 1e-3));
}

TEST_CASE("blow-up bracket: symmetric quadratic coupling, exact tau = 1") {
    CompanionProblem prob{{0.0, 2.0, 2.0, 0.0}, one(), one(), 1.0, 1.0};
    auto res = companion::blow_up_bracket(prob);
    REQUIRE(res.kind == companion::BracketResult::Kind::Bracket);
    CHECK(res.t_lo <= 1.0);
    CHECK(res.t_hi >= 1.0);
    CHECK(res.t_hi - res.t_lo <= 1e-6);
}

TEST_CASE("blow-up bracket: case-c system, exact tau = 1/2") {
    CompanionProblem prob{{2.0, 1.0, 1.0, 2.0}, one(), one(), 1.0, 1.0};
    auto res = companion::blow_up_bracket(prob);
    REQUIRE(res.kind == companion::BracketResult::Kind::Bracket);
    CHECK(res.t_lo <= 0.5);
    CHECK(res.t_hi >= 0.5);
    CHECK(res.t_hi - res.t_lo <= 1e-6);
}

TEST_CASE("linear system: global via the bounds certificate") {
    CompanionProblem prob{{1.0, 0.0, 0.0, 1.0}, one(), one(), 1.0, 1.0};
    auto res = bounds::bracket_or_global(prob);
    CHECK(res.kind == companion::BracketResult::Kind::Global);
}

TEST_CASE("step-halving convergence") {
    CompanionProblem prob{{0.0, 2.0, 2.0, 0.0}, one(), one(), 1.0, 1.0};
    companion::SolveControls coarse, fine;
    coarse.rel_tol = 1e-8;
    fine.rel_tol = 5e-9;
    coarse.record_times = fine.record_times = {0.9};
    const double yc = companion::solve(prob, 0.9, coarse).value_at(0.9, 1);
    const double yf = companion::solve(prob, 0.9, fine).value_at(0.9, 1);
    CHECK(std::abs(yc - yf) / yf < 1e-8);
}

TEST_CASE("power product identity") {
    {
        auto [lhs, rhs] = companion::power_product_identity(2, 3, 2, 3, 1.5, 0.7);
        CHECK(lhs == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rhs == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        auto [lhs, rhs] = companion::power_product_identity(1, 1, 1, 1, 2.3, 0.4);
        CHECK(lhs == 0.0);
        CHECK(rhs == doctest::Approx(0.0));
    }
    {
        auto [lhs, rhs] = companion::power_product_identity(3, 2, 1, 1, 2, 1);
        CHECK(lhs == doctest::Approx(17.0));
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
    // integrable endpoint singularity: c = 0 with p = 1/2
    {
        auto [lhs, rhs] = companion::power_product_identity(1, 1, 0, 1, 0.5, 1.0);
        CHECK(lhs == doctest::Approx(1.0));
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> op(0.1, 10.0);
    std::uniform_real_distribution<double> ex(0.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double a = op(rng), b = op(rng), c = op(rng), d = op(rng);
        const double p = ex(rng), q = ex(rng);
        auto [lhs, rhs] = companion::power_product_identity(a, b, c, d, p, q);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("comparison harness") {
    CompanionProblem sym{{0.0, 2.0, 2.0, 0.0}, one(), one(), 1.0, 1.0};
    auto rep = companion::comparison_check(sym, companion::Direction::Super, 0.5);
    CHECK(rep.pass());

    CompanionProblem lin{{1.0, 0.0, 0.0, 1.0}, one(), one(), 3.0, 5.0};
    auto rep2 = companion::comparison_check(lin, companion::Direction::Sub, 2.0);
    CHECK(rep2.pass());

    // delta == 0 collapses z to y; both directions hold with equality
    auto eq1 = companion::comparison_check(sym, companion::Direction::Super, 0.5, 0.0);
    auto eq2 = companion::comparison_check(sym, companion::Direction::Sub, 0.5, 0.0);
    CHECK(eq1.pass());
    CHECK(eq2.pass());
}

TEST_CASE("csv export") {
    CompanionProblem prob{{1.0, 0.0, 0.0, 1.0}, one(), one(), 1.0, 1.0};
    companion::SolveControls controls;
    controls.record_times = {0.5};
    auto traj = companion::solve(prob, 0.5, controls);
    std::ostringstream ss;
    companion::write_csv(traj, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("t,y1,y2\n", 0) == 0);
    CHECK(text.find("0.5,") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "heatsys/quadrature.hpp"

using namespace heatsys;
using quadrature::TailDescriptor;

TEST_CASE("definite integrals against antiderivatives") {
    auto expm = [](double t) { return std::exp(-t); };
    CHECK(quadrature::integrate(expm, 0, 1) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(quadrature::integrate([](double) { return 1.0; }, 2, 5) ==
          doctest::Approx(3.0).epsilon(1e-14));
    CHECK(quadrature::integrate([](double t) { return 1.0 / (1.0 + t * t); }, 0, 1) ==
          doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    CHECK(quadrature::integrate([](double t) { return std::sin(t); }, 0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("needle integrand forces subdivision") {
    auto needle = [](double t) {
        const double d = t - 0.7071;
        return std::exp(-d * d * 1e4);
    };
    const double expect = std::sqrt(M_PI) * 1e-2;  // full Gaussian mass, tails negligible
    CHECK(quadrature::integrate(needle, 0, 10) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("additivity within tolerance") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pts(0.0, 8.0);
    auto f = [](double t) { return std::exp(-0.3 * t) * (2.0 + std::sin(3.0 * t)); };
    quadrature::Options opt;
    opt.rel_tol = 1e-10;
    for (int k = 0; k < 40; ++k) {
        double a = pts(rng), b = pts(rng), c = pts(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const double whole = quadrature::integrate(f, a, c, opt);
        const double split =
            quadrature::integrate(f, a, b, opt) + quadrature::integrate(f, b, c, opt);
        CHECK(std::abs(whole - split) <= 3.0 * opt.rel_tol * std::abs(whole) + 1e-15);
    }
}

TEST_CASE("non-finite integrand is rejected") {
    CHECK_THROWS_AS(quadrature::integrate([](double t) { return 1.0 / (t - 0.5); }, 0.4999999,
                                          0.5000001),
                    quadrature::QuadratureError);
    CHECK_THROWS_AS(quadrature::integrate([](double t) { return std::log(-1.0 - t); }, 0, 1),
                    quadrature::QuadratureError);
}

TEST_CASE("improper integrals with declared tails") {
    auto expm = [](double t) { return std::exp(-t); };
    auto r = quadrature::improper_integral(expm, 0, TailDescriptor::exponential(-1.0));
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

    auto one = [](double) { return 1.0; };
    auto rdiv = quadrature::improper_integral(one, 0, TailDescriptor::power(0.0));
    CHECK(rdiv.is_divergent());
    CHECK(std::isinf(rdiv.extended()));

    auto pt = [](double t) { return 1.0 / ((1.0 + t) * (1.0 + t)); };
    auto rp = quadrature::improper_integral(pt, 0, TailDescriptor::power(-2.0));
    REQUIRE(rp.finite());
    CHECK(rp.value == doctest::Approx(1.0).epsilon(1e-9));

    // power tail barely below -1 still converges (slowly, honestly reported)
    auto slow = [](double t) { return std::pow(1.0 + t, -1.5); };
    auto rs = quadrature::improper_integral(slow, 0, TailDescriptor::power(-1.5));
    REQUIRE(rs.finite());
    CHECK(rs.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("unknown tails: conclusive evidence vs undetermined") {
    auto expm = [](double t) { return std::exp(-t); };
    auto r = quadrature::improper_integral(expm, 0, TailDescriptor::unknown());
    REQUIRE(r.finite());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

    // 1/(1+t) diverges, but an unknown tail can only report a lower bound.
    auto h = [](double t) { return 1.0 / (1.0 + t); };
    auto ru = quadrature::improper_integral(h, 0, TailDescriptor::unknown());
    CHECK(ru.status == quadrature::ImproperResult::Status::Undetermined);
    CHECK(ru.value > 10.0);  // integrated well past the knee before giving up
}

TEST_CASE("declared tail contradicting samples is flagged") {
    auto grow = [](double t) { return 1.0 + t * t; };
    CHECK_THROWS_AS(
        quadrature::improper_integral(grow, 0, TailDescriptor::exponential(-2.0)),
        quadrature::QuadratureError);
}

TEST_CASE("tail descriptor algebra") {
    auto p = TailDescriptor::power(-2.0);
    auto e = TailDescriptor::exponential(-1.0);
    CHECK((p * p).exponent == doctest::Approx(-4.0));
    CHECK(p.pow(0.5).exponent == doctest::Approx(-1.0));
    CHECK((e / p).rate == doctest::Approx(-1.0));
    CHECK((e / p).exponent == doctest::Approx(2.0));
    CHECK((p * TailDescriptor::unknown()).is_unknown());
    CHECK(TailDescriptor::power(-1.0).divergent());
    CHECK(!TailDescriptor::power(-1.0001).divergent());
    CHECK(TailDescriptor::exponential(0.5).divergent());
}

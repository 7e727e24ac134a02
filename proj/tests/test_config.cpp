#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "heatsys/config.hpp"

using namespace heatsys;

TEST_CASE("default config parses and builds both problem kinds") {
    auto cfg = config::parse(config::default_config_json());
    CHECK(cfg.exponents.p12 == 2.0);
    CHECK(cfg.y1_0 == 1.0);  // from the bump profile far value
    auto prob = cfg.companion_problem();
    CHECK(prob.y0(2) == 1.0);
    auto pc = cfg.pde_config();
    CHECK(pc.n == 512);
    CHECK(pc.half_length <= 0.0);  // auto
    CHECK(!cfg.resolved_json.empty());
}

TEST_CASE("multiple validation failures are reported together with paths") {
    const char* bad = R"json({
      "exponents": [[0, -2], [2, 0]],
      "h1": {"expr": "1"},
      "y0": [0.0, 1.0],
      "pde": {"n": 100, "t_end": -1}
    })json";
    try {
        config::parse(bad);
        FAIL("expected ValidationError");
    } catch (const config::ValidationError& e) {
        REQUIRE(e.problems.size() >= 4);
        auto has = [&](const char* needle) {
            for (const auto& p : e.problems)
                if (p.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(has("exponents"));
        CHECK(has("y0"));
        CHECK(has("pde.n"));
        CHECK(has("pde.t_end"));
    }
}

TEST_CASE("expression parse errors surface with the coefficient path") {
    const char* bad = R"json({"exponents": [[0, 2], [2, 0]], "h1": {"expr": "2*"}})json";
    try {
        config::parse(bad);
        FAIL("expected ValidationError");
    } catch (const config::ValidationError& e) {
        REQUIRE(!e.problems.empty());
        CHECK(e.problems[0].find("h1") != std::string::npos);
        CHECK(e.problems[0].find("byte") != std::string::npos);
    }
}

TEST_CASE("tail descriptors and overrides") {
    const char* text = R"json({
      "exponents": [[0, 2], [2, 0]],
      "h1": {"expr": "exp(-t)", "tail": {"kind": "exponential", "rate": -1}},
      "h2": {"expr": "1/(1+t)^2", "tail": {"kind": "power", "exponent": -2}},
      "case_override": "a",
      "seed": 7
    })json";
    auto cfg = config::parse(text);
    CHECK(cfg.h1.tail().rate == doctest::Approx(-1.0));
    CHECK(cfg.h2.tail().exponent == doctest::Approx(-2.0));
    REQUIRE(cfg.case_override.has_value());
    CHECK(*cfg.case_override == bounds::Case::A);
    CHECK(cfg.seed == 7);

    CHECK_THROWS_AS(config::parse(R"json({"exponents": [[0,2],[2,0]], "case_override": "z"})json"),
                    config::ValidationError);
}

TEST_CASE("positivity screening runs at parse time") {
    const char* bad = R"json({"exponents": [[0, 2], [2, 0]], "h1": {"expr": "t-1", "t_max": 2}})json";
    CHECK_THROWS_AS(config::parse(bad), config::ValidationError);
}

TEST_CASE("profiles determine the companion initial data") {
    const char* text = R"json({
      "exponents": [[0, 2], [2, 0]],
      "y0": [9.0, 9.0],
      "pde": {"profiles": [{"type": "constant", "M": 2.5},
                           {"type": "bump", "M": 1.5, "A": 0.5, "sigma": 1.0}]}
    })json";
    auto cfg = config::parse(text);
    CHECK(cfg.y1_0 == 2.5);  // profile far values override the bare y0
    CHECK(cfg.y2_0 == 1.5);
}

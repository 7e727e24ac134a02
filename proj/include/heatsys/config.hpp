#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatsys/bounds.hpp"
#include "heatsys/pde.hpp"

namespace heatsys::config {

/// All validation problems of a config file, reported together.
struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<std::string> problems_);
    std::vector<std::string> problems;
};

struct OdeSettings {
    double t_end = 2.0;
    double horizon = 1e4;      // blow-up bracketing horizon
    double rel_tol = 1e-10;
    double escape_threshold = 1e12;
};

struct PicardSettings {
    double t_short = 0.0;  // <= 0: automatic contraction horizon
    int iterations = 12;
};

struct VerifySettings {
    double comparison_horizon = 0.5;
    double delta_scale = 0.01;
    int power_product_samples = 1000;
    double domination_slack = 1e-6;
    double far_field_tol = 1e-3;
    double picard_tol = 1e-5;
};

/// A fully parsed and validated experiment description.
struct ExperimentConfig {
    companion::ExponentMatrix exponents;
    coeffs::TimeCoefficient h1, h2, k1, k2;
    double y1_0 = 1.0, y2_0 = 1.0;
    std::array<pde::InitialProfile, 2> profiles;
    std::optional<bounds::Case> case_override;

    OdeSettings ode;
    PicardSettings picard;
    VerifySettings verify;

    int pde_dim = 1;
    int pde_n = 256;
    double pde_half_length = 0.0;  // <= 0: auto
    double pde_t_end = 1.0;
    std::vector<double> snapshot_times;
    double blow_up_threshold = 1e8;
    double dt_cap = 5e-3;
    double growth_cap = 0.1;
    long pde_max_steps = 500'000;
    bool parallel = true;

    std::uint64_t seed = 424242;
    int workers = 0;  // 0: library default

    std::string resolved_json;  // canonical form embedded in every report

    companion::CompanionProblem companion_problem() const;
    pde::PdeConfig pde_config() const;
};

/// Parse a JSON config document. Throws ValidationError listing every
/// problem with its field path.
ExperimentConfig parse(const std::string& json_text);
ExperimentConfig parse_file(const std::string& path);

/// Built-in default experiment (symmetric system, bump data) used when no
/// config file is given.
std::string default_config_json();

}  // namespace heatsys::config

#include "heatsys/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace heatsys::config {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
        out += s;
        out += '\n';
    }
    return out;
}

quadrature::TailDescriptor parse_tail(const json& j, const std::string& path,
                                      std::vector<std::string>& problems) {
    if (!j.is_object()) {
        problems.push_back(path + ": tail must be an object");
        return {};
    }
    const std::string kind = j.value("kind", "unknown");
    if (kind == "power") {
        if (!j.contains("exponent")) {
            problems.push_back(path + ": power tail needs an exponent");
            return {};
        }
        return quadrature::TailDescriptor::power(j["exponent"].get<double>());
    }
    if (kind == "exponential") {
        if (!j.contains("rate")) {
            problems.push_back(path + ": exponential tail needs a rate");
            return {};
        }
        return quadrature::TailDescriptor::exponential(j["rate"].get<double>(),
                                                       j.value("exponent", 0.0));
    }
    if (kind != "unknown") problems.push_back(path + ": unknown tail kind '" + kind + "'");
    return quadrature::TailDescriptor::unknown();
}

std::optional<coeffs::TimeCoefficient> parse_coeff(const json& root, const char* key,
                                                   const char* fallback_expr, double t_max,
                                                   std::vector<std::string>& problems) {
    std::string expr_text = fallback_expr;
    quadrature::TailDescriptor tail = quadrature::TailDescriptor::unknown();
    double horizon = t_max;
    if (root.contains(key)) {
        const json& j = root[key];
        if (j.is_string()) {
            expr_text = j.get<std::string>();
        } else if (j.is_object()) {
            if (!j.contains("expr")) {
                problems.push_back(std::string(key) + ": missing 'expr'");
                return std::nullopt;
            }
            expr_text = j["expr"].get<std::string>();
            if (j.contains("tail")) tail = parse_tail(j["tail"], std::string(key) + ".tail", problems);
            horizon = j.value("t_max", t_max);
        } else {
            problems.push_back(std::string(key) + ": must be a string or object");
            return std::nullopt;
        }
    } else if (std::string(fallback_expr) == "1") {
        // A literal constant 1 has a known (divergent) power tail.
        tail = quadrature::TailDescriptor::power(0.0);
    }
    try {
        return coeffs::TimeCoefficient::parse(expr_text, horizon, tail);
    } catch (const expr::ParseError& e) {
        problems.push_back(std::string(key) + ": parse error at byte " +
                           std::to_string(e.offset) + ": " + e.what());
    } catch (const std::exception& e) {
        problems.push_back(std::string(key) + ": " + e.what());
    }
    return std::nullopt;
}

pde::InitialProfile parse_profile(const json& j, const std::string& path,
                                  std::vector<std::string>& problems) {
    if (!j.is_object() || !j.contains("type")) {
        problems.push_back(path + ": profile must be an object with a 'type'");
        return pde::Constant{1.0};
    }
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "constant") return pde::Constant{j.at("M").get<double>()};
        if (type == "bump")
            return pde::ConstantMinusBump{j.at("M").get<double>(), j.at("A").get<double>(),
                                          j.at("sigma").get<double>()};
        if (type == "radial")
            return pde::RadialTable{j.at("radii").get<std::vector<double>>(),
                                    j.at("values").get<std::vector<double>>(),
                                    j.at("M").get<double>()};
        problems.push_back(path + ": unknown profile type '" + type + "'");
    } catch (const std::exception& e) {
        problems.push_back(path + ": " + e.what());
    }
    return pde::Constant{1.0};
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems_)
    : std::runtime_error(join(problems_)), problems(std::move(problems_)) {}

companion::CompanionProblem ExperimentConfig::companion_problem() const {
    return {exponents, h1, h2, y1_0, y2_0};
}

pde::PdeConfig ExperimentConfig::pde_config() const {
    return {pde_dim,
            pde_n,
            pde_half_length,
            profiles,
            exponents,
            h1,
            h2,
            k1,
            k2,
            pde_t_end,
            snapshot_times,
            blow_up_threshold,
            1e300,
            growth_cap,
            dt_cap,
            pde_max_steps,
            parallel};
}

ExperimentConfig parse(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError({std::string("config: invalid JSON: ") + e.what()});
    }

    std::vector<std::string> problems;
    const double t_max = root.value("t_max", 50.0);

    companion::ExponentMatrix e;
    if (root.contains("exponents")) {
        const json& je = root["exponents"];
        if (je.is_array() && je.size() == 2 && je[0].is_array() && je[0].size() == 2 &&
            je[1].is_array() && je[1].size() == 2) {
            e.p11 = je[0][0].get<double>();
            e.p12 = je[0][1].get<double>();
            e.p21 = je[1][0].get<double>();
            e.p22 = je[1][1].get<double>();
            if (!e.valid()) problems.push_back("exponents: all p_ij must be >= 0");
        } else {
            problems.push_back("exponents: expected a 2x2 array [[p11,p12],[p21,p22]]");
        }
    } else {
        problems.push_back("exponents: required");
    }

    auto h1 = parse_coeff(root, "h1", "1", t_max, problems);
    auto h2 = parse_coeff(root, "h2", "1", t_max, problems);
    auto k1 = parse_coeff(root, "k1", "1", t_max, problems);
    auto k2 = parse_coeff(root, "k2", "1", t_max, problems);
    if (!h1 || !h2 || !k1 || !k2) throw ValidationError(std::move(problems));

    ExperimentConfig cfg{.exponents = e,
                         .h1 = std::move(*h1),
                         .h2 = std::move(*h2),
                         .k1 = std::move(*k1),
                         .k2 = std::move(*k2)};

    if (root.contains("y0")) {
        const json& jy = root["y0"];
        if (jy.is_array() && jy.size() == 2) {
            cfg.y1_0 = jy[0].get<double>();
            cfg.y2_0 = jy[1].get<double>();
            if (!(cfg.y1_0 > 0 && cfg.y2_0 > 0))
                problems.push_back("y0: initial values must be positive");
        } else {
            problems.push_back("y0: expected [y1, y2]");
        }
    }

    if (root.contains("case_override")) {
        const std::string c = root["case_override"].get<std::string>();
        if (c == "a") cfg.case_override = bounds::Case::A;
        else if (c == "b") cfg.case_override = bounds::Case::B;
        else if (c == "c") cfg.case_override = bounds::Case::C;
        else problems.push_back("case_override: expected one of a, b, c");
    }

    if (root.contains("ode")) {
        const json& jo = root["ode"];
        cfg.ode.t_end = jo.value("t_end", cfg.ode.t_end);
        cfg.ode.horizon = jo.value("horizon", cfg.ode.horizon);
        cfg.ode.rel_tol = jo.value("rel_tol", cfg.ode.rel_tol);
        cfg.ode.escape_threshold = jo.value("escape_threshold", cfg.ode.escape_threshold);
        if (!(cfg.ode.t_end > 0)) problems.push_back("ode.t_end: must be positive");
    }

    cfg.profiles = {pde::Constant{cfg.y1_0}, pde::Constant{cfg.y2_0}};
    if (root.contains("pde")) {
        const json& jp = root["pde"];
        cfg.pde_dim = jp.value("dim", 1);
        cfg.pde_n = jp.value("n", 256);
        if (jp.contains("L")) {
            if (jp["L"].is_string()) {
                if (jp["L"].get<std::string>() != "auto")
                    problems.push_back("pde.L: expected a number or \"auto\"");
            } else {
                cfg.pde_half_length = jp["L"].get<double>();
                if (!(cfg.pde_half_length > 0)) problems.push_back("pde.L: must be positive");
            }
        }
        cfg.pde_t_end = jp.value("t_end", 1.0);
        if (jp.contains("snapshot_times"))
            cfg.snapshot_times = jp["snapshot_times"].get<std::vector<double>>();
        cfg.blow_up_threshold = jp.value("blow_up_threshold", 1e8);
        cfg.dt_cap = jp.value("dt_cap", 5e-3);
        cfg.growth_cap = jp.value("growth_cap", 0.1);
        cfg.pde_max_steps = jp.value("max_steps", 500'000L);
        cfg.parallel = jp.value("parallel", true);
        if (jp.contains("profiles")) {
            const json& jpr = jp["profiles"];
            if (jpr.is_array() && jpr.size() == 2) {
                cfg.profiles[0] = parse_profile(jpr[0], "pde.profiles[0]", problems);
                cfg.profiles[1] = parse_profile(jpr[1], "pde.profiles[1]", problems);
                // The companion data is the uniform norm of the profile.
                cfg.y1_0 = pde::profile_far_value(cfg.profiles[0]);
                cfg.y2_0 = pde::profile_far_value(cfg.profiles[1]);
            } else {
                problems.push_back("pde.profiles: expected exactly two profiles");
            }
        }
        if (cfg.pde_dim != 1 && cfg.pde_dim != 2) problems.push_back("pde.dim: must be 1 or 2");
        if (cfg.pde_n < 16 || (cfg.pde_n & (cfg.pde_n - 1)) != 0)
            problems.push_back("pde.n: must be a power of two, >= 16");
        if (!(cfg.pde_t_end > 0)) problems.push_back("pde.t_end: must be positive");
        for (double s : cfg.snapshot_times)
            if (s < 0 || s > cfg.pde_t_end)
                problems.push_back("pde.snapshot_times: must lie in [0, t_end]");
    }

    if (root.contains("picard")) {
        const json& jp = root["picard"];
        cfg.picard.t_short = jp.value("t_short", 0.0);
        cfg.picard.iterations = jp.value("iterations", 12);
        if (cfg.picard.iterations < 0) problems.push_back("picard.iterations: must be >= 0");
    }

    if (root.contains("verify")) {
        const json& jv = root["verify"];
        cfg.verify.comparison_horizon = jv.value("comparison_horizon", 0.5);
        cfg.verify.delta_scale = jv.value("delta_scale", 0.01);
        cfg.verify.power_product_samples = jv.value("power_product_samples", 1000);
        cfg.verify.domination_slack = jv.value("domination_slack", 1e-6);
        cfg.verify.far_field_tol = jv.value("far_field_tol", 1e-3);
        cfg.verify.picard_tol = jv.value("picard_tol", 1e-5);
    }

    cfg.seed = root.value("seed", std::uint64_t{424242});
    cfg.workers = root.value("workers", 0);

    if (!problems.empty()) throw ValidationError(std::move(problems));

    cfg.resolved_json = root.dump(2);
    return cfg;
}

ExperimentConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"config: cannot open " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string default_config_json() {
    return R"json({
  "exponents": [[0, 2], [2, 0]],
  "h1": {"expr": "1", "tail": {"kind": "power", "exponent": 0}},
  "h2": {"expr": "1", "tail": {"kind": "power", "exponent": 0}},
  "k1": {"expr": "1", "tail": {"kind": "power", "exponent": 0}},
  "k2": {"expr": "1", "tail": {"kind": "power", "exponent": 0}},
  "y0": [1.0, 1.0],
  "ode": {"t_end": 0.5, "horizon": 100.0},
  "pde": {
    "dim": 1,
    "n": 512,
    "L": "auto",
    "t_end": 0.8,
    "snapshot_times": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
    "profiles": [
      {"type": "bump", "M": 1.0, "A": 0.5, "sigma": 1.0},
      {"type": "bump", "M": 1.0, "A": 0.5, "sigma": 1.0}
    ]
  },
  "picard": {"t_short": 0.0, "iterations": 12},
  "verify": {"comparison_horizon": 0.5},
  "seed": 424242
})json";
}

}  // namespace heatsys::config

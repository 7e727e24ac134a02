#pragma once

#include <string>
#include <vector>

#include "heatsys/config.hpp"

namespace heatsys::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The named invariant checks: domination, far-field tracking, the
/// comparison harness (both directions), the power-product identity fuzz
/// and the Picard validation. Deterministic for a fixed config and seed.
std::vector<CheckResult> run_suite(const config::ExperimentConfig& cfg);

/// Power-product identity fuzz on its own (used by the acceptance suite):
/// n seeded tuples with p, q in [0, 4], operands in [0.1, 10]; returns the
/// largest |lhs - rhs| / (1 + |lhs|) observed.
double power_product_fuzz_worst(std::uint64_t seed, int n);

}  // namespace heatsys::verify

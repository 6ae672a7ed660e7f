#pragma once

#include "simbeam/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace simbeam {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runtime self-check of the library invariants on one small drop:
/// cascade factorization, gradient vs. central differences, unit modulus,
/// power feasibility, monotone ascent and determinism.
std::vector<CheckResult> run_invariant_suite(const ScenarioConfig& scenario, std::uint64_t seed);

/// N=9, L=2, K=N_t=2 with the default deployment.
ScenarioConfig tiny_scenario();

} // namespace simbeam

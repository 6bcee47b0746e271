#pragma once

#include <string>
#include <vector>

namespace tdinv::harness {

struct SelfTestCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct SelfTestReport {
    std::vector<SelfTestCheck> checks;
    bool all_passed() const;
};

struct SelfTestOptions {
    int n_x = 50;  ///< size of the dot-product and Taylor instances
    int n_t = 50;
    int draws = 20;
};

/// Dense-oracle agreement at n_x = 8, N = 6, m = 2; adjoint dot-product tests
/// for the full and slab derivatives of both formulations; Taylor orders;
/// cross-formulation consistency on synthesized data.
SelfTestReport run_selftest(const SelfTestOptions& options = {});

}  // namespace tdinv::harness

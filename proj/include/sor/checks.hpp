// Self-contained invariant checks run by `sorctl check`.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sor {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every check with random instances drawn from `seed`.
std::vector<CheckResult> run_checks(std::uint64_t seed = 1);

} // namespace sor

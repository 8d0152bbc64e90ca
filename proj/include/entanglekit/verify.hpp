#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace entanglekit {

struct VerifyCheck {
    std::string name;
    bool informational = false;   // reported finding, never counted as failure
    bool passed = true;
    double measured = 0.0;        // primary scalar for the check
    double tolerance = 0.0;
    std::string details;
};

struct VerifyOptions {
    std::uint64_t seed = 12345;
    /// Test hook for the harness itself: scales every Schmidt eigenvalue by
    /// 0.99 before the normalization check, which must then fail.
    bool fault_scale_lambdas = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
    const VerifyCheck* find(const std::string& name) const;
};

/// Runs the full cross-validation suite: grid oracle against closed forms,
/// boost invariance, spectra route equality, projection idempotency,
/// zero-entropy root algebra, timescale limits, the sweep identity, and the
/// informational reference-formula comparisons.
VerifyReport run_verification(const VerifyOptions& opt = {});

} // namespace entanglekit

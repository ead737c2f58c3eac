#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fatpoint/dimension.hpp"
#include "fatpoint/oracle.hpp"

namespace fatpoint {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // first failing instance, or a summary
    double wall_ms = 0.0;
};

struct SelfcheckOptions {
    bool quick = false;
    /// Test hook: swaps the third case of the image-intersection cross-check
    /// table for the (wrong) sign variant, to prove the check has teeth.
    bool inject_claim2_defect = false;
    std::uint64_t seed = kDefaultSeed;
};

/// Closed-form value of the kernel sum, case by case. The hypotheses are the
/// signs of the two kernel dimensions; the returned expression is independent
/// of the kernel_sum implementation.
std::int64_t kernel_sum_case_table(std::int64_t d, std::int64_t k, std::int64_t m,
                                   std::int64_t n1, std::int64_t n2);

/// Closed-form value of the image intersection, case by case. With
/// proof_text_case3 the third case uses the sign-flipped variant; the correct
/// table subtracts n1*k(k+1)/2.
std::int64_t image_intersection_case_table(std::int64_t d, std::int64_t k, std::int64_t m,
                                           std::int64_t n1, std::int64_t n2,
                                           bool proof_text_case3 = false);

// Acceptance criteria. Each runner pins its grid, tolerance (exact integer
// equality throughout) and, where stated, its wall-clock budget.
CheckResult check_base_family_n4(const SelfcheckOptions& opt);   // 1
CheckResult check_base_family_n9(const SelfcheckOptions& opt);   // 2
CheckResult check_evain_16(const SelfcheckOptions& opt);         // 3
CheckResult check_mixed_36(const SelfcheckOptions& opt);         // 4
CheckResult check_special_controls(const SelfcheckOptions& opt); // 5
CheckResult check_theorem2_consistency(const SelfcheckOptions& opt);  // 6
CheckResult check_claim_cross(const SelfcheckOptions& opt);      // 7
CheckResult check_k_selection(const SelfcheckOptions& opt);      // 8

/// The eight acceptance criteria, in order.
std::vector<CheckResult> run_acceptance(const SelfcheckOptions& opt);

// Additional module invariant grids used by the selftest command.
CheckResult check_dim_relations(const SelfcheckOptions& opt);
CheckResult check_semicontinuity(const SelfcheckOptions& opt);
CheckResult check_oracle_bounds(const SelfcheckOptions& opt);
CheckResult check_certifier_roundtrip(const SelfcheckOptions& opt);

/// Acceptance criteria plus the module grids.
std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt);

}  // namespace fatpoint

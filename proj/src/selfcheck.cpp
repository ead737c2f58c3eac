#include "fatpoint/selfcheck.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "fatpoint/certifier.hpp"
#include "fatpoint/store.hpp"

namespace fatpoint {

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, double budget_ms,
                  const std::function<std::string()>& body) {
    CheckResult result;
    result.name = name;
    const auto start = Clock::now();
    std::string failure = body();
    result.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (failure.empty() && budget_ms > 0 && result.wall_ms > budget_ms) {
        std::ostringstream msg;
        msg << "over budget: " << result.wall_ms << " ms > " << budget_ms << " ms";
        failure = msg.str();
    }
    result.pass = failure.empty();
    result.detail = failure;
    return result;
}

std::int64_t full_space(std::int64_t d) { return d * (d + 3) / 2 + 1; }

std::string spec_tuple(std::int64_t d, std::int64_t k, std::int64_t m, std::int64_t n1,
                       std::int64_t n2) {
    std::ostringstream out;
    out << "(d=" << d << ", k=" << k << ", m=" << m << ", n1=" << n1 << ", n2=" << n2 << ")";
    return out.str();
}

}  // namespace

std::int64_t kernel_sum_case_table(std::int64_t d, std::int64_t k, std::int64_t m,
                                   std::int64_t n1, std::int64_t n2) {
    const bool ker_y_pos = expected_vec_dim({d, k + 1, n1}).value > 0;
    const bool ker_p_pos = expected_vec_dim({k - 1, m, n2}).value > 0;
    const std::int64_t cond2 = conditions_count(m, n2);
    if (ker_y_pos && ker_p_pos) return full_space(d) - n1 * cond2 - n1 * (k + 1);
    if (ker_y_pos) return full_space(d) - n1 * ((k + 1) * (k + 2) / 2);
    if (ker_p_pos) return n1 * ((k - 1) * (k + 2) / 2 + 1 - cond2);
    return 0;
}

std::int64_t image_intersection_case_table(std::int64_t d, std::int64_t k, std::int64_t m,
                                           std::int64_t n1, std::int64_t n2,
                                           bool proof_text_case3) {
    const bool ker_y_pos = expected_vec_dim({d, k + 1, n1}).value > 0;
    const bool ker_p_pos = expected_vec_dim({k - 1, m, n2}).value > 0;
    const bool im_p_pos = expected_vec_dim({k, m, n2}).value > 0;
    const bool res_y_pos = expected_vec_dim({d, k, n1}).value > 0;
    const std::int64_t cond2 = conditions_count(m, n2);
    const std::int64_t total = full_space(d) - n1 * cond2;

    if (ker_y_pos && ker_p_pos) return n1 * (k + 1);
    if (ker_y_pos && im_p_pos && !ker_p_pos) {
        return n1 * (k * (k + 3) / 2 + 1 - cond2);
    }
    if (res_y_pos && !ker_y_pos && ker_p_pos) {
        return proof_text_case3 ? full_space(d) + n1 * (k * (k + 1) / 2)
                                : full_space(d) - n1 * (k * (k + 1) / 2);
    }
    if (!ker_y_pos && !ker_p_pos && total >= 0) return total;
    return 0;
}

CheckResult check_base_family_n4(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 8 : 15;
    return timed("1-base-family-n4", 10000.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t m = 1; m <= 4; ++m) {
                const SystemSpec spec{d, m, 4};
                const auto result = oracle_dim(spec, OracleConfig{kDefaultPrime, 3, opt.seed});
                if (!result.certified_nonspecial ||
                    result.vec_dim != expected_vec_dim(spec)) {
                    return to_string(spec) + ": oracle vec dim " +
                           std::to_string(result.vec_dim.value) + " != expected " +
                           std::to_string(expected_vec_dim(spec).value);
                }
            }
        }
        return {};
    });
}

CheckResult check_base_family_n9(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 8 : 15;
    return timed("2-base-family-n9", 10000.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t m = 1; m <= 3; ++m) {
                const SystemSpec spec{d, m, 9};
                const auto result = oracle_dim(spec, OracleConfig{kDefaultPrime, 3, opt.seed});
                if (!result.certified_nonspecial ||
                    result.vec_dim != expected_vec_dim(spec)) {
                    return to_string(spec) + ": oracle vec dim " +
                           std::to_string(result.vec_dim.value) + " != expected " +
                           std::to_string(expected_vec_dim(spec).value);
                }
            }
        }
        return {};
    });
}

CheckResult check_evain_16(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 8 : 20;
    return timed("3-evain-4pow2", 60000.0, [&]() -> std::string {
        ResultStore store;
        CertPolicy policy;
        policy.oracle.seed = opt.seed;
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t m = 1; m <= 3; ++m) {
                const SystemSpec spec{d, m, 16};
                const auto result = certify(spec, policy, &store);
                if (!result.ok()) return to_string(spec) + ": " + result.error;
                if (!std::holds_alternative<DegenerationStep>(result.certificate->method)) {
                    return to_string(spec) + ": root method is " +
                           method_name(*result.certificate) + ", wanted degeneration";
                }
                const auto verified = verify_certificate(*result.certificate);
                if (!verified) return to_string(spec) + ": verification: " + verified.reason;
                const auto oracle =
                    oracle_dim(spec, OracleConfig{kDefaultPrime, 3, opt.seed});
                if (!oracle.certified_nonspecial ||
                    oracle.vec_dim != expected_vec_dim(spec)) {
                    return to_string(spec) + ": independent oracle disagrees (vec dim " +
                           std::to_string(oracle.vec_dim.value) + ")";
                }
            }
        }
        return {};
    });
}

CheckResult check_mixed_36(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 10 : 25;
    return timed("4-mixed-36", 120000.0, [&]() -> std::string {
        ResultStore store;
        CertPolicy policy;
        policy.oracle.seed = opt.seed;
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t m = 1; m <= 2; ++m) {
                const SystemSpec spec{d, m, 36};
                const auto result = certify(spec, policy, &store);
                if (!result.ok()) return to_string(spec) + ": " + result.error;
                const auto verified = verify_certificate(*result.certificate);
                if (!verified) return to_string(spec) + ": verification: " + verified.reason;
                const auto oracle =
                    oracle_dim(spec, OracleConfig{kDefaultPrime, 3, opt.seed});
                if (!oracle.certified_nonspecial ||
                    oracle.vec_dim != expected_vec_dim(spec)) {
                    return to_string(spec) + ": independent oracle disagrees (vec dim " +
                           std::to_string(oracle.vec_dim.value) + ")";
                }
            }
        }
        return {};
    });
}

CheckResult check_special_controls(const SelfcheckOptions& opt) {
    return timed("5-special-controls", 0.0, [&]() -> std::string {
        const std::vector<std::pair<SystemSpec, std::int64_t>> controls{
            {{2, 2, 2}, 1}, {{4, 2, 5}, 1}, {{6, 4, 3}, 1}};
        for (const auto& [spec, gap] : controls) {
            const auto probe =
                probe_speciality(spec, OracleConfig{kDefaultPrime, 3, opt.seed});
            if (probe.status != Speciality::ProbablySpecial || probe.gap != gap) {
                return to_string(spec) + ": got " + to_string(probe.status) + " gap " +
                       std::to_string(probe.gap) + ", wanted ProbablySpecial gap " +
                       std::to_string(gap);
            }
            if (!probe.secondary || probe.secondary->prime == probe.primary.prime) {
                return to_string(spec) + ": speciality not confirmed at two distinct primes";
            }
        }
        return {};
    });
}

CheckResult check_theorem2_consistency(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 15 : 30;
    return timed("6-theorem2-consistency", 0.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t m = 1; m <= 5; ++m) {
                for (const std::int64_t n1 : {4, 9}) {
                    for (const std::int64_t n2 : {4, 9}) {
                        for (const std::int64_t k : select_k(m, n2).candidates) {
                            const CaseLabel label = classify_case(d, k, m, n1, n2);
                            const VecDim lim = limit_system_dim(d, k, m, n1, n2);
                            const VecDim expected = expected_vec_dim({d, m, n1 * n2});
                            if (label == CaseLabel::None || lim != expected) {
                                return spec_tuple(d, k, m, n1, n2) + ": case " +
                                       to_string(label) + ", limit dim " +
                                       std::to_string(lim.value) + " != expected " +
                                       std::to_string(expected.value);
                            }
                        }
                    }
                }
            }
        }
        return {};
    });
}

CheckResult check_claim_cross(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 15 : 30;
    return timed("7-claim-cross-check", 0.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t k = 0; k <= d; ++k) {
                for (std::int64_t m = 1; m <= 5; ++m) {
                    for (const std::int64_t n1 : {4, 9, 16, 25, 36}) {
                        for (const std::int64_t n2 : {4, 9, 16, 25, 36}) {
                            const std::int64_t ks = kernel_sum(d, k, m, n1, n2).value;
                            const std::int64_t ks_table = kernel_sum_case_table(d, k, m, n1, n2);
                            if (ks != ks_table) {
                                return "kernel_sum " + spec_tuple(d, k, m, n1, n2) + ": " +
                                       std::to_string(ks) + " != table " +
                                       std::to_string(ks_table);
                            }
                            const std::int64_t ii = image_intersection(d, k, m, n1, n2).value;
                            const std::int64_t ii_table = image_intersection_case_table(
                                d, k, m, n1, n2, opt.inject_claim2_defect);
                            if (ii != ii_table) {
                                return "image_intersection " + spec_tuple(d, k, m, n1, n2) +
                                       ": " + std::to_string(ii) + " != table " +
                                       std::to_string(ii_table);
                            }
                        }
                    }
                }
            }
        }
        return {};
    });
}

CheckResult check_k_selection(const SelfcheckOptions& opt) {
    const std::int64_t m_max = opt.quick ? 12 : 50;
    const std::int64_t n2_max = opt.quick ? 40 : 200;
    return timed("8-k-selection-bracket", 0.0, [&]() -> std::string {
        for (std::int64_t m = 1; m <= m_max; ++m) {
            for (std::int64_t n2 = 1; n2 <= n2_max; ++n2) {
                const auto sel = select_k(m, n2);
                if (sel.candidates.empty() || sel.candidates.size() > 2) {
                    return "select_k(" + std::to_string(m) + ", " + std::to_string(n2) +
                           "): wrong candidate count";
                }
                if (sel.candidates.size() == 2 &&
                    sel.candidates[1] != sel.candidates[0] + 1) {
                    return "select_k(" + std::to_string(m) + ", " + std::to_string(n2) +
                           "): candidates not consecutive";
                }
                // Exact-arithmetic comparison against the real bounds: for
                // disc = 1 + 4*n2*m(m+1), k >= k_l iff (2k+3)^2 >= disc and
                // k <= k_u iff (2k+1)^2 <= disc.
                const std::int64_t disc = 1 + 4 * n2 * m * (m + 1);
                std::vector<std::int64_t> bracket;
                for (std::int64_t k = 0; (2 * k + 1) * (2 * k + 1) <= disc; ++k) {
                    if ((2 * k + 3) * (2 * k + 3) >= disc) bracket.push_back(k);
                }
                if (bracket != sel.candidates) {
                    return "select_k(" + std::to_string(m) + ", " + std::to_string(n2) +
                           "): disagrees with the exact real-bound bracket";
                }
            }
        }
        return {};
    });
}

CheckResult check_dim_relations(const SelfcheckOptions&) {
    return timed("dim-relations", 0.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= 40; ++d) {
            for (std::int64_t m = 0; m <= 6; ++m) {
                for (std::int64_t n = 0; n <= 50; ++n) {
                    const SystemSpec spec{d, m, n};
                    const std::int64_t proj = expected_proj_dim(spec);
                    const std::int64_t vec = expected_vec_dim(spec).value;
                    const std::int64_t want = proj >= 0 ? proj + 1 : 0;
                    if (vec != want) {
                        return to_string(spec) + ": vec " + std::to_string(vec) +
                               " vs proj " + std::to_string(proj);
                    }
                }
            }
        }
        // Monotonicity in the twisting parameter.
        for (std::int64_t d = 0; d <= 30; ++d) {
            for (std::int64_t k = 0; k <= d; ++k) {
                for (const std::int64_t n1 : {4, 9}) {
                    if (expected_vec_dim({d, k, n1}) < expected_vec_dim({d, k + 1, n1})) {
                        return "monotonicity failed at d=" + std::to_string(d) +
                               " k=" + std::to_string(k);
                    }
                }
                for (std::int64_t m = 1; m <= 5; ++m) {
                    for (const std::int64_t n2 : {4, 9}) {
                        if (expected_vec_dim({k, m, n2}) < expected_vec_dim({k - 1, m, n2})) {
                            return "monotonicity failed at k=" + std::to_string(k) +
                                   " m=" + std::to_string(m);
                        }
                    }
                }
            }
        }
        return {};
    });
}

CheckResult check_semicontinuity(const SelfcheckOptions& opt) {
    const std::int64_t d_max = opt.quick ? 15 : 30;
    return timed("semicontinuity-grid", 0.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= d_max; ++d) {
            for (std::int64_t k = 0; k <= d; ++k) {
                for (std::int64_t m = 1; m <= 5; ++m) {
                    for (const std::int64_t n1 : {4, 9}) {
                        for (const std::int64_t n2 : {4, 9}) {
                            if (limit_system_dim(d, k, m, n1, n2) <
                                expected_vec_dim({d, m, n1 * n2})) {
                                return "limit dim below expected at " +
                                       spec_tuple(d, k, m, n1, n2);
                            }
                        }
                    }
                }
            }
        }
        return {};
    });
}

CheckResult check_oracle_bounds(const SelfcheckOptions& opt) {
    return timed("oracle-bounds", 0.0, [&]() -> std::string {
        for (std::int64_t d = 0; d <= 10; d += 2) {
            for (std::int64_t m = 1; m <= 3; ++m) {
                for (const std::int64_t n : {1, 2, 5, 9, 12}) {
                    const SystemSpec spec{d, m, n};
                    const OracleConfig cfg{kDefaultPrime, 3, opt.seed};
                    const auto result = oracle_dim(spec, cfg);
                    if (result.vec_dim < expected_vec_dim(spec)) {
                        return to_string(spec) + ": vec dim below expected";
                    }
                    const auto replay = oracle_dim(spec, cfg);
                    if (replay.vec_dim != result.vec_dim ||
                        replay.trials_run != result.trials_run ||
                        replay.certified_nonspecial != result.certified_nonspecial) {
                        return to_string(spec) + ": oracle is not deterministic";
                    }
                    VecDim previous{binom(d + 2, 2) + 1};
                    for (int trials = 1; trials <= 3; ++trials) {
                        const auto partial =
                            oracle_dim(spec, OracleConfig{kDefaultPrime, trials, opt.seed});
                        if (partial.vec_dim > previous) {
                            return to_string(spec) + ": vec dim increased with more trials";
                        }
                        previous = partial.vec_dim;
                    }
                }
            }
        }
        return {};
    });
}

CheckResult check_certifier_roundtrip(const SelfcheckOptions& opt) {
    return timed("certifier-roundtrip", 0.0, [&]() -> std::string {
        ResultStore store;
        CertPolicy policy;
        policy.oracle.seed = opt.seed;
        const std::vector<SystemSpec> specs{
            {4, 1, 16}, {8, 1, 16}, {10, 2, 16}, {0, 1, 4}, {7, 2, 9}, {12, 1, 36}};
        for (const auto& spec : specs) {
            const auto result = certify(spec, policy, &store);
            if (!result.ok()) return to_string(spec) + ": " + result.error;
            const auto direct = verify_certificate(*result.certificate);
            if (!direct) return to_string(spec) + ": " + direct.reason;
            const auto reparsed =
                certificate_from_json(certificate_to_json(*result.certificate));
            const auto verified = verify_certificate(reparsed);
            if (!verified) {
                return to_string(spec) + ": round-tripped certificate: " + verified.reason;
            }
            // Warm-cache certification must still verify.
            const auto warm = certify(spec, policy, &store);
            if (!warm.ok()) return to_string(spec) + ": warm cache: " + warm.error;
            const auto warm_ok = verify_certificate(*warm.certificate);
            if (!warm_ok) return to_string(spec) + ": warm cache: " + warm_ok.reason;
        }
        return {};
    });
}

std::vector<CheckResult> run_acceptance(const SelfcheckOptions& opt) {
    return {
        check_base_family_n4(opt),   check_base_family_n9(opt), check_evain_16(opt),
        check_mixed_36(opt),         check_special_controls(opt),
        check_theorem2_consistency(opt), check_claim_cross(opt), check_k_selection(opt),
    };
}

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& opt) {
    std::vector<CheckResult> results = run_acceptance(opt);
    results.push_back(check_dim_relations(opt));
    results.push_back(check_semicontinuity(opt));
    results.push_back(check_oracle_bounds(opt));
    results.push_back(check_certifier_roundtrip(opt));
    return results;
}

}  // namespace fatpoint

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fatpoint/dimension.hpp"
#include "fatpoint/oracle.hpp"

namespace fatpoint {

class ResultStore;

struct Certificate;

/// d < 0: the system is empty by convention, expected dimension 0.
struct TrivialEmpty {};

/// m = 0 or n = 0: no conditions, the system is the full space of
/// degree-d curves.
struct TrivialFull {};

/// One reproducible rank witness: trial `trial_index` of a run seeded with
/// `seed` at modulus `prime` achieved the expected dimension.
struct OracleWitness {
    std::int64_t prime = kDefaultPrime;
    std::uint64_t seed = kDefaultSeed;
    int trial_index = 0;
};

/// A split n = n1 * n2 with twisting integer k. Carries exactly four
/// sub-certificates, in order:
///   L_d((k+1)^n1), L_d(k^n1), L_{k-1}(m^n2), L_k(m^n2).
struct DegenerationStep {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::int64_t k = 0;
    CaseLabel label = CaseLabel::None;
    VecDim dim_l0;
    std::vector<Certificate> subs;
};

/// Self-contained evidence tree proving dim = expected_vec_dim(spec).
/// Leaves are oracle witnesses or trivial cases; inner nodes are
/// degeneration steps. verify_certificate re-derives every claim.
struct Certificate {
    SystemSpec spec;
    std::variant<TrivialEmpty, TrivialFull, OracleWitness, DegenerationStep> method;
};

/// "trivial_empty" | "trivial_full" | "oracle" | "degeneration".
const char* method_name(const Certificate& cert);

/// Total node count of the tree.
std::size_t certificate_size(const Certificate& cert);

/// The four Theorem-2 sub-systems for (spec, n1, n2, k), in certificate order.
std::array<SystemSpec, 4> degeneration_subspecs(const SystemSpec& spec, std::int64_t n1,
                                                std::int64_t n2, std::int64_t k);

/// All ordered factorizations n = n1 * n2 with n1, n2 >= 2, balanced splits
/// first (sorted by max(n1, n2), then n1). Empty for primes and n < 4.
std::vector<std::pair<std::int64_t, std::int64_t>> factor_pairs(std::int64_t n);

struct FixedSplit {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
};

struct CertPolicy {
    /// Matrix widths above this are never sent to the oracle.
    std::int64_t max_oracle_cols = 1000;
    /// Forces the factorization at the root node; recursion below is automatic.
    std::optional<FixedSplit> fixed_split;
    /// Preferred n2 values for splits, tried before the balanced order.
    /// Family presets peel one factor of 4 or 9 at a time through this.
    std::vector<std::int64_t> peel_bases;
    /// For n at or below this, the oracle is tried before degenerating; the
    /// classical base range where a single rank witness is the cheapest proof.
    std::int64_t oracle_first_max_n = 9;
    OracleConfig oracle;
    int max_depth = 8;
};

struct CertifyResult {
    std::optional<Certificate> certificate;
    std::string error;  // set on failure; includes the failing sub-system path

    bool ok() const { return certificate.has_value(); }
};

/// Builds a certificate for spec:
///   1. trivial cases (d < 0, m = 0, n = 0);
///   2. for composite n, degeneration over factor pairs and admissible k
///      (smaller k first), recursively certifying the four sub-systems
///      cheapest-first and accepting iff the limit dimension equals the
///      expected dimension and a case condition holds;
///   3. oracle witness fallback when the matrix fits the policy budget.
/// For n <= policy.oracle_first_max_n steps 2 and 3 swap. Successful
/// (sub-)certificates are memoized in `store` when one is supplied, and
/// verified entries from the store are reused.
CertifyResult certify(const SystemSpec& spec, const CertPolicy& policy,
                      ResultStore* store = nullptr);

struct VerifyResult {
    bool ok = false;
    std::string reason;  // locates the first failing node when !ok

    explicit operator bool() const { return ok; }
};

/// Re-derives every claim in the tree using only the dimension calculus,
/// and re-runs each oracle witness trial from its recorded seed.
VerifyResult verify_certificate(const Certificate& cert);

/// Serializes to the cert-v1 JSON document. indent < 0 emits compact JSON.
std::string certificate_to_json(const Certificate& cert, int indent = 2);

/// Parses a cert-v1 document. Throws std::runtime_error on malformed input.
/// Parsing does not verify; call verify_certificate on the result.
Certificate certificate_from_json(const std::string& text);

enum class FamilyKind { FourPow, NinePow, Mixed };

/// Point-count family 4^h, 9^h, or 4^h * 9^k.
struct Family {
    FamilyKind kind = FamilyKind::FourPow;
    std::int64_t h = 1;
    std::int64_t k = 0;

    std::int64_t point_count() const;
    std::string name() const;
};

/// Parses "4^h", "9^h", "4^h*9^k". Returns nullopt on anything else.
std::optional<Family> parse_family(const std::string& text);

struct PresetRow {
    SystemSpec spec;
    bool certified = false;
    std::string method;      // root method when certified
    std::string error;       // failure reason otherwise
    std::size_t cert_nodes = 0;
    double wall_ms = 0.0;
};

/// Certifies L_d(m^n) for every d <= d_max, m in [1, m_max] with the family
/// point count, peeling one base factor at a time. Per-spec failures are
/// recorded and the batch continues.
std::vector<PresetRow> preset_family(const Family& family, std::int64_t d_max,
                                     std::int64_t m_max, const CertPolicy& policy,
                                     ResultStore* store = nullptr);

}  // namespace fatpoint

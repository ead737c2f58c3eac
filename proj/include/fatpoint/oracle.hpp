#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fatpoint/dimension.hpp"

namespace fatpoint {

// The two largest primes below 2^31. Large enough that the binomial entries
// of desk-scale condition matrices never reduce to zero spuriously.
inline constexpr std::int64_t kDefaultPrime = 2147483647;
inline constexpr std::int64_t kSecondPrime = 2147483629;
inline constexpr std::uint64_t kDefaultSeed = 0xF47;

/// Deterministic Miller-Rabin, exact for the supported modulus range.
bool is_prime(std::int64_t x);

/// Prime modulus for exact rank computation. The modulus is capped at
/// 2^31 - 1 so that a product of two reduced residues fits in int64 during
/// elimination. Construction throws std::invalid_argument otherwise.
struct PrimeField {
    std::int64_t p;

    explicit PrimeField(std::int64_t prime);
};

using Point = std::pair<std::int64_t, std::int64_t>;

/// n affine points with coordinates in [1, p-1], reproducible from the seed.
struct PointConfig {
    std::vector<Point> points;
    std::uint64_t seed = kDefaultSeed;
};

/// Draws n points from mt19937_64 seeded with `seed`. The same
/// (n, p, seed) always yields the same configuration.
PointConfig sample_points(std::int64_t n, const PrimeField& field, std::uint64_t seed);

/// Dense matrix of residues, row-major so elimination walks contiguous rows.
using ConditionsMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConditionsRow = Eigen::Matrix<std::int64_t, 1, Eigen::Dynamic>;

struct Monomial {
    std::int64_t x_exp = 0;
    std::int64_t y_exp = 0;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// All monomials x^i y^j with i + j <= d in graded lexicographic order
/// ((0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...). Length C(d+2, 2).
std::vector<Monomial> monomial_basis(std::int64_t d);

/// Row of the Taylor-vanishing condition of derivative order (a, b) at q:
/// the entry for basis monomial x^i y^j is C(i,a) C(j,b) x^(i-a) y^(j-b)
/// mod p, zero when a > i or b > j. Hasse derivative: coefficients are
/// extracted without factorial division, so the row is valid in any
/// characteristic.
ConditionsRow hasse_row(Point q, std::int64_t a, std::int64_t b, std::int64_t d,
                        const PrimeField& field);

/// Stacks hasse_row for every point and every order (a, b) with
/// a + b <= m - 1 (points in configuration order, orders graded-lex).
/// Shape: conditions_count(m, n) x C(d+2, 2).
/// Throws std::invalid_argument when p <= d (binomial entries could reduce
/// to zero spuriously) or when the point count does not match the spec.
ConditionsMatrix build_conditions_matrix(const SystemSpec& spec, const PointConfig& config,
                                         const PrimeField& field);

/// Exact rank over F_p by row elimination with modular inverses.
std::int64_t rank_mod_p(ConditionsMatrix matrix, const PrimeField& field);

struct OracleConfig {
    std::int64_t prime = kDefaultPrime;
    int trials = 3;
    std::uint64_t seed = kDefaultSeed;
};

/// Outcome of the randomized rank probe. Trial t draws its points with seed
/// `seed + t`, so any witnessing trial is reproducible from (prime, seed,
/// witness_trial) alone.
struct OracleResult {
    VecDim vec_dim;                    // min over trials of cols - rank
    bool certified_nonspecial = false; // some trial achieved the expected dimension
    int trials_run = 0;
    std::int64_t prime = kDefaultPrime;
    std::uint64_t seed = kDefaultSeed;
    int witness_trial = -1;            // index of the witnessing trial, -1 if none
};

/// Runs up to cfg.trials independent point configurations and keeps the
/// minimal cols - rank. A trial that reaches expected_vec_dim(spec) is a
/// sound non-speciality witness in characteristic 0: the rank mod p at the
/// sampled integer points is a lower bound for the generic rank. Stops at
/// the first witness. Requires spec.d >= 0 and cfg.trials >= 1.
OracleResult oracle_dim(const SystemSpec& spec, const OracleConfig& cfg);

/// Re-runs one witnessed trial and returns its cols - rank. Used by
/// certificate verification.
VecDim witnessed_vec_dim(const SystemSpec& spec, std::int64_t prime,
                         std::uint64_t base_seed, int trial_index);

enum class Speciality { NonSpecialCertified, ProbablySpecial, Unknown };

const char* to_string(Speciality s);

struct ProbeResult {
    Speciality status = Speciality::Unknown;
    std::int64_t gap = 0;  // vec_dim - expected, for ProbablySpecial
    OracleResult primary;
    std::optional<OracleResult> secondary;
};

/// NonSpecialCertified if any trial at either prime witnesses the expected
/// dimension; ProbablySpecial(gap) if runs at two distinct primes agree on
/// the same vec_dim above expected; Unknown otherwise. Speciality has no
/// finite certificate here, so ProbablySpecial is evidence, not proof.
ProbeResult probe_speciality(const SystemSpec& spec, const OracleConfig& cfg);

}  // namespace fatpoint

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "fatpoint/oracle.hpp"

using namespace fatpoint;

namespace {

// Brute-force rank oracle, independent of the elimination code: Laplace
// determinant expansion mod p over all square sub-matrices of a given size.
std::int64_t det_mod(const std::vector<std::vector<std::int64_t>>& a, std::int64_t p) {
    const std::size_t n = a.size();
    if (n == 1) return ((a[0][0] % p) + p) % p;
    std::int64_t det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (a[0][c] == 0) continue;
        std::vector<std::vector<std::int64_t>> minor(n - 1, std::vector<std::int64_t>(n - 1));
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t mc = 0;
            for (std::size_t cc = 0; cc < n; ++cc) {
                if (cc == c) continue;
                minor[r - 1][mc++] = a[r][cc];
            }
        }
        const std::int64_t term = a[0][c] % p * (det_mod(minor, p) % p) % p;
        det = (c % 2 == 0) ? (det + term) % p : (det - term % p + p) % p;
    }
    return det;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t limit) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] + (k - i) < limit) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::int64_t brute_force_rank(const ConditionsMatrix& matrix, std::int64_t p) {
    const auto rows = static_cast<std::size_t>(matrix.rows());
    const auto cols = static_cast<std::size_t>(matrix.cols());
    for (std::size_t size = std::min(rows, cols); size >= 1; --size) {
        std::vector<std::size_t> ri(size), ci(size);
        for (std::size_t i = 0; i < size; ++i) ri[i] = i;
        do {
            std::vector<std::size_t> cinit(size);
            for (std::size_t i = 0; i < size; ++i) cinit[i] = i;
            ci = cinit;
            do {
                std::vector<std::vector<std::int64_t>> sub(size,
                                                           std::vector<std::int64_t>(size));
                for (std::size_t r = 0; r < size; ++r) {
                    for (std::size_t c = 0; c < size; ++c) {
                        sub[r][c] = matrix(static_cast<Eigen::Index>(ri[r]),
                                           static_cast<Eigen::Index>(ci[c]));
                    }
                }
                if (det_mod(sub, p) != 0) return static_cast<std::int64_t>(size);
            } while (next_combination(ci, cols));
        } while (next_combination(ri, rows));
    }
    return 0;
}

}  // namespace

TEST_CASE("monomial basis is graded lexicographic") {
    const auto basis1 = monomial_basis(1);
    REQUIRE(basis1.size() == 3);
    CHECK(basis1[0] == Monomial{0, 0});
    CHECK(basis1[1] == Monomial{1, 0});
    CHECK(basis1[2] == Monomial{0, 1});

    CHECK(monomial_basis(2).size() == 6);
    const auto basis0 = monomial_basis(0);
    REQUIRE(basis0.size() == 1);
    CHECK(basis0[0] == Monomial{0, 0});
}

TEST_CASE("hasse rows") {
    const PrimeField field(kDefaultPrime);

    const auto eval = hasse_row({1, 1}, 0, 0, 1, field);
    REQUIRE(eval.size() == 3);
    CHECK(eval(0) == 1);
    CHECK(eval(1) == 1);
    CHECK(eval(2) == 1);

    const auto ddx = hasse_row({123456, 987654}, 1, 0, 1, field);
    CHECK(ddx(0) == 0);
    CHECK(ddx(1) == 1);
    CHECK(ddx(2) == 0);

    // d=2, point (2,3), order (1,0) over basis 1, x, y, x^2, xy, y^2.
    const auto row = hasse_row({2, 3}, 1, 0, 2, field);
    REQUIRE(row.size() == 6);
    const std::vector<std::int64_t> want{0, 1, 0, 4, 3, 0};
    for (int c = 0; c < 6; ++c) CHECK(row(c) == want[static_cast<std::size_t>(c)]);
}

TEST_CASE("conditions matrix shapes") {
    const PrimeField field(kDefaultPrime);
    const auto points5 = sample_points(5, field, kDefaultSeed);
    const auto m1 = build_conditions_matrix({2, 1, 5}, points5, field);
    CHECK(m1.rows() == 5);
    CHECK(m1.cols() == 6);

    const auto points2 = sample_points(2, field, kDefaultSeed);
    const auto m2 = build_conditions_matrix({2, 2, 2}, points2, field);
    CHECK(m2.rows() == 6);
    CHECK(m2.cols() == 6);

    const auto m3 = build_conditions_matrix({4, 2, 5}, points5, field);
    CHECK(m3.rows() == 15);
    CHECK(m3.cols() == 15);

    const PrimeField tiny(3);
    CHECK_THROWS_AS(build_conditions_matrix({4, 1, 5}, points5, tiny), std::invalid_argument);
    CHECK_THROWS_AS(build_conditions_matrix({2, 1, 3}, points5, field), std::invalid_argument);
}

TEST_CASE("prime field validation") {
    CHECK_THROWS_AS(PrimeField(91), std::invalid_argument);   // 7 * 13
    CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
    CHECK_NOTHROW(PrimeField{2});
    CHECK_NOTHROW(PrimeField{kDefaultPrime});
    CHECK_NOTHROW(PrimeField{kSecondPrime});
    CHECK(is_prime(kSecondPrime));
    CHECK_FALSE(is_prime(kSecondPrime + 2));
}

TEST_CASE("rank of elementary matrices") {
    const PrimeField field(kDefaultPrime);
    ConditionsMatrix zero = ConditionsMatrix::Zero(4, 7);
    CHECK(rank_mod_p(zero, field) == 0);
    ConditionsMatrix id = ConditionsMatrix::Identity(6, 6);
    CHECK(rank_mod_p(id, field) == 6);
}

TEST_CASE("double-point pair matrix has rank 5") {
    // L_2(2^2): the doubled line through the two points spans the kernel, so
    // the 6x6 conditions matrix has rank exactly 5. Checked against the
    // Laplace-expansion brute force.
    const PrimeField field(kDefaultPrime);
    for (std::uint64_t seed : {kDefaultSeed, kDefaultSeed + 1, std::uint64_t{99}}) {
        const auto points = sample_points(2, field, seed);
        const auto matrix = build_conditions_matrix({2, 2, 2}, points, field);
        CHECK(rank_mod_p(matrix, field) == 5);
        CHECK(brute_force_rank(matrix, field.p) == 5);
    }
}

TEST_CASE("elimination rank agrees with brute force on small random matrices") {
    const PrimeField field(101);
    std::mt19937_64 rng(7);
    for (int iteration = 0; iteration < 20; ++iteration) {
        const auto rows = static_cast<Eigen::Index>(1 + rng() % 5);
        const auto cols = static_cast<Eigen::Index>(1 + rng() % 5);
        ConditionsMatrix matrix(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                matrix(r, c) = static_cast<std::int64_t>(rng() % 101);
            }
        }
        CHECK(rank_mod_p(matrix, field) == brute_force_rank(matrix, field.p));
    }
}

TEST_CASE("oracle dimensions of the classical examples") {
    const OracleConfig cfg;

    const auto double_line = oracle_dim({2, 2, 2}, cfg);
    CHECK(double_line.vec_dim.value == 1);
    CHECK_FALSE(double_line.certified_nonspecial);

    const auto double_conic = oracle_dim({4, 2, 5}, cfg);
    CHECK(double_conic.vec_dim.value == 1);
    CHECK_FALSE(double_conic.certified_nonspecial);

    const auto simple16 = oracle_dim({8, 1, 16}, cfg);
    CHECK(simple16.vec_dim.value == 29);
    CHECK(simple16.certified_nonspecial);
    CHECK(simple16.witness_trial >= 0);
}

TEST_CASE("oracle handles empty condition sets") {
    const auto full = oracle_dim({3, 1, 0}, OracleConfig{});
    CHECK(full.vec_dim.value == 10);
    CHECK(full.certified_nonspecial);

    const auto no_mult = oracle_dim({3, 0, 6}, OracleConfig{});
    CHECK(no_mult.vec_dim.value == 10);
    CHECK(no_mult.certified_nonspecial);
}

TEST_CASE("oracle determinism and witness replay") {
    const OracleConfig cfg{kDefaultPrime, 3, 424242};
    const auto first = oracle_dim({6, 2, 7}, cfg);
    const auto second = oracle_dim({6, 2, 7}, cfg);
    CHECK(first.vec_dim == second.vec_dim);
    CHECK(first.trials_run == second.trials_run);
    REQUIRE(first.certified_nonspecial);
    CHECK(witnessed_vec_dim({6, 2, 7}, first.prime, first.seed, first.witness_trial) ==
          expected_vec_dim({6, 2, 7}));
}

TEST_CASE("probe speciality") {
    const OracleConfig cfg;

    const auto special = probe_speciality({2, 2, 2}, cfg);
    CHECK(special.status == Speciality::ProbablySpecial);
    CHECK(special.gap == 1);
    REQUIRE(special.secondary.has_value());
    CHECK(special.secondary->prime != special.primary.prime);

    const auto fat_triangle = probe_speciality({6, 4, 3}, cfg);
    CHECK(fat_triangle.status == Speciality::ProbablySpecial);
    CHECK(fat_triangle.gap == 1);

    const auto cubic = probe_speciality({3, 1, 9}, cfg);
    CHECK(cubic.status == Speciality::NonSpecialCertified);
    CHECK(expected_vec_dim({3, 1, 9}).value == 1);
}

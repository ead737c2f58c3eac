#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fatpoint/dimension.hpp"
#include "fatpoint/selfcheck.hpp"

using namespace fatpoint;

TEST_CASE("binomial coefficients") {
    CHECK(binom(4, 2) == 6);
    CHECK(binom(0, 0) == 1);
    CHECK(binom(2, 3) == 0);
    CHECK(binom(32, 2) == 496);
    CHECK(binom(-1, 0) == 0);
}

TEST_CASE("virtual and expected dimensions") {
    CHECK(virtual_dim({2, 1, 5}) == 0);
    CHECK(virtual_dim({2, 2, 2}) == -1);
    CHECK(virtual_dim({8, 1, 16}) == 28);
    CHECK_THROWS_AS(virtual_dim({-1, 1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(virtual_dim({3, -1, 4}), std::invalid_argument);

    CHECK(expected_proj_dim({2, 2, 2}) == -1);
    CHECK(expected_proj_dim({4, 2, 5}) == -1);
    CHECK(expected_proj_dim({8, 1, 16}) == 28);

    CHECK(expected_vec_dim({4, 1, 16}).value == 0);
    CHECK(expected_vec_dim({-1, 3, 4}).value == 0);
    CHECK(expected_vec_dim({8, 1, 16}).value == 29);
    // No conditions: the full space of degree-d curves.
    CHECK(expected_vec_dim({3, 0, 7}).value == 10);
    CHECK(expected_vec_dim({3, 2, 0}).value == 10);
}

TEST_CASE("conditions count") {
    CHECK(conditions_count(2, 5) == 15);
    CHECK(conditions_count(0, 7) == 0);
    CHECK(conditions_count(1, 16) == 16);
}

TEST_CASE("k selection") {
    CHECK(select_k(1, 4).candidates == std::vector<std::int64_t>{2});
    CHECK(select_k(2, 4).candidates == std::vector<std::int64_t>{4});
    CHECK(select_k(1, 9).candidates == std::vector<std::int64_t>{3});
    // 1 + 4*1*2 = 9 is a perfect square: both bracket endpoints admissible.
    CHECK(select_k(1, 1).candidates == std::vector<std::int64_t>{0, 1});
    CHECK_THROWS_AS(select_k(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(select_k(3, 0), std::invalid_argument);
}

TEST_CASE("k selection bracket is tight") {
    for (std::int64_t m = 1; m <= 8; ++m) {
        for (std::int64_t n2 = 1; n2 <= 30; ++n2) {
            const auto sel = select_k(m, n2);
            const std::int64_t cond = conditions_count(m, n2);
            REQUIRE(!sel.candidates.empty());
            for (const std::int64_t k : sel.candidates) {
                CHECK(k * (k + 3) / 2 + 1 - cond >= 0);
                CHECK((k - 1) * (k + 2) / 2 + 1 - cond <= 0);
            }
            const std::int64_t lo = sel.candidates.front();
            const std::int64_t hi = sel.candidates.back();
            // One step outside the bracket violates the matching inequality.
            CHECK((lo - 1) * (lo + 2) / 2 + 1 - cond < 0);
            CHECK(hi * (hi + 3) / 2 + 1 - cond > 0);
        }
    }
}

TEST_CASE("kernel sum") {
    CHECK(kernel_sum(8, 2, 1, 4, 4).value == 21);
    CHECK(kernel_sum(4, 2, 1, 4, 4).value == 0);
    CHECK(kernel_sum(0, 0, 1, 4, 4).value == 0);
}

TEST_CASE("image intersection") {
    CHECK(image_intersection(8, 2, 1, 4, 4).value == 8);
    CHECK(image_intersection(4, 2, 1, 4, 4).value == 0);
    CHECK(image_intersection(2, 2, 1, 4, 4).value == 0);
}

TEST_CASE("limit system dimension") {
    CHECK(limit_system_dim(8, 2, 1, 4, 4).value == 29);
    CHECK(limit_system_dim(8, 2, 1, 4, 4) == expected_vec_dim({8, 1, 16}));
    CHECK(limit_system_dim(4, 2, 1, 4, 4).value == 0);
    CHECK(limit_system_dim(10, 4, 2, 4, 4).value == 18);
    CHECK(limit_system_dim(10, 4, 2, 4, 4) == expected_vec_dim({10, 2, 16}));
}

TEST_CASE("case classification") {
    CHECK(classify_case(8, 2, 1, 4, 4) == CaseLabel::II);
    CHECK(classify_case(4, 2, 1, 4, 4) == CaseLabel::A);
    CHECK(classify_case(2, 4, 2, 4, 4) == CaseLabel::A);
    // Far outside the admissible bracket nothing applies.
    CHECK(classify_case(8, 1, 3, 4, 4) == CaseLabel::None);
}

TEST_CASE("invariant grids pass") {
    SelfcheckOptions opt;
    opt.quick = true;
    CHECK(check_dim_relations(opt).pass);
    CHECK(check_semicontinuity(opt).pass);
    CHECK(check_theorem2_consistency(opt).pass);
    CHECK(check_claim_cross(opt).pass);
    CHECK(check_k_selection(opt).pass);
}

TEST_CASE("claim-2 cross-check catches the sign-flipped case table") {
    SelfcheckOptions opt;
    opt.quick = true;
    opt.inject_claim2_defect = true;
    const auto result = check_claim_cross(opt);
    CHECK_FALSE(result.pass);
    CHECK(result.detail.find("image_intersection") != std::string::npos);
}

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace fatpoint {

/// A homogeneous linear system L_d(m^n): plane curves of degree d passing
/// through n general points, each with multiplicity at least m.
///
/// m and n must be non-negative. The degree may be negative; a negative
/// degree denotes the empty system (see expected_vec_dim).
struct SystemSpec {
    std::int64_t d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;

    friend auto operator<=>(const SystemSpec&, const SystemSpec&) = default;
};

/// Renders "L_d(m^n)", e.g. L_4(2^16).
std::string to_string(const SystemSpec& spec);

/// Dimension of a vector space of forms. Always non-negative: it equals the
/// projective dimension plus one when the system is non-empty, and 0 when the
/// projective dimension is -1.
struct VecDim {
    std::int64_t value = 0;

    friend auto operator<=>(const VecDim&, const VecDim&) = default;
};

inline VecDim operator+(VecDim a, VecDim b) { return VecDim{a.value + b.value}; }

/// C(a, b), with the convention C(a, b) = 0 for b > a or negative arguments.
std::int64_t binom(std::int64_t a, std::int64_t b);

/// Conditions imposed by n base points of multiplicity m: n * m(m+1)/2.
std::int64_t conditions_count(std::int64_t m, std::int64_t n);

/// Virtual projective dimension v = d(d+3)/2 - n * m(m+1)/2.
/// Throws std::invalid_argument for d < 0 (use expected_vec_dim for the
/// degenerate degrees that appear inside the recursion).
std::int64_t virtual_dim(const SystemSpec& spec);

/// Expected projective dimension e = max(-1, v). Throws as virtual_dim.
std::int64_t expected_proj_dim(const SystemSpec& spec);

/// Expected dimension of the vector space of forms:
///   max(d(d+3)/2 + 1 - n * m(m+1)/2, 0)   for d >= 0,
///   0                                     for d < 0.
/// Total in d; m = 0 or n = 0 yields the full space of dimension C(d+2, 2).
VecDim expected_vec_dim(const SystemSpec& spec);

/// The twisting integers bracketed by k_l = (-3 + sqrt(1+4*n2*m(m+1)))/2 and
/// k_u = k_l + 1, characterized by the integer inequalities
///   k(k+3)/2 + 1 - n2*m(m+1)/2 >= 0   and   (k-1)(k+2)/2 + 1 - n2*m(m+1)/2 <= 0.
struct KSelection {
    std::vector<std::int64_t> candidates;  // 1 or 2 consecutive integers, ascending
    std::int64_t m = 0;
    std::int64_t n2 = 0;
};

/// All admissible twisting integers for (m, n2). The list holds two
/// consecutive candidates exactly when k_l is itself an integer, i.e. when
/// 1 + 4*n2*m(m+1) is a perfect square. No floating point is involved.
/// Throws std::invalid_argument for m < 1 or n2 < 1.
KSelection select_k(std::int64_t m, std::int64_t n2);

/// Outcome of the case analysis for the dimension of the limit system.
/// I..IV are the positive-dimension cases, A the empty case, None means no
/// condition is satisfied (possible only for k outside the admissible bracket).
enum class CaseLabel { I, II, III, IV, A, None };

const char* to_string(CaseLabel label);

/// Sum of the two restriction-kernel dimensions in the limit surface:
/// dim L_d((k+1)^n1) + n1 * dim L_{k-1}(m^n2), each taken at its expected value.
VecDim kernel_sum(std::int64_t d, std::int64_t k, std::int64_t m,
                  std::int64_t n1, std::int64_t n2);

/// Dimension of the proper intersection of the two restriction images on the
/// n1 common lines: max(im_Y + im_P - n1*(k+1), 0), where
///   im_Y = dim L_d(k^n1) - dim L_d((k+1)^n1)
///   im_P = n1 * (dim L_k(m^n2) - dim L_{k-1}(m^n2)).
VecDim image_intersection(std::int64_t d, std::int64_t k, std::int64_t m,
                          std::int64_t n1, std::int64_t n2);

/// Dimension of the limit system on the degenerate surface:
/// kernel_sum + image_intersection. Certification compares this against
/// expected_vec_dim(d, m, n1*n2).
VecDim limit_system_dim(std::int64_t d, std::int64_t k, std::int64_t m,
                        std::int64_t n1, std::int64_t n2);

/// First matching label in the order I, II, III, IV, A, else None. Ties on
/// the boundaries (a sub-dimension exactly zero) are resolved by that
/// precedence; every matching label yields the same limit dimension.
CaseLabel classify_case(std::int64_t d, std::int64_t k, std::int64_t m,
                        std::int64_t n1, std::int64_t n2);

}  // namespace fatpoint

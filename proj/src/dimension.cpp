#include "fatpoint/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fatpoint {

namespace {

void require_valid(const SystemSpec& spec, const char* where) {
    if (spec.m < 0 || spec.n < 0) {
        std::ostringstream msg;
        msg << where << ": multiplicity and point count must be non-negative, got "
            << to_string(spec);
        throw std::invalid_argument(msg.str());
    }
}

std::int64_t isqrt_floor(std::int64_t x) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
    while (r > 0 && r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

// Vector-space dimension of all degree-d curves, d >= 0.
std::int64_t full_space(std::int64_t d) { return d * (d + 3) / 2 + 1; }

}  // namespace

std::string to_string(const SystemSpec& spec) {
    std::ostringstream out;
    out << "L_" << spec.d << "(" << spec.m << "^" << spec.n << ")";
    return out.str();
}

std::int64_t binom(std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= b; ++i) result = result * (a - b + i) / i;
    return result;
}

std::int64_t conditions_count(std::int64_t m, std::int64_t n) {
    if (m < 0 || n < 0) throw std::invalid_argument("conditions_count: negative input");
    return n * (m * (m + 1) / 2);
}

std::int64_t virtual_dim(const SystemSpec& spec) {
    require_valid(spec, "virtual_dim");
    if (spec.d < 0) {
        throw std::invalid_argument("virtual_dim: undefined for negative degree " +
                                    to_string(spec));
    }
    return spec.d * (spec.d + 3) / 2 - conditions_count(spec.m, spec.n);
}

std::int64_t expected_proj_dim(const SystemSpec& spec) {
    return std::max<std::int64_t>(-1, virtual_dim(spec));
}

VecDim expected_vec_dim(const SystemSpec& spec) {
    require_valid(spec, "expected_vec_dim");
    if (spec.d < 0) return VecDim{0};
    const std::int64_t v = full_space(spec.d) - conditions_count(spec.m, spec.n);
    return VecDim{std::max<std::int64_t>(v, 0)};
}

KSelection select_k(std::int64_t m, std::int64_t n2) {
    if (m < 1 || n2 < 1) {
        throw std::invalid_argument("select_k: requires m >= 1 and n2 >= 1");
    }
    const std::int64_t disc = 1 + 4 * n2 * m * (m + 1);
    const std::int64_t s = isqrt_floor(disc);
    KSelection sel;
    sel.m = m;
    sel.n2 = n2;
    if (s * s == disc) {
        // disc is odd, so s is odd and k_l = (s-3)/2 is exact: both bracket
        // endpoints are admissible.
        const std::int64_t k_low = (s - 3) / 2;
        sel.candidates = {k_low, k_low + 1};
    } else {
        sel.candidates = {(s - 1) / 2};
    }
    return sel;
}

const char* to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::I: return "I";
        case CaseLabel::II: return "II";
        case CaseLabel::III: return "III";
        case CaseLabel::IV: return "IV";
        case CaseLabel::A: return "A";
        case CaseLabel::None: return "NONE";
    }
    return "NONE";
}

VecDim kernel_sum(std::int64_t d, std::int64_t k, std::int64_t m,
                  std::int64_t n1, std::int64_t n2) {
    const VecDim ker_y = expected_vec_dim({d, k + 1, n1});
    const VecDim ker_p = expected_vec_dim({k - 1, m, n2});
    return VecDim{ker_y.value + n1 * ker_p.value};
}

VecDim image_intersection(std::int64_t d, std::int64_t k, std::int64_t m,
                          std::int64_t n1, std::int64_t n2) {
    const std::int64_t im_y =
        expected_vec_dim({d, k, n1}).value - expected_vec_dim({d, k + 1, n1}).value;
    const std::int64_t im_p =
        n1 * (expected_vec_dim({k, m, n2}).value - expected_vec_dim({k - 1, m, n2}).value);
    return VecDim{std::max<std::int64_t>(im_y + im_p - n1 * (k + 1), 0)};
}

VecDim limit_system_dim(std::int64_t d, std::int64_t k, std::int64_t m,
                        std::int64_t n1, std::int64_t n2) {
    return kernel_sum(d, k, m, n1, n2) + image_intersection(d, k, m, n1, n2);
}

CaseLabel classify_case(std::int64_t d, std::int64_t k, std::int64_t m,
                        std::int64_t n1, std::int64_t n2) {
    const std::int64_t cond2 = conditions_count(m, n2);
    // Virtual vector-space dimensions of the five systems the conditions probe.
    const std::int64_t ker_y = full_space(d) - n1 * ((k + 1) * (k + 2) / 2);  // L_d((k+1)^n1)
    const std::int64_t ker_p = (k - 1) * (k + 2) / 2 + 1 - cond2;             // L_{k-1}(m^n2)
    const std::int64_t im_p = k * (k + 3) / 2 + 1 - cond2;                    // L_k(m^n2)
    const std::int64_t res_y = full_space(d) - n1 * (k * (k + 1) / 2);        // L_d(k^n1)
    const std::int64_t total = full_space(d) - n1 * cond2;                    // L_d(m^(n1*n2))

    if (ker_y >= 0 && ker_p >= 0) return CaseLabel::I;
    if (ker_y >= 0 && ker_p <= 0 && im_p >= 0) return CaseLabel::II;
    if (ker_y <= 0 && ker_p >= 0 && res_y >= 0) return CaseLabel::III;
    if (ker_y <= 0 && ker_p <= 0 && total >= 0) return CaseLabel::IV;
    if (ker_y <= 0 && ker_p <= 0 && total <= 0) return CaseLabel::A;
    return CaseLabel::None;
}

}  // namespace fatpoint

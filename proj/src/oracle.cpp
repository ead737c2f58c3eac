#include "fatpoint/oracle.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace fatpoint {

namespace {

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t p) {
    // Residues are kept in [0, p) with p <= 2^31 - 1, so the product fits.
    return a * b % p;
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t p) {
    std::int64_t result = 1 % p;
    base %= p;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, p);
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return result;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t p) { return pow_mod(a, p - 2, p); }

// Pascal triangle of binomials mod p, rows 0..max_n.
std::vector<std::vector<std::int64_t>> binom_table_mod(std::int64_t max_n, std::int64_t p) {
    std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(max_n) + 1);
    for (std::int64_t i = 0; i <= max_n; ++i) {
        auto& row = table[static_cast<std::size_t>(i)];
        row.assign(static_cast<std::size_t>(i) + 1, 1);
        for (std::int64_t j = 1; j < i; ++j) {
            row[static_cast<std::size_t>(j)] =
                (table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                 table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)]) %
                p;
        }
    }
    return table;
}

}  // namespace

bool is_prime(std::int64_t x) {
    if (x < 2) return false;
    for (std::int64_t q : {2, 3, 5, 7, 11, 13}) {
        if (x == q) return true;
        if (x % q == 0) return false;
    }
    std::int64_t d = x - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // Deterministic witness set for x < 3.2 * 10^18; products stay in range
    // via __int128.
    for (std::int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::int64_t y = 1;
        {
            std::int64_t base = a % x;
            std::int64_t e = d;
            while (e > 0) {
                if (e & 1) y = static_cast<std::int64_t>(static_cast<__int128>(y) * base % x);
                base = static_cast<std::int64_t>(static_cast<__int128>(base) * base % x);
                e >>= 1;
            }
        }
        if (y == 1 || y == x - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            y = static_cast<std::int64_t>(static_cast<__int128>(y) * y % x);
            if (y == x - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::int64_t prime) : p(prime) {
    if (prime < 2 || prime > kDefaultPrime) {
        std::ostringstream msg;
        msg << "PrimeField: modulus " << prime << " outside supported range [2, "
            << kDefaultPrime << "]";
        throw std::invalid_argument(msg.str());
    }
    if (!is_prime(prime)) {
        std::ostringstream msg;
        msg << "PrimeField: " << prime << " is not prime";
        throw std::invalid_argument(msg.str());
    }
}

PointConfig sample_points(std::int64_t n, const PrimeField& field, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample_points: negative point count");
    PointConfig config;
    config.seed = seed;
    config.points.reserve(static_cast<std::size_t>(n));
    std::mt19937_64 rng(seed);
    const auto span = static_cast<std::uint64_t>(field.p - 1);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto x = static_cast<std::int64_t>(rng() % span) + 1;
        const auto y = static_cast<std::int64_t>(rng() % span) + 1;
        config.points.emplace_back(x, y);
    }
    return config;
}

std::vector<Monomial> monomial_basis(std::int64_t d) {
    if (d < 0) throw std::invalid_argument("monomial_basis: negative degree");
    std::vector<Monomial> basis;
    basis.reserve(static_cast<std::size_t>(binom(d + 2, 2)));
    for (std::int64_t total = 0; total <= d; ++total) {
        for (std::int64_t i = total; i >= 0; --i) {
            basis.push_back(Monomial{i, total - i});
        }
    }
    return basis;
}

ConditionsRow hasse_row(Point q, std::int64_t a, std::int64_t b, std::int64_t d,
                        const PrimeField& field) {
    const auto basis = monomial_basis(d);
    const auto binoms = binom_table_mod(d, field.p);

    // Powers of the coordinates up to d.
    std::vector<std::int64_t> xp(static_cast<std::size_t>(d) + 1, 1);
    std::vector<std::int64_t> yp(static_cast<std::size_t>(d) + 1, 1);
    const std::int64_t x = ((q.first % field.p) + field.p) % field.p;
    const std::int64_t y = ((q.second % field.p) + field.p) % field.p;
    for (std::int64_t e = 1; e <= d; ++e) {
        xp[static_cast<std::size_t>(e)] = mul_mod(xp[static_cast<std::size_t>(e - 1)], x, field.p);
        yp[static_cast<std::size_t>(e)] = mul_mod(yp[static_cast<std::size_t>(e - 1)], y, field.p);
    }

    ConditionsRow row(basis.size());
    for (std::size_t c = 0; c < basis.size(); ++c) {
        const auto [i, j] = basis[c];
        if (a > i || b > j) {
            row(static_cast<Eigen::Index>(c)) = 0;
            continue;
        }
        std::int64_t entry = mul_mod(binoms[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)],
                                     binoms[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)],
                                     field.p);
        entry = mul_mod(entry, xp[static_cast<std::size_t>(i - a)], field.p);
        entry = mul_mod(entry, yp[static_cast<std::size_t>(j - b)], field.p);
        row(static_cast<Eigen::Index>(c)) = entry;
    }
    return row;
}

ConditionsMatrix build_conditions_matrix(const SystemSpec& spec, const PointConfig& config,
                                         const PrimeField& field) {
    if (spec.d < 0 || spec.m < 0 || spec.n < 0) {
        throw std::invalid_argument("build_conditions_matrix: invalid spec " + to_string(spec));
    }
    if (field.p <= spec.d) {
        std::ostringstream msg;
        msg << "build_conditions_matrix: prime " << field.p << " must exceed degree " << spec.d;
        throw std::invalid_argument(msg.str());
    }
    if (static_cast<std::int64_t>(config.points.size()) != spec.n) {
        throw std::invalid_argument("build_conditions_matrix: point count mismatch for " +
                                    to_string(spec));
    }

    const std::int64_t rows = conditions_count(spec.m, spec.n);
    const std::int64_t cols = binom(spec.d + 2, 2);
    ConditionsMatrix matrix(rows, cols);

    // Derivative orders (a, b) with a + b <= m - 1, graded-lex like the basis.
    std::vector<std::pair<std::int64_t, std::int64_t>> orders;
    for (std::int64_t total = 0; total < spec.m; ++total) {
        for (std::int64_t a = total; a >= 0; --a) orders.emplace_back(a, total - a);
    }

    Eigen::Index r = 0;
    for (const auto& point : config.points) {
        for (const auto& [a, b] : orders) {
            matrix.row(r++) = hasse_row(point, a, b, spec.d, field);
        }
    }
    return matrix;
}

std::int64_t rank_mod_p(ConditionsMatrix matrix, const PrimeField& field) {
    const std::int64_t p = field.p;
    const Eigen::Index rows = matrix.rows();
    const Eigen::Index cols = matrix.cols();
    std::int64_t rank = 0;
    Eigen::Index pivot_row = 0;
    for (Eigen::Index col = 0; col < cols && pivot_row < rows; ++col) {
        Eigen::Index pivot = -1;
        for (Eigen::Index r = pivot_row; r < rows; ++r) {
            if (matrix(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != pivot_row) matrix.row(pivot).swap(matrix.row(pivot_row));
        const std::int64_t inv = inv_mod(matrix(pivot_row, col), p);
        for (Eigen::Index r = pivot_row + 1; r < rows; ++r) {
            const std::int64_t lead = matrix(r, col);
            if (lead == 0) continue;
            const std::int64_t factor = mul_mod(lead, inv, p);
            matrix.row(r) = (matrix.row(r) - factor * matrix.row(pivot_row))
                                .unaryExpr([p](std::int64_t v) {
                                    v %= p;
                                    return v < 0 ? v + p : v;
                                });
        }
        ++pivot_row;
        ++rank;
    }
    return rank;
}

OracleResult oracle_dim(const SystemSpec& spec, const OracleConfig& cfg) {
    if (spec.d < 0) throw std::invalid_argument("oracle_dim: negative degree " + to_string(spec));
    if (cfg.trials < 1) throw std::invalid_argument("oracle_dim: trials must be >= 1");
    const PrimeField field(cfg.prime);

    const VecDim expected = expected_vec_dim(spec);
    const std::int64_t cols = binom(spec.d + 2, 2);

    OracleResult result;
    result.prime = cfg.prime;
    result.seed = cfg.seed;
    result.vec_dim = VecDim{cols};
    for (int t = 0; t < cfg.trials; ++t) {
        const auto config = sample_points(spec.n, field, cfg.seed + static_cast<std::uint64_t>(t));
        const auto matrix = build_conditions_matrix(spec, config, field);
        const std::int64_t rank = rank_mod_p(matrix, field);
        const VecDim trial_dim{cols - rank};
        result.trials_run = t + 1;
        if (trial_dim < result.vec_dim) result.vec_dim = trial_dim;
        if (trial_dim == expected) {
            result.certified_nonspecial = true;
            result.witness_trial = t;
            break;
        }
    }
    return result;
}

VecDim witnessed_vec_dim(const SystemSpec& spec, std::int64_t prime, std::uint64_t base_seed,
                         int trial_index) {
    const PrimeField field(prime);
    const auto config =
        sample_points(spec.n, field, base_seed + static_cast<std::uint64_t>(trial_index));
    const auto matrix = build_conditions_matrix(spec, config, field);
    return VecDim{binom(spec.d + 2, 2) - rank_mod_p(matrix, field)};
}

const char* to_string(Speciality s) {
    switch (s) {
        case Speciality::NonSpecialCertified: return "NonSpecialCertified";
        case Speciality::ProbablySpecial: return "ProbablySpecial";
        case Speciality::Unknown: return "Unknown";
    }
    return "Unknown";
}

ProbeResult probe_speciality(const SystemSpec& spec, const OracleConfig& cfg) {
    ProbeResult probe;
    probe.primary = oracle_dim(spec, cfg);
    if (probe.primary.certified_nonspecial) {
        probe.status = Speciality::NonSpecialCertified;
        return probe;
    }

    OracleConfig second = cfg;
    second.prime = (cfg.prime == kDefaultPrime) ? kSecondPrime : kDefaultPrime;
    probe.secondary = oracle_dim(spec, second);
    if (probe.secondary->certified_nonspecial) {
        probe.status = Speciality::NonSpecialCertified;
        return probe;
    }

    const VecDim expected = expected_vec_dim(spec);
    if (probe.primary.vec_dim == probe.secondary->vec_dim &&
        probe.primary.vec_dim > expected) {
        probe.status = Speciality::ProbablySpecial;
        probe.gap = probe.primary.vec_dim.value - expected.value;
    } else {
        probe.status = Speciality::Unknown;
    }
    return probe;
}

}  // namespace fatpoint

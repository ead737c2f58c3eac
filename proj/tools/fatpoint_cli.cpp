// fatpoint: dimensions and non-speciality certificates for homogeneous linear
// systems of plane curves with fat base points.
//
// Exit codes: 0 ok/certified, 1 usage error, 2 probably special, 3 unknown,
// 4 certification failure.
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fatpoint/certifier.hpp"
#include "fatpoint/dimension.hpp"
#include "fatpoint/oracle.hpp"
#include "fatpoint/selfcheck.hpp"
#include "fatpoint/store.hpp"

namespace {

using namespace fatpoint;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitProbablySpecial = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitCertFailure = 4;

struct CommonFlags {
    std::int64_t prime = kDefaultPrime;
    int trials = 3;
    std::string seed_text = "3911";  // 0xF47
    std::string cache_path;
    std::string format = "table";
    std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--prime", flags.prime, "Prime modulus for the rank oracle");
    cmd->add_option("--trials", flags.trials, "Oracle trials per spec");
    cmd->add_option("--seed", flags.seed_text, "RNG seed (number, or 'random')");
    cmd->add_option("--cache", flags.cache_path, "Result cache file (JSON lines)");
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--out", flags.out_path, "Write output to this path");
}

std::uint64_t resolve_seed(const std::string& text) {
    if (text == "random") return std::random_device{}();
    return std::stoull(text, nullptr, 0);
}

OracleConfig oracle_config(const CommonFlags& flags) {
    OracleConfig cfg;
    cfg.prime = flags.prime;
    cfg.trials = flags.trials;
    cfg.seed = resolve_seed(flags.seed_text);
    return cfg;
}

// Validates the prime eagerly so bad flags fail with a usage error.
void validate_prime(std::int64_t prime) { PrimeField probe(prime); (void)probe; }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += "\"";
    return quoted;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output path " + out_path);
    out << text;
    std::cerr << "wrote " << out_path << "\n";
}

struct StoreHandle {
    ResultStore store;
    std::string path;

    explicit StoreHandle(const std::string& cache_path) : path(cache_path) {
        if (path.empty()) return;
        std::ifstream probe(path);
        if (!probe.good()) return;  // fresh cache file
        const auto report = store.load(path);
        for (const auto& issue : report.issues) {
            std::cerr << "cache " << path << ": line " << issue.line << ": " << issue.message
                      << "\n";
        }
    }

    ResultStore* ptr() { return path.empty() ? nullptr : &store; }

    void persist() {
        if (!path.empty()) store.save(path);
    }
};

// ---------------------------------------------------------------- dim ----

int run_dim(const SystemSpec& spec, const CommonFlags& flags) {
    validate_prime(flags.prime);
    if (spec.d < 0 || spec.m < 0 || spec.n < 0) {
        throw CLI::ValidationError("dim", "d, m, n must be non-negative");
    }
    if (flags.trials < 1) throw CLI::ValidationError("dim", "--trials must be >= 1");

    const auto cfg = oracle_config(flags);
    const auto probe = probe_speciality(spec, cfg);

    const std::int64_t virt = virtual_dim(spec);
    const std::int64_t proj = expected_proj_dim(spec);
    const VecDim vec = expected_vec_dim(spec);
    const VecDim actual = probe.primary.certified_nonspecial || !probe.secondary
                              ? probe.primary.vec_dim
                              : std::min(probe.primary.vec_dim, probe.secondary->vec_dim);

    std::ostringstream out;
    if (flags.format == "json") {
        json doc{{"spec", {{"d", spec.d}, {"m", spec.m}, {"n", spec.n}}},
                 {"virtual", virt},
                 {"expected_proj", proj},
                 {"expected_vec", vec.value},
                 {"oracle_vec", actual.value},
                 {"oracle_proj", actual.value - 1},
                 {"status", to_string(probe.status)},
                 {"gap", probe.gap},
                 {"prime", probe.primary.prime},
                 {"trials", probe.primary.trials_run},
                 {"seed", probe.primary.seed}};
        if (probe.secondary) doc["second_prime"] = probe.secondary->prime;
        out << doc.dump(2) << "\n";
    } else if (flags.format == "csv") {
        out << "d,m,n,virtual,expected_vec,oracle_vec,status,cert_method,wall_time_ms,error\n";
        out << spec.d << "," << spec.m << "," << spec.n << "," << virt << "," << vec.value
            << "," << actual.value << "," << to_string(probe.status) << ","
            << (probe.status == Speciality::NonSpecialCertified ? "oracle" : "") << ",0,\n";
    } else {
        out << "system              " << to_string(spec) << "\n";
        out << "virtual dim         " << virt << "\n";
        out << "expected proj dim   " << proj << "\n";
        out << "expected vec dim    " << vec.value << "\n";
        out << "oracle vec dim      " << actual.value << "\n";
        out << "oracle proj dim     " << actual.value - 1 << "\n";
        out << "status              " << to_string(probe.status);
        if (probe.status == Speciality::ProbablySpecial) out << " (gap " << probe.gap << ")";
        out << "\n";
        out << "prime(s)            " << probe.primary.prime;
        if (probe.secondary) out << ", " << probe.secondary->prime;
        out << "\n";
        out << "trials, seed        " << probe.primary.trials_run << ", "
            << probe.primary.seed << "\n";
    }
    emit(out.str(), flags.out_path);

    switch (probe.status) {
        case Speciality::NonSpecialCertified: return kExitOk;
        case Speciality::ProbablySpecial: return kExitProbablySpecial;
        case Speciality::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

// ------------------------------------------------------------ certify ----

void print_certificate_tree(const Certificate& cert, int depth, std::ostream& out) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(cert.spec)
        << "  " << method_name(cert);
    if (const auto* witness = std::get_if<OracleWitness>(&cert.method)) {
        out << " prime=" << witness->prime << " seed=" << witness->seed
            << " trial=" << witness->trial_index;
        out << " dim=" << expected_vec_dim(cert.spec).value;
    } else if (const auto* step = std::get_if<DegenerationStep>(&cert.method)) {
        out << " n1=" << step->n1 << " n2=" << step->n2 << " k=" << step->k
            << " case=" << to_string(step->label) << " dim_L0=" << step->dim_l0.value;
    }
    out << "\n";
    if (const auto* step = std::get_if<DegenerationStep>(&cert.method)) {
        for (const auto& sub : step->subs) print_certificate_tree(sub, depth + 1, out);
    }
}

int run_certify(const SystemSpec& spec, const CommonFlags& flags,
                const std::vector<std::int64_t>& factor) {
    validate_prime(flags.prime);
    if (spec.m < 0 || spec.n < 0) {
        throw CLI::ValidationError("certify", "m and n must be non-negative");
    }

    CertPolicy policy;
    policy.oracle = oracle_config(flags);
    if (!factor.empty()) {
        policy.fixed_split = FixedSplit{factor[0], factor[1]};
    }

    StoreHandle cache(flags.cache_path);
    const auto result = certify(spec, policy, cache.ptr());
    cache.persist();

    if (!result.ok()) {
        std::cerr << "certification failed: " << result.error << "\n";
        return kExitCertFailure;
    }

    const auto& cert = *result.certificate;
    print_certificate_tree(cert, 0, std::cout);

    std::string out_path = flags.out_path;
    if (out_path.empty()) {
        std::ostringstream name;
        name << "cert_d" << spec.d << "_m" << spec.m << "_n" << spec.n << ".json";
        out_path = name.str();
    }
    {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output path " + out_path);
        out << certificate_to_json(cert) << "\n";
    }
    std::cout << "certificate written to " << out_path << "\n";

    const auto verified = verify_certificate(cert);
    if (!verified) {
        std::cerr << "verification failed: " << verified.reason << "\n";
        return kExitCertFailure;
    }
    std::cout << "verified: dim " << expected_vec_dim(spec).value << " = expected ("
              << certificate_size(cert) << " nodes)\n";
    return kExitOk;
}

// -------------------------------------------------------------- sweep ----

struct SweepRow {
    SystemSpec spec;
    std::int64_t virt = 0;
    std::int64_t expected_vec = 0;
    std::optional<std::int64_t> oracle_vec;
    std::string status = "Unknown";
    std::string cert_method;
    double wall_ms = 0.0;
    std::string error;
};

SweepRow run_sweep_row(const SystemSpec& spec, const CertPolicy& policy, ResultStore* store) {
    SweepRow row;
    row.spec = spec;
    const auto start = std::chrono::steady_clock::now();
    try {
        row.virt = virtual_dim(spec);
        row.expected_vec = expected_vec_dim(spec).value;

        const auto result = certify(spec, policy, store);
        const bool oracle_allowed = binom(spec.d + 2, 2) <= policy.max_oracle_cols &&
                                    policy.oracle.trials >= 1;
        if (result.ok()) {
            row.status = to_string(Speciality::NonSpecialCertified);
            row.cert_method = method_name(*result.certificate);
            if (oracle_allowed) {
                row.oracle_vec = oracle_dim(spec, policy.oracle).vec_dim.value;
            }
        } else if (oracle_allowed) {
            const auto probe = probe_speciality(spec, policy.oracle);
            row.oracle_vec = probe.primary.vec_dim.value;
            row.status = to_string(probe.status);
            if (probe.status == Speciality::NonSpecialCertified) row.cert_method = "oracle";
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.status = "Error";
    }
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return row;
}

std::string render_sweep(const std::vector<SweepRow>& rows, const std::string& format) {
    std::ostringstream out;
    if (format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            json doc{{"d", row.spec.d},
                     {"m", row.spec.m},
                     {"n", row.spec.n},
                     {"virtual", row.virt},
                     {"expected_vec", row.expected_vec},
                     {"status", row.status},
                     {"cert_method", row.cert_method},
                     {"wall_time_ms", std::llround(row.wall_ms)},
                     {"error", row.error}};
            if (row.oracle_vec) doc["oracle_vec"] = *row.oracle_vec;
            arr.push_back(std::move(doc));
        }
        out << arr.dump(2) << "\n";
        return out.str();
    }

    const bool table = format == "table";
    out << "d,m,n,virtual,expected_vec,oracle_vec,status,cert_method,wall_time_ms,error\n";
    for (const auto& row : rows) {
        out << row.spec.d << "," << row.spec.m << "," << row.spec.n << "," << row.virt << ","
            << row.expected_vec << ","
            << (row.oracle_vec ? std::to_string(*row.oracle_vec) : std::string{}) << ","
            << row.status << "," << row.cert_method << "," << std::llround(row.wall_ms) << ","
            << csv_escape(row.error) << "\n";
    }
    if (table) {
        // The pinned CSV column set doubles as the table; keep them identical.
    }
    return out.str();
}

struct Range {
    std::int64_t lo = 0;
    std::int64_t hi = -1;  // empty by default
};

Range parse_range(const std::string& text) {
    Range range;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        range.lo = range.hi = std::stoll(text);
    } else {
        range.lo = std::stoll(text.substr(0, colon));
        range.hi = std::stoll(text.substr(colon + 1));
    }
    if (range.lo < 0) throw CLI::ValidationError("sweep", "ranges must be non-negative");
    return range;
}

int run_sweep(const std::string& d_text, const std::string& m_text, const std::string& n_text,
              const std::string& family_text, const CommonFlags& flags,
              const std::vector<std::int64_t>& factor, int jobs) {
    validate_prime(flags.prime);

    CertPolicy policy;
    policy.oracle = oracle_config(flags);

    std::vector<std::int64_t> point_counts;
    if (!family_text.empty()) {
        const auto family = parse_family(family_text);
        if (!family) {
            throw CLI::ValidationError("sweep",
                                       "--family must be 4^h, 9^h or 4^h*9^k, got " +
                                           family_text);
        }
        point_counts.push_back(family->point_count());
        switch (family->kind) {
            case FamilyKind::FourPow: policy.peel_bases = {4}; break;
            case FamilyKind::NinePow: policy.peel_bases = {9}; break;
            case FamilyKind::Mixed: policy.peel_bases = {9, 4}; break;
        }
    } else if (!n_text.empty()) {
        std::stringstream stream(n_text);
        std::string item;
        while (std::getline(stream, item, ',')) point_counts.push_back(std::stoll(item));
    } else {
        throw CLI::ValidationError("sweep", "either --n or --family is required");
    }

    const Range d_range = parse_range(d_text);
    const Range m_range = parse_range(m_text);

    std::vector<SystemSpec> specs;
    for (std::int64_t d = d_range.lo; d <= d_range.hi; ++d) {
        for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) {
            for (const std::int64_t n : point_counts) specs.push_back({d, m, n});
        }
    }

    StoreHandle cache(flags.cache_path);
    std::vector<SweepRow> rows(specs.size());

    const auto worker_policy = [&](const SystemSpec& spec) {
        CertPolicy row_policy = policy;
        if (!factor.empty() && factor[0] * factor[1] == spec.n) {
            row_policy.fixed_split = FixedSplit{factor[0], factor[1]};
        }
        return row_policy;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t thread_count =
        std::min<std::size_t>(jobs > 0 ? static_cast<std::size_t>(jobs) : hw, specs.size());
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
            rows[i] = run_sweep_row(specs[i], worker_policy(specs[i]), cache.ptr());
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < specs.size();
                     i = next.fetch_add(1)) {
                    rows[i] = run_sweep_row(specs[i], worker_policy(specs[i]), cache.ptr());
                }
            });
        }
        for (auto& thread : pool) thread.join();
    }
    cache.persist();

    emit(render_sweep(rows, flags.format), flags.out_path);

    for (const auto& row : rows) {
        if (!row.error.empty()) return kExitUsage;
    }
    return kExitOk;
}

// ------------------------------------------------------------ selftest ----

int run_selftest(const CommonFlags& flags, bool quick, bool inject_defect) {
    validate_prime(flags.prime);
    SelfcheckOptions options;
    options.quick = quick;
    options.inject_claim2_defect = inject_defect;
    options.seed = resolve_seed(flags.seed_text);

    const auto results = run_selfcheck(options);
    std::string first_failure;
    for (const auto& result : results) {
        std::cout << "[" << (result.pass ? "PASS" : "FAIL") << "] " << result.name << " ("
                  << std::llround(result.wall_ms) << " ms)";
        if (!result.detail.empty()) std::cout << " -- " << result.detail;
        std::cout << "\n";
        if (!result.pass && first_failure.empty()) first_failure = result.name;
    }
    if (!first_failure.empty()) {
        std::cerr << "selftest failed: " << first_failure << "\n";
        return kExitUsage;
    }
    std::cout << "selftest: all checks passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimensions and non-speciality certificates for homogeneous linear "
                 "systems of plane curves L_d(m^n)"};
    app.require_subcommand(1);

    // dim
    CommonFlags dim_flags;
    SystemSpec dim_spec;
    auto* dim_cmd = app.add_subcommand("dim", "Compute dimensions of L_d(m^n)");
    dim_cmd->add_option("d", dim_spec.d, "degree")->required();
    dim_cmd->add_option("m", dim_spec.m, "multiplicity")->required();
    dim_cmd->add_option("n", dim_spec.n, "point count")->required();
    add_common_flags(dim_cmd, dim_flags);

    // certify
    CommonFlags certify_flags;
    SystemSpec certify_spec;
    std::vector<std::int64_t> certify_factor;
    auto* certify_cmd =
        app.add_subcommand("certify", "Build and verify a non-speciality certificate");
    certify_cmd->add_option("d", certify_spec.d, "degree")->required();
    certify_cmd->add_option("m", certify_spec.m, "multiplicity")->required();
    certify_cmd->add_option("n", certify_spec.n, "point count")->required();
    certify_cmd->add_option("--factor", certify_factor, "Force the split n = N1 * N2")
        ->expected(2);
    add_common_flags(certify_cmd, certify_flags);

    // sweep
    CommonFlags sweep_flags;
    std::string sweep_d = "0:0";
    std::string sweep_m = "1:1";
    std::string sweep_n;
    std::string sweep_family;
    std::vector<std::int64_t> sweep_factor;
    int sweep_jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate a grid of systems");
    sweep_cmd->add_option("--d", sweep_d, "degree range LO:HI or single value");
    sweep_cmd->add_option("--m", sweep_m, "multiplicity range LO:HI or single value");
    sweep_cmd->add_option("--n", sweep_n, "comma-separated point counts");
    sweep_cmd->add_option("--family", sweep_family, "point-count family 4^h, 9^h or 4^h*9^k");
    sweep_cmd->add_option("--factor", sweep_factor, "Force the split for matching n")
        ->expected(2);
    sweep_cmd->add_option("--jobs", sweep_jobs, "Worker threads (default: hardware)");
    add_common_flags(sweep_cmd, sweep_flags);

    // selftest
    CommonFlags selftest_flags;
    bool quick = false;
    bool inject_defect = false;
    auto* selftest_cmd =
        app.add_subcommand("selftest", "Run the invariant grids and acceptance checks");
    selftest_cmd->add_flag("--quick", quick, "Reduced grids");
    selftest_cmd->add_flag("--inject-claim2-defect", inject_defect,
                           "Test hook: corrupt the cross-check table")
        ->group("");
    add_common_flags(selftest_cmd, selftest_flags);

    try {
        app.parse(argc, argv);
        if (dim_cmd->parsed()) return run_dim(dim_spec, dim_flags);
        if (certify_cmd->parsed()) return run_certify(certify_spec, certify_flags, certify_factor);
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_d, sweep_m, sweep_n, sweep_family, sweep_flags,
                             sweep_factor, sweep_jobs);
        }
        if (selftest_cmd->parsed()) return run_selftest(selftest_flags, quick, inject_defect);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

#include "fatpoint/certifier.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fatpoint/store.hpp"

namespace fatpoint {

namespace {

using nlohmann::json;

std::int64_t matrix_cells(const SystemSpec& spec) {
    return conditions_count(spec.m, spec.n) * binom(spec.d + 2, 2);
}

CaseLabel case_from_string(const std::string& text) {
    for (CaseLabel label : {CaseLabel::I, CaseLabel::II, CaseLabel::III, CaseLabel::IV,
                            CaseLabel::A, CaseLabel::None}) {
        if (text == to_string(label)) return label;
    }
    throw std::runtime_error("unknown case label '" + text + "'");
}

std::string path_suffix(const std::vector<SystemSpec>& path) {
    if (path.empty()) return {};
    std::ostringstream out;
    out << " [path:";
    for (const auto& spec : path) out << " " << to_string(spec);
    out << "]";
    return out.str();
}

struct Context {
    const CertPolicy& policy;
    ResultStore* store;
    std::map<SystemSpec, Certificate> run_cache;     // successes from this run
    std::map<SystemSpec, std::string> failed_cache;  // dead ends from this run
};

CertifyResult certify_node(const SystemSpec& spec, Context& ctx, int depth,
                           std::vector<SystemSpec>& path);

CertifyResult fail(std::string reason) { return CertifyResult{std::nullopt, std::move(reason)}; }

// Splits to try for this node: the forced root split, or factor_pairs with
// the policy's peel bases moved to the front.
std::vector<std::pair<std::int64_t, std::int64_t>> split_order(const SystemSpec& spec,
                                                               const Context& ctx, int depth) {
    if (depth == 0 && ctx.policy.fixed_split) {
        return {{ctx.policy.fixed_split->n1, ctx.policy.fixed_split->n2}};
    }
    auto pairs = factor_pairs(spec.n);
    std::vector<std::pair<std::int64_t, std::int64_t>> ordered;
    for (std::int64_t base : ctx.policy.peel_bases) {
        if (base < 2 || spec.n % base != 0) continue;
        const std::pair<std::int64_t, std::int64_t> peel{spec.n / base, base};
        if (peel.first < 2) continue;
        if (std::find(ordered.begin(), ordered.end(), peel) == ordered.end()) {
            ordered.push_back(peel);
        }
    }
    for (const auto& pair : pairs) {
        if (std::find(ordered.begin(), ordered.end(), pair) == ordered.end()) {
            ordered.push_back(pair);
        }
    }
    return ordered;
}

std::optional<Certificate> try_oracle(const SystemSpec& spec, Context& ctx, std::string& note) {
    const auto& cfg = ctx.policy.oracle;
    const std::int64_t cols = binom(spec.d + 2, 2);
    if (cfg.trials < 1) {
        note = "oracle disabled (trials = " + std::to_string(cfg.trials) + ")";
        return std::nullopt;
    }
    if (cols > ctx.policy.max_oracle_cols) {
        note = "oracle too large (" + std::to_string(cols) + " cols > budget " +
               std::to_string(ctx.policy.max_oracle_cols) + ")";
        return std::nullopt;
    }
    if (cfg.prime <= spec.d) {
        note = "oracle unavailable (prime " + std::to_string(cfg.prime) + " <= degree)";
        return std::nullopt;
    }
    const OracleResult result = oracle_dim(spec, cfg);
    if (!result.certified_nonspecial) {
        note = "oracle found vec dim " + std::to_string(result.vec_dim.value) + " > expected " +
               std::to_string(expected_vec_dim(spec).value) + " after " +
               std::to_string(result.trials_run) + " trial(s)";
        return std::nullopt;
    }
    return Certificate{spec, OracleWitness{result.prime, result.seed, result.witness_trial}};
}

std::optional<Certificate> try_degeneration(const SystemSpec& spec, Context& ctx, int depth,
                                            std::vector<SystemSpec>& path, std::string& note) {
    if (spec.m < 1) {
        note = "degeneration requires m >= 1";
        return std::nullopt;
    }
    if (depth >= ctx.policy.max_depth) {
        note = "depth exceeded (max_depth = " + std::to_string(ctx.policy.max_depth) + ")";
        return std::nullopt;
    }
    const auto splits = split_order(spec, ctx, depth);
    if (splits.empty()) {
        note = "no factorization";
        return std::nullopt;
    }

    const VecDim expected = expected_vec_dim(spec);
    std::string last_failure;
    for (const auto& [n1, n2] : splits) {
        if (n1 < 2 || n2 < 2 || n1 * n2 != spec.n) {
            last_failure = "split " + std::to_string(n1) + "*" + std::to_string(n2) +
                           " does not factor n = " + std::to_string(spec.n);
            continue;
        }
        for (const std::int64_t k : select_k(spec.m, n2).candidates) {
            const VecDim lim = limit_system_dim(spec.d, k, spec.m, n1, n2);
            const CaseLabel label = classify_case(spec.d, k, spec.m, n1, n2);
            std::ostringstream attempt;
            attempt << "split " << n1 << "*" << n2 << " k=" << k;
            if (label == CaseLabel::None || lim != expected) {
                attempt << ": limit dim " << lim.value << " (case " << to_string(label)
                        << ") != expected " << expected.value;
                last_failure = attempt.str();
                continue;
            }

            const auto subspecs = degeneration_subspecs(spec, n1, n2, k);
            std::array<std::size_t, 4> order{0, 1, 2, 3};
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return matrix_cells(subspecs[a]) < matrix_cells(subspecs[b]);
            });

            std::vector<Certificate> subs(4);
            bool all_ok = true;
            for (const std::size_t idx : order) {
                CertifyResult sub = certify_node(subspecs[idx], ctx, depth + 1, path);
                if (!sub.ok()) {
                    attempt << ": sub-system certification failed: " << sub.error;
                    last_failure = attempt.str();
                    all_ok = false;
                    break;
                }
                subs[idx] = std::move(*sub.certificate);
            }
            if (!all_ok) continue;

            DegenerationStep step;
            step.n1 = n1;
            step.n2 = n2;
            step.k = k;
            step.label = label;
            step.dim_l0 = lim;
            step.subs = std::move(subs);
            return Certificate{spec, std::move(step)};
        }
    }
    note = "all factor splits failed; last: " + last_failure;
    return std::nullopt;
}

CertifyResult certify_node(const SystemSpec& spec, Context& ctx, int depth,
                           std::vector<SystemSpec>& path) {
    if (spec.m < 0 || spec.n < 0) {
        return fail("invalid spec " + to_string(spec) + path_suffix(path));
    }
    if (spec.d < 0) return CertifyResult{Certificate{spec, TrivialEmpty{}}, {}};
    if (spec.m == 0 || spec.n == 0) return CertifyResult{Certificate{spec, TrivialFull{}}, {}};

    if (const auto hit = ctx.run_cache.find(spec); hit != ctx.run_cache.end()) {
        return CertifyResult{hit->second, {}};
    }
    if (const auto miss = ctx.failed_cache.find(spec); miss != ctx.failed_cache.end()) {
        return fail(miss->second);
    }
    if (ctx.store != nullptr) {
        if (const auto entry = ctx.store->get(spec);
            entry && entry->status == Speciality::NonSpecialCertified && !entry->evidence.empty()) {
            try {
                Certificate cached = certificate_from_json(entry->evidence);
                if (cached.spec == spec && verify_certificate(cached)) {
                    auto [it, inserted] = ctx.run_cache.emplace(spec, std::move(cached));
                    return CertifyResult{it->second, {}};
                }
            } catch (const std::exception&) {
                // unusable evidence; recompute below
            }
        }
    }

    path.push_back(spec);
    std::string oracle_note;
    std::string degen_note;
    std::optional<Certificate> cert;

    const bool oracle_first =
        !(depth == 0 && ctx.policy.fixed_split) && spec.n <= ctx.policy.oracle_first_max_n;
    if (oracle_first) {
        cert = try_oracle(spec, ctx, oracle_note);
        if (!cert) cert = try_degeneration(spec, ctx, depth, path, degen_note);
    } else {
        cert = try_degeneration(spec, ctx, depth, path, degen_note);
        if (!cert) cert = try_oracle(spec, ctx, oracle_note);
    }
    path.pop_back();

    if (!cert) {
        std::ostringstream msg;
        msg << "certify " << to_string(spec) << ": " << degen_note << "; " << oracle_note
            << path_suffix(path);
        auto result = fail(msg.str());
        ctx.failed_cache.emplace(spec, result.error);
        return result;
    }

    if (ctx.store != nullptr) {
        CacheEntry entry;
        entry.spec = spec;
        entry.status = Speciality::NonSpecialCertified;
        entry.evidence = certificate_to_json(*cert, -1);
        ctx.store->put(std::move(entry));
    }
    const auto [it, inserted] = ctx.run_cache.emplace(spec, std::move(*cert));
    return CertifyResult{it->second, {}};
}

json node_to_json(const Certificate& cert) {
    json doc;
    doc["spec"] = {{"d", cert.spec.d}, {"m", cert.spec.m}, {"n", cert.spec.n}};
    doc["method"] = method_name(cert);
    if (const auto* witness = std::get_if<OracleWitness>(&cert.method)) {
        doc["prime"] = witness->prime;
        doc["seed"] = witness->seed;
        doc["trial_index"] = witness->trial_index;
    } else if (const auto* step = std::get_if<DegenerationStep>(&cert.method)) {
        doc["n1"] = step->n1;
        doc["n2"] = step->n2;
        doc["k"] = step->k;
        doc["case"] = to_string(step->label);
        doc["dim_L0"] = step->dim_l0.value;
        json children = json::array();
        for (const auto& sub : step->subs) children.push_back(node_to_json(sub));
        doc["children"] = std::move(children);
    }
    return doc;
}

Certificate node_from_json(const json& doc) {
    Certificate cert;
    const auto& spec = doc.at("spec");
    cert.spec = SystemSpec{spec.at("d").get<std::int64_t>(), spec.at("m").get<std::int64_t>(),
                           spec.at("n").get<std::int64_t>()};
    const auto method = doc.at("method").get<std::string>();
    if (method == "trivial_empty") {
        cert.method = TrivialEmpty{};
    } else if (method == "trivial_full") {
        cert.method = TrivialFull{};
    } else if (method == "oracle") {
        OracleWitness witness;
        witness.prime = doc.at("prime").get<std::int64_t>();
        witness.seed = doc.at("seed").get<std::uint64_t>();
        witness.trial_index = doc.at("trial_index").get<int>();
        cert.method = witness;
    } else if (method == "degeneration") {
        DegenerationStep step;
        step.n1 = doc.at("n1").get<std::int64_t>();
        step.n2 = doc.at("n2").get<std::int64_t>();
        step.k = doc.at("k").get<std::int64_t>();
        step.label = case_from_string(doc.at("case").get<std::string>());
        step.dim_l0 = VecDim{doc.at("dim_L0").get<std::int64_t>()};
        const auto& children = doc.at("children");
        if (!children.is_array() || children.size() != 4) {
            throw std::runtime_error("degeneration node must carry exactly 4 children");
        }
        for (const auto& child : children) step.subs.push_back(node_from_json(child));
        cert.method = std::move(step);
    } else {
        throw std::runtime_error("unknown certificate method '" + method + "'");
    }
    return cert;
}

VerifyResult verify_node(const Certificate& cert, std::vector<SystemSpec>& path) {
    path.push_back(cert.spec);
    const auto located = [&](const std::string& why) {
        VerifyResult r;
        r.ok = false;
        r.reason = to_string(cert.spec) + ": " + why + path_suffix(path);
        path.pop_back();
        return r;
    };
    const auto pass = [&]() {
        path.pop_back();
        return VerifyResult{true, {}};
    };

    if (cert.spec.m < 0 || cert.spec.n < 0) return located("invalid spec");

    if (std::holds_alternative<TrivialEmpty>(cert.method)) {
        if (cert.spec.d >= 0) return located("trivial_empty requires a negative degree");
        return pass();
    }
    if (std::holds_alternative<TrivialFull>(cert.method)) {
        if (cert.spec.m != 0 && cert.spec.n != 0) {
            return located("trivial_full requires m = 0 or n = 0");
        }
        return pass();
    }
    if (const auto* witness = std::get_if<OracleWitness>(&cert.method)) {
        if (cert.spec.d < 0) return located("oracle witness requires d >= 0");
        if (witness->trial_index < 0) return located("negative trial index");
        VecDim achieved;
        try {
            achieved = witnessed_vec_dim(cert.spec, witness->prime, witness->seed,
                                         witness->trial_index);
        } catch (const std::exception& e) {
            return located(std::string("witness replay failed: ") + e.what());
        }
        const VecDim expected = expected_vec_dim(cert.spec);
        if (achieved != expected) {
            return located("witness rank mismatch: trial gives vec dim " +
                           std::to_string(achieved.value) + ", expected " +
                           std::to_string(expected.value));
        }
        return pass();
    }

    const auto& step = std::get<DegenerationStep>(cert.method);
    if (cert.spec.d < 0) return located("degeneration requires d >= 0");
    if (cert.spec.m < 1) return located("degeneration requires m >= 1");
    if (step.n1 < 2 || step.n2 < 2 || step.n1 * step.n2 != cert.spec.n) {
        return located("invalid factorization " + std::to_string(step.n1) + "*" +
                       std::to_string(step.n2));
    }
    const auto selection = select_k(cert.spec.m, step.n2);
    if (std::find(selection.candidates.begin(), selection.candidates.end(), step.k) ==
        selection.candidates.end()) {
        return located("k = " + std::to_string(step.k) + " outside the admissible bracket");
    }
    const VecDim expected = expected_vec_dim(cert.spec);
    const VecDim lim = limit_system_dim(cert.spec.d, step.k, cert.spec.m, step.n1, step.n2);
    if (step.dim_l0 != lim) {
        return located("stored limit dimension " + std::to_string(step.dim_l0.value) +
                       " != recomputed " + std::to_string(lim.value));
    }
    if (lim != expected) {
        return located("limit dimension " + std::to_string(lim.value) + " != expected " +
                       std::to_string(expected.value));
    }
    const CaseLabel label =
        classify_case(cert.spec.d, step.k, cert.spec.m, step.n1, step.n2);
    if (label == CaseLabel::None || label != step.label) {
        return located(std::string("case label mismatch: stored ") + to_string(step.label) +
                       ", derived " + to_string(label));
    }
    if (step.subs.size() != 4) return located("degeneration node must carry 4 sub-certificates");
    const auto subspecs = degeneration_subspecs(cert.spec, step.n1, step.n2, step.k);
    for (std::size_t i = 0; i < 4; ++i) {
        if (step.subs[i].spec != subspecs[i]) {
            return located("sub-certificate " + std::to_string(i) + " proves " +
                           to_string(step.subs[i].spec) + ", wanted " + to_string(subspecs[i]));
        }
    }
    for (const auto& sub : step.subs) {
        VerifyResult child = verify_node(sub, path);
        if (!child.ok) {
            path.pop_back();
            return child;
        }
    }
    return pass();
}

}  // namespace

const char* method_name(const Certificate& cert) {
    if (std::holds_alternative<TrivialEmpty>(cert.method)) return "trivial_empty";
    if (std::holds_alternative<TrivialFull>(cert.method)) return "trivial_full";
    if (std::holds_alternative<OracleWitness>(cert.method)) return "oracle";
    return "degeneration";
}

std::size_t certificate_size(const Certificate& cert) {
    std::size_t count = 1;
    if (const auto* step = std::get_if<DegenerationStep>(&cert.method)) {
        for (const auto& sub : step->subs) count += certificate_size(sub);
    }
    return count;
}

std::array<SystemSpec, 4> degeneration_subspecs(const SystemSpec& spec, std::int64_t n1,
                                                std::int64_t n2, std::int64_t k) {
    return {SystemSpec{spec.d, k + 1, n1}, SystemSpec{spec.d, k, n1},
            SystemSpec{k - 1, spec.m, n2}, SystemSpec{k, spec.m, n2}};
}

std::vector<std::pair<std::int64_t, std::int64_t>> factor_pairs(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("factor_pairs: point count must be >= 1");
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t n1 = 2; n1 * 2 <= n; ++n1) {
        if (n % n1 == 0) pairs.emplace_back(n1, n / n1);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        const auto max_a = std::max(a.first, a.second);
        const auto max_b = std::max(b.first, b.second);
        if (max_a != max_b) return max_a < max_b;
        return a.first < b.first;
    });
    return pairs;
}

CertifyResult certify(const SystemSpec& spec, const CertPolicy& policy, ResultStore* store) {
    if (policy.fixed_split) {
        const auto& split = *policy.fixed_split;
        if (split.n1 < 2 || split.n2 < 2 || split.n1 * split.n2 != spec.n) {
            return fail("fixed split " + std::to_string(split.n1) + "*" +
                        std::to_string(split.n2) + " does not factor n = " +
                        std::to_string(spec.n) + " into parts >= 2");
        }
    }
    if (policy.max_depth < 1) return fail("policy max_depth must be >= 1");
    Context ctx{policy, store, {}, {}};
    std::vector<SystemSpec> path;
    return certify_node(spec, ctx, 0, path);
}

VerifyResult verify_certificate(const Certificate& cert) {
    std::vector<SystemSpec> path;
    return verify_node(cert, path);
}

std::string certificate_to_json(const Certificate& cert, int indent) {
    json doc = node_to_json(cert);
    doc["version"] = "cert-v1";
    return doc.dump(indent);
}

Certificate certificate_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.value("version", std::string{}) != "cert-v1") {
        throw std::runtime_error("certificate document is not cert-v1");
    }
    return node_from_json(doc);
}

std::int64_t Family::point_count() const {
    std::int64_t n = 1;
    const auto pow_into = [&n](std::int64_t base, std::int64_t e) {
        for (std::int64_t i = 0; i < e; ++i) n *= base;
    };
    switch (kind) {
        case FamilyKind::FourPow: pow_into(4, h); break;
        case FamilyKind::NinePow: pow_into(9, h); break;
        case FamilyKind::Mixed:
            pow_into(4, h);
            pow_into(9, k);
            break;
    }
    return n;
}

std::string Family::name() const {
    std::ostringstream out;
    switch (kind) {
        case FamilyKind::FourPow: out << "4^" << h; break;
        case FamilyKind::NinePow: out << "9^" << h; break;
        case FamilyKind::Mixed: out << "4^" << h << "*9^" << k; break;
    }
    return out.str();
}

std::optional<Family> parse_family(const std::string& text) {
    static const std::regex four(R"(^4\^(\d+)$)");
    static const std::regex nine(R"(^9\^(\d+)$)");
    static const std::regex mixed(R"(^4\^(\d+)\*9\^(\d+)$)");
    std::smatch match;
    if (std::regex_match(text, match, four)) {
        return Family{FamilyKind::FourPow, std::stoll(match[1]), 0};
    }
    if (std::regex_match(text, match, nine)) {
        return Family{FamilyKind::NinePow, std::stoll(match[1]), 0};
    }
    if (std::regex_match(text, match, mixed)) {
        return Family{FamilyKind::Mixed, std::stoll(match[1]), std::stoll(match[2])};
    }
    return std::nullopt;
}

std::vector<PresetRow> preset_family(const Family& family, std::int64_t d_max,
                                     std::int64_t m_max, const CertPolicy& policy,
                                     ResultStore* store) {
    CertPolicy preset_policy = policy;
    switch (family.kind) {
        case FamilyKind::FourPow: preset_policy.peel_bases = {4}; break;
        case FamilyKind::NinePow: preset_policy.peel_bases = {9}; break;
        case FamilyKind::Mixed: preset_policy.peel_bases = {9, 4}; break;
    }
    const std::int64_t n = family.point_count();

    std::vector<PresetRow> rows;
    for (std::int64_t d = 0; d <= d_max; ++d) {
        for (std::int64_t m = 1; m <= m_max; ++m) {
            PresetRow row;
            row.spec = SystemSpec{d, m, n};
            const auto start = std::chrono::steady_clock::now();
            const CertifyResult result = certify(row.spec, preset_policy, store);
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
            if (result.ok()) {
                row.certified = true;
                row.method = method_name(*result.certificate);
                row.cert_nodes = certificate_size(*result.certificate);
            } else {
                row.error = result.error;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace fatpoint

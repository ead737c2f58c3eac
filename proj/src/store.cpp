#include "fatpoint/store.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fatpoint {

namespace {

using nlohmann::json;

std::string now_utc_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

Speciality status_from_string(const std::string& text) {
    if (text == "NonSpecialCertified") return Speciality::NonSpecialCertified;
    if (text == "ProbablySpecial") return Speciality::ProbablySpecial;
    if (text == "Unknown") return Speciality::Unknown;
    throw std::runtime_error("unknown status '" + text + "'");
}

json entry_to_json(const CacheEntry& entry) {
    json doc{
        {"spec", {{"d", entry.spec.d}, {"m", entry.spec.m}, {"n", entry.spec.n}}},
        {"status", to_string(entry.status)},
        {"created_at", entry.created_at},
    };
    if (entry.status == Speciality::ProbablySpecial) doc["gap"] = entry.gap;
    if (!entry.evidence.empty()) doc["evidence"] = json::parse(entry.evidence);
    return doc;
}

CacheEntry entry_from_json(const json& doc) {
    CacheEntry entry;
    const auto& spec = doc.at("spec");
    entry.spec = SystemSpec{spec.at("d").get<std::int64_t>(), spec.at("m").get<std::int64_t>(),
                            spec.at("n").get<std::int64_t>()};
    entry.status = status_from_string(doc.at("status").get<std::string>());
    entry.gap = doc.value("gap", std::int64_t{0});
    entry.created_at = doc.value("created_at", std::string{});
    if (doc.contains("evidence")) entry.evidence = doc.at("evidence").dump();
    return entry;
}

// Strictness order for the no-downgrade rule.
int strength(Speciality s) {
    switch (s) {
        case Speciality::NonSpecialCertified: return 2;
        case Speciality::ProbablySpecial: return 1;
        case Speciality::Unknown: return 0;
    }
    return 0;
}

}  // namespace

std::optional<CacheEntry> ResultStore::get(const SystemSpec& spec) const {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(spec);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResultStore::put(CacheEntry entry) {
    if (entry.spec.m < 0 || entry.spec.n < 0) {
        throw std::invalid_argument("ResultStore::put: invalid spec " + to_string(entry.spec));
    }
    if (entry.status == Speciality::NonSpecialCertified && entry.evidence.empty()) {
        throw std::invalid_argument("ResultStore::put: NonSpecial entry for " +
                                    to_string(entry.spec) + " lacks evidence");
    }
    if (entry.created_at.empty()) entry.created_at = now_utc_iso8601();

    std::lock_guard lock(mutex_);
    const auto it = entries_.find(entry.spec);
    if (it != entries_.end() && strength(it->second.status) > strength(entry.status)) {
        return;  // never downgrade
    }
    entries_[entry.spec] = std::move(entry);
}

std::size_t ResultStore::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void ResultStore::save(const std::string& path) const {
    std::map<SystemSpec, CacheEntry> snapshot;
    {
        std::lock_guard lock(mutex_);
        snapshot = entries_;
    }

    const std::string tmp_path = path + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::trunc);
        if (!out) throw std::runtime_error("ResultStore::save: cannot open " + tmp_path);
        out << json{{"store", "fatpoint-cache"}, {"version", 1}}.dump() << '\n';
        for (const auto& [spec, entry] : snapshot) {
            out << entry_to_json(entry).dump() << '\n';
        }
        if (!out) throw std::runtime_error("ResultStore::save: write failed for " + tmp_path);
    }
    if (std::rename(tmp_path.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("ResultStore::save: cannot rename " + tmp_path + " to " + path);
    }
}

LoadReport ResultStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ResultStore::load: cannot open " + path);

    LoadReport report;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) {
        throw std::runtime_error("ResultStore::load: " + path + " is empty (missing header)");
    }
    ++line_no;
    try {
        const json header = json::parse(line);
        if (header.value("store", std::string{}) != "fatpoint-cache") {
            throw std::runtime_error("not a fatpoint-cache file");
        }
        if (header.value("version", 0) != 1) {
            throw std::runtime_error("unsupported version");
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("ResultStore::load: bad header in " + path + ": " + e.what());
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            put(entry_from_json(json::parse(line)));
            ++report.entries_loaded;
        } catch (const std::exception& e) {
            report.issues.push_back({line_no, e.what()});
        }
    }
    return report;
}

}  // namespace fatpoint

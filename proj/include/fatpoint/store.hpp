#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fatpoint/dimension.hpp"
#include "fatpoint/oracle.hpp"

namespace fatpoint {

/// One memoized result, keyed by (d, m, n). NonSpecial entries always carry
/// evidence: a cert-v1 certificate document. Prime and seed provenance live
/// inside the evidence, so differing witnesses merge into one status.
struct CacheEntry {
    SystemSpec spec;
    Speciality status = Speciality::Unknown;
    std::int64_t gap = 0;      // vec_dim - expected, for ProbablySpecial
    std::string evidence;      // JSON text; required for NonSpecial
    std::string created_at;    // ISO-8601 UTC, filled by put() when empty
};

struct LoadIssue {
    int line = 0;
    std::string message;
};

struct LoadReport {
    std::size_t entries_loaded = 0;
    std::vector<LoadIssue> issues;  // malformed lines, reported not skipped silently
};

/// In-memory map with JSON-lines persistence. Reads are concurrent, writes
/// serialize through the internal mutex, and save() replaces the file
/// atomically so concurrent readers of the path see a consistent snapshot.
class ResultStore {
  public:
    std::optional<CacheEntry> get(const SystemSpec& spec) const;

    /// Inserts or upgrades an entry. Throws std::invalid_argument for a
    /// NonSpecial entry without evidence. Never downgrades: an existing
    /// NonSpecial entry is not replaced by ProbablySpecial or Unknown.
    void put(CacheEntry entry);

    std::size_t size() const;

    /// Writes header + one JSON object per line, then renames over `path`.
    /// I/O failures throw std::runtime_error naming the path.
    void save(const std::string& path) const;

    /// Merges entries from a store file. Returns a report listing every
    /// malformed line. Throws std::runtime_error if the file cannot be read
    /// or its header is not a fatpoint-cache header.
    LoadReport load(const std::string& path);

  private:
    mutable std::mutex mutex_;
    std::map<SystemSpec, CacheEntry> entries_;
};

}  // namespace fatpoint

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fatpoint/store.hpp"

using namespace fatpoint;

namespace {

std::filesystem::path temp_store_path(const char* tag) {
    return std::filesystem::temp_directory_path() /
           (std::string("fatpoint_store_test_") + tag + ".jsonl");
}

CacheEntry sample_entry(std::int64_t d, Speciality status) {
    CacheEntry entry;
    entry.spec = SystemSpec{d, 1, 16};
    entry.status = status;
    if (status == Speciality::NonSpecialCertified) {
        entry.evidence = R"({"version":"cert-v1","spec":{"d":)" + std::to_string(d) +
                         R"(,"m":1,"n":16},"method":"oracle","prime":2147483647,)"
                         R"("seed":3911,"trial_index":0})";
    }
    if (status == Speciality::ProbablySpecial) entry.gap = 1;
    return entry;
}

}  // namespace

TEST_CASE("get on a fresh store is absent; put round-trips") {
    ResultStore store;
    CHECK_FALSE(store.get({4, 1, 16}).has_value());

    store.put(sample_entry(4, Speciality::NonSpecialCertified));
    const auto entry = store.get({4, 1, 16});
    REQUIRE(entry.has_value());
    CHECK(entry->status == Speciality::NonSpecialCertified);
    CHECK_FALSE(entry->evidence.empty());
    CHECK_FALSE(entry->created_at.empty());
}

TEST_CASE("NonSpecial without evidence is rejected") {
    ResultStore store;
    CacheEntry bare;
    bare.spec = SystemSpec{4, 1, 16};
    bare.status = Speciality::NonSpecialCertified;
    CHECK_THROWS_AS(store.put(bare), std::invalid_argument);
}

TEST_CASE("entries never downgrade") {
    ResultStore store;
    store.put(sample_entry(4, Speciality::NonSpecialCertified));
    store.put(sample_entry(4, Speciality::Unknown));
    CHECK(store.get({4, 1, 16})->status == Speciality::NonSpecialCertified);

    store.put(sample_entry(6, Speciality::ProbablySpecial));
    store.put(sample_entry(6, Speciality::Unknown));
    CHECK(store.get({6, 1, 16})->status == Speciality::ProbablySpecial);
    // Upgrades are allowed.
    store.put(sample_entry(6, Speciality::NonSpecialCertified));
    CHECK(store.get({6, 1, 16})->status == Speciality::NonSpecialCertified);
}

TEST_CASE("save and load round-trip") {
    const auto path = temp_store_path("roundtrip");
    ResultStore store;
    for (std::int64_t d = 0; d < 100; ++d) {
        store.put(sample_entry(d, d % 3 == 0 ? Speciality::NonSpecialCertified
                                             : Speciality::ProbablySpecial));
    }
    store.save(path.string());

    ResultStore reloaded;
    const auto report = reloaded.load(path.string());
    CHECK(report.entries_loaded == 100);
    CHECK(report.issues.empty());
    CHECK(reloaded.size() == 100);
    for (std::int64_t d = 0; d < 100; ++d) {
        const auto original = store.get({d, 1, 16});
        const auto copy = reloaded.get({d, 1, 16});
        REQUIRE(copy.has_value());
        CHECK(copy->status == original->status);
        CHECK(copy->gap == original->gap);
        CHECK(copy->created_at == original->created_at);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed lines are reported, not silently skipped") {
    const auto path = temp_store_path("malformed");
    {
        std::ofstream out(path);
        out << R"({"store":"fatpoint-cache","version":1})" << '\n';
        out << R"({"spec":{"d":3,"m":1,"n":4},"status":"Unknown","created_at":"x"})" << '\n';
        out << "this is not json" << '\n';
        out << R"({"spec":{"d":5,"m":1,"n":4},"status":"NoSuchStatus"})" << '\n';
        out << R"({"spec":{"d":7,"m":1,"n":4},"status":"Unknown"})" << '\n';
    }
    ResultStore store;
    const auto report = store.load(path.string());
    CHECK(report.entries_loaded == 2);
    REQUIRE(report.issues.size() == 2);
    CHECK(report.issues[0].line == 3);
    CHECK(report.issues[1].line == 4);
    std::filesystem::remove(path);
}

TEST_CASE("loading a non-store file fails loudly") {
    const auto path = temp_store_path("badheader");
    {
        std::ofstream out(path);
        out << R"({"something":"else"})" << '\n';
    }
    ResultStore store;
    CHECK_THROWS_AS(store.load(path.string()), std::runtime_error);
    CHECK_THROWS_AS(store.load("/nonexistent/dir/store.jsonl"), std::runtime_error);
    std::filesystem::remove(path);
}

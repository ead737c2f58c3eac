// Acceptance suite: one line per criterion, exact integer tolerances, pinned
// wall-clock budgets. Exits non-zero if any criterion fails.
#include <cstdio>

#include "fatpoint/selfcheck.hpp"

int main() {
    fatpoint::SelfcheckOptions options;  // full grids, default seed
    const auto results = fatpoint::run_acceptance(options);

    bool all_pass = true;
    for (const auto& result : results) {
        std::printf("[%s] %s (%.0f ms)%s%s\n", result.pass ? "PASS" : "FAIL",
                    result.name.c_str(), result.wall_ms,
                    result.detail.empty() ? "" : " -- ", result.detail.c_str());
        all_pass = all_pass && result.pass;
    }
    std::printf("%s\n", all_pass ? "acceptance: all criteria passed"
                                 : "acceptance: FAILURES present");
    return all_pass ? 0 : 1;
}

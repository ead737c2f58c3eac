#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fatpoint/certifier.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(FATPOINT_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer{};
    std::size_t count = 0;
    while ((count = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), count);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// Blanks the wall_time_ms column; timings are the one non-deterministic field.
std::string mask_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::string masked;
        int column = 0;
        for (const char c : line) {
            if (c == ',') {
                ++column;
                masked += c;
            } else if (column != 8) {
                masked += c;
            }
        }
        out << masked << "\n";
    }
    return out.str();
}

std::filesystem::path temp_path(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("dim reports the double-line system as probably special") {
    const auto result = run_cli("dim 2 2 2");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("ProbablySpecial") != std::string::npos);
    CHECK(result.output.find("gap 1") != std::string::npos);
}

TEST_CASE("dim certifies 16 simple points") {
    const auto result = run_cli("dim 8 1 16");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("oracle vec dim      29") != std::string::npos);
    CHECK(result.output.find("NonSpecialCertified") != std::string::npos);
}

TEST_CASE("dim with no conditions prints the full space") {
    const auto result = run_cli("dim 3 1 0");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("oracle vec dim      10") != std::string::npos);
}

TEST_CASE("composite prime is a usage error") {
    const auto result = run_cli("dim 2 2 2 --prime 91");
    CHECK(result.exit_code == 1);
}

TEST_CASE("negative degree is a usage error") {
    const auto result = run_cli("dim -1 2 2");
    CHECK(result.exit_code == 1);
}

TEST_CASE("certify writes a verifiable cert-v1 document") {
    const auto cert_path = temp_path("fatpoint_cli_cert.json");
    std::filesystem::remove(cert_path);
    const auto result =
        run_cli("certify 4 1 16 --factor 4 4 --out " + cert_path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("case=A") != std::string::npos);
    CHECK(result.output.find("dim_L0=0") != std::string::npos);

    std::ifstream in(cert_path);
    REQUIRE(in.good());
    std::stringstream text;
    text << in.rdbuf();
    const auto cert = fatpoint::certificate_from_json(text.str());
    CHECK(fatpoint::verify_certificate(cert).ok);
    CHECK(cert.spec == fatpoint::SystemSpec{4, 1, 16});
    std::filesystem::remove(cert_path);
}

TEST_CASE("certify reports k and the limit dimension") {
    const auto cert_path = temp_path("fatpoint_cli_cert2.json");
    const auto result = run_cli("certify 10 2 16 --out " + cert_path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("k=4") != std::string::npos);
    CHECK(result.output.find("dim_L0=18") != std::string::npos);
    std::filesystem::remove(cert_path);
}

TEST_CASE("certify without oracle and factorization fails with exit 4") {
    const auto result = run_cli("certify 5 2 7 --trials 0");
    CHECK(result.exit_code == 4);
}

TEST_CASE("sweep produces the pinned CSV header and deterministic rows") {
    const std::string args = "sweep --d 0:6 --m 1:2 --n 4,9 --format csv --seed 3911";
    const auto first = run_cli(args);
    CHECK(first.exit_code == 0);
    CHECK(first.output.rfind(
              "d,m,n,virtual,expected_vec,oracle_vec,status,cert_method,wall_time_ms,error",
              0) == 0);
    CHECK(first.output.find("NonSpecialCertified") != std::string::npos);
    CHECK(first.output.find("Error") == std::string::npos);

    const auto second = run_cli(args);
    CHECK(mask_wall_time(first.output) == mask_wall_time(second.output));
}

TEST_CASE("sweep flags the special row") {
    const auto result = run_cli("sweep --d 2:2 --m 2:2 --n 2 --format csv");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("ProbablySpecial") != std::string::npos);
}

TEST_CASE("empty sweep range yields a header-only table") {
    const auto result = run_cli("sweep --d 5:2 --m 1:1 --n 4 --format csv");
    CHECK(result.exit_code == 0);
    const auto masked = mask_wall_time(result.output);
    CHECK(masked ==
          "d,m,n,virtual,expected_vec,oracle_vec,status,cert_method,,error\n");
}

TEST_CASE("sweep over a family certifies every row") {
    const auto result = run_cli("sweep --family 4^1 --d 0:4 --m 1:1 --format csv");
    CHECK(result.exit_code == 0);
    std::istringstream in(result.output);
    std::string line;
    std::getline(in, line);  // header
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        CHECK(line.find(",4,") != std::string::npos);
        CHECK(line.find("NonSpecialCertified") != std::string::npos);
    }
    CHECK(rows == 5);
}

TEST_CASE("selftest quick passes and the defect hook trips it") {
    const auto ok = run_cli("selftest --quick");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("all checks passed") != std::string::npos);

    const auto bad = run_cli("selftest --quick --inject-claim2-defect");
    CHECK(bad.exit_code != 0);
    CHECK(bad.output.find("[FAIL] 7-claim-cross-check") != std::string::npos);
}

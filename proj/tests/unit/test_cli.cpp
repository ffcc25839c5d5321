#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "test_support.hpp"

using testing_support::fixture;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct Outcome {
    int status = -1;
    std::string output;
};

Outcome run_cli(const std::string& args, const TempDir& dir) {
    const auto log = dir.path() / "cli.log";
    const std::string command = std::string("\"") + SURVEYSIM_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int raw = std::system(command.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

std::string config(const std::string& name) { return "\"" + fixture(name).string() + "\""; }

}  // namespace

TEST(Cli, DryRunListsCells) {
    TempDir dir("cli-dry");
    const auto r = run_cli("simulate " + config("grid128.yaml") + " --dry-run --out-dir \"" + dir.path().string() + "\"", dir);
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("128 cells"), std::string::npos) << r.output;
}

TEST(Cli, ValidateConfig) {
    TempDir dir("cli-validate");
    EXPECT_EQ(run_cli("validate-config " + config("echo.yaml"), dir).status, 0);
    const auto bad = run_cli("validate-config " + config("absent.yaml"), dir);
    EXPECT_NE(bad.status, 0);
    EXPECT_NE(run_cli("validate-config " + config("echo.yaml") + " --backend-profile nowhere", dir).status, 0);
}

TEST(Cli, EvaluateWithoutRecordsFails) {
    TempDir dir("cli-empty");
    const auto r = run_cli("evaluate " + config("echo.yaml") + " --out-dir \"" + dir.path().string() + "\"", dir);
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("no records found"), std::string::npos) << r.output;
}

TEST(Cli, SimulateThenReport) {
    TempDir dir("cli-run");
    const std::string out = " --out-dir \"" + dir.path().string() + "\"";
    auto r = run_cli("simulate " + config("no_logprobs.yaml") + out, dir);
    ASSERT_EQ(r.status, 0) << r.output;
    r = run_cli("report " + config("no_logprobs.yaml") + out, dir);
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "reports" / "metrics.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "reports" / "summary.md"));
    r = run_cli("baseline " + config("no_logprobs.yaml") + out, dir);
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "reports" / "baseline.csv"));
}

TEST(Cli, UnknownSubcommandFails) {
    TempDir dir("cli-bad");
    EXPECT_NE(run_cli("frobnicate", dir).status, 0);
}

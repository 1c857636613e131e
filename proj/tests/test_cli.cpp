#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cade/cli.hpp"
#include "cade/lcp_oracle.hpp"

namespace cade::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cade");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cade_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(CliTest, SolveWritesOutputsAndSummary) {
    const auto r = invoke({"solve", "--problem", "psi1", "--cells", "64", "--dt-factor", "0.1",
                           "--tol", "1e-11", "--out", path("o")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto summary = json::parse(slurp(dir_ / "o" / "summary.json"));
    for (const char* key : {"problem", "M", "dx", "dt", "iterations", "converged", "l2_err", "linf_err",
                            "free_boundary"})
        EXPECT_TRUE(summary.contains(key)) << key;
    EXPECT_EQ(summary["iterations"].get<int>(), 299);
    EXPECT_TRUE(summary["converged"].get<bool>());
    EXPECT_EQ(summary, json::parse(r.out));

    const auto history = slurp(dir_ / "o" / "history.csv");
    EXPECT_EQ(history.rfind("iter,linf_diff,l2_err,linf_err\n", 0), 0u);
    std::ifstream sol(dir_ / "o" / "solution.csv");
    EXPECT_EQ(read_field(sol).grid(), GridSpec::line(0.0, 1.0, 64));
}

TEST_F(CliTest, Psi1MatchesPublishedIterationCount) {
    const auto r = invoke({"solve", "--problem", "psi1", "--cells", "256", "--dt-factor", "0.1", "--tol", "1e-11"});
    ASSERT_EQ(r.code, kOk);
    const int it = json::parse(r.out)["iterations"].get<int>();
    EXPECT_NEAR(it, 1201, 0.35 * 1201);
}

TEST_F(CliTest, Psi5CoarseL2Error) {
    const auto r = invoke({"solve", "--problem", "psi5", "--cells", "64", "--dt-factor", "1.0"});
    ASSERT_EQ(r.code, kOk);
    EXPECT_NEAR(json::parse(r.out)["l2_err"].get<double>(), 5.85e-4, 0.25 * 5.85e-4);
}

TEST_F(CliTest, TwoPhaseSymmetricFreeBoundary) {
    const auto r = invoke({"solve", "--problem", "twophase-sym", "--cells", "256"});
    ASSERT_EQ(r.code, kOk);
    const auto fb = json::parse(r.out)["free_boundary"].get<std::vector<double>>();
    ASSERT_EQ(fb.size(), 2u);
    EXPECT_NEAR(fb[0], -fb[1], 1e-12);
    // The penalty coupling leaves |u| <= lambda2 / alpha inside the detected
    // plateau, which widens it by at most sqrt(lambda2 / (4 alpha)).
    const double h = 2.0 / 256;
    EXPECT_GE(fb[1], 0.5 - 2.0 * h);
    EXPECT_LE(fb[1], 0.5 + 2.0 * h + std::sqrt(8.0 / (4.0 * 500.0)));
}

TEST_F(CliTest, OutputsAreDeterministic) {
    const std::vector<std::string> base = {"solve", "--problem", "double1d", "--cells", "64"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a")});
    b.insert(b.end(), {"--out", path("b")});
    ASSERT_EQ(invoke(a).code, kOk);
    ASSERT_EQ(invoke(b).code, kOk);
    for (const char* f : {"solution.csv", "history.csv", "summary.json"})
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / "solution.csv").find("generated"), std::string::npos);
}

TEST_F(CliTest, StampAddsTimestampWithoutBreakingFieldFile) {
    ASSERT_EQ(invoke({"solve", "--problem", "psi1", "--cells", "16", "--out", path("s"), "--stamp"}).code, kOk);
    const auto text = slurp(dir_ / "s" / "solution.csv");
    EXPECT_NE(text.find("# generated"), std::string::npos);
    std::ifstream is(dir_ / "s" / "solution.csv");
    EXPECT_NO_THROW(read_field(is));
    EXPECT_TRUE(json::parse(slurp(dir_ / "s" / "summary.json")).contains("generated"));
}

TEST_F(CliTest, IterationCapExitsTwo) {
    const auto r = invoke({"solve", "--problem", "psi1", "--cells", "64", "--max-outer", "5"});
    EXPECT_EQ(r.code, kNotConverged);
    EXPECT_FALSE(json::parse(r.out)["converged"].get<bool>());
}

TEST_F(CliTest, InputErrorsExitOneAndNameTheKey) {
    struct Case {
        std::vector<std::string> args;
        std::string key;
    };
    const std::vector<Case> cases = {
        {{"solve", "--problem", "psi42"}, "--problem"},
        {{"solve", "--problem", "psi1", "--sweeps", "3"}, "--sweeps"},
        {{"solve", "--problem", "psi1", "--tol", "-1"}, "--tol"},
        {{"solve", "--problem", "psi1", "--alpha", "0"}, "--alpha"},
        {{"solve", "--problem", "psi1", "--dt", "0.1", "--dt-factor", "1"}, "--dt"},
        {{"solve", "--problem", "psi1", "--cells", "1"}, "--cells"},
        {{"solve", "--problem", "psi1", "--cells", "abc"}, "--cells"},
        {{"solve", "--problem", "psi1", "--max-outer", "0"}, "--max-outer"},
        {{"solve", "--problem", "psi1", "--kind", "cubic"}, "--kind"},
        {{"solve", "--problem", "@/nonexistent/file.csv"}, "--problem"},
        {{"solve"}, "--problem"},
        {{"solve", "--problem", "psi1", "--bogus"}, "--bogus"},
    };
    for (const auto& c : cases) {
        const auto r = invoke(c.args);
        EXPECT_EQ(r.code, kInputError) << c.key;
        EXPECT_NE(r.err.find(c.key), std::string::npos) << r.err;
    }
    EXPECT_EQ(invoke({}).code, kInputError);
    EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST_F(CliTest, FileProblemRoundTrip) {
    const auto p = preset("psi2", 32);
    {
        std::ofstream os(path("psi.csv"));
        write_field(os, *p.psi);
    }
    const auto from_file = invoke({"solve", "--problem", "@" + path("psi.csv"), "--dt-factor", "0.1"});
    const auto from_preset = invoke({"solve", "--problem", "psi2", "--cells", "32", "--dt-factor", "0.1"});
    ASSERT_EQ(from_file.code, kOk) << from_file.err;
    ASSERT_EQ(from_preset.code, kOk);
    const auto a = json::parse(from_file.out);
    const auto b = json::parse(from_preset.out);
    EXPECT_EQ(a["iterations"], b["iterations"]);
    EXPECT_EQ(a["problem"], "psi");
    EXPECT_TRUE(a["l2_err"].is_null());
}

TEST_F(CliTest, FileProblemWithUpperAndMismatchedGrid) {
    const auto p = preset("double1d", 32);
    {
        std::ofstream lo(path("lo.csv")), up(path("up.csv")), bd(path("bd.csv")), bad(path("bad.csv"));
        write_field(lo, *p.psi);
        write_field(up, *p.phi);
        write_field(bd, interp_boundary_lift(p.g));
        write_field(bad, ScalarField(GridSpec::line(0.0, 1.0, 16)));
    }
    const auto ok = invoke({"solve", "--problem", "@" + path("lo.csv"), "--upper", "@" + path("up.csv"),
                            "--boundary", "@" + path("bd.csv")});
    ASSERT_EQ(ok.code, kOk) << ok.err;
    EXPECT_EQ(json::parse(ok.out)["kind"], "double");
    const auto bad = invoke({"solve", "--problem", "@" + path("lo.csv"), "--upper", "@" + path("bad.csv")});
    EXPECT_EQ(bad.code, kInputError);
    EXPECT_NE(bad.err.find("--upper"), std::string::npos);
}

TEST_F(CliTest, ConvergenceStudyForPsi1) {
    const auto r = invoke({"convergence", "--problem", "psi1", "--levels", "64,128,256,512", "--out", path("c")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto j = json::parse(slurp(dir_ / "c" / "convergence.json"));
    EXPECT_GE(j["order_linf"].get<double>(), 1.5);
    EXPECT_EQ(slurp(dir_ / "c" / "convergence.csv").rfind("M,dx,l2,linf\n", 0), 0u);
}

TEST_F(CliTest, ConvergenceAtRoundOffReportsNA) {
    const auto r = invoke({"convergence", "--problem", "line1d", "--levels", "8,16,32", "--out", path("n")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto j = json::parse(slurp(dir_ / "n" / "convergence.json"));
    EXPECT_EQ(j["order_l2"], "NA");
    EXPECT_EQ(j["order_linf"], "NA");
}

TEST_F(CliTest, ConvergenceNeedsExactSolution) {
    EXPECT_EQ(invoke({"convergence", "--problem", "psi2", "--levels", "16,32"}).code, kInputError);
    EXPECT_EQ(invoke({"convergence", "--problem", "psi1", "--levels", "32,16"}).code, kInputError);
    EXPECT_EQ(invoke({"convergence", "--problem", "psi1", "--levels", "32"}).code, kInputError);
}

TEST_F(CliTest, OracleCheckExamples) {
    EXPECT_EQ(invoke({"oracle-check", "--count", "0"}).code, kOk);
    const auto one = invoke({"oracle-check", "--seed", "1", "--count", "100", "--cells", "16", "--dim", "1"});
    EXPECT_EQ(one.code, kOk) << one.out;
    for (const char* sweeps : {"2", "4"}) {
        const auto two = invoke({"oracle-check", "--count", "25", "--cells", "8", "--dim", "2", "--sweeps", sweeps});
        EXPECT_EQ(two.code, kOk) << two.out;
    }
    EXPECT_EQ(invoke({"oracle-check", "--dim", "3"}).code, kInputError);
}

TEST_F(CliTest, OracleCheckReportsFailingSeeds) {
    OracleCheckOptions opts;
    opts.seed = 7;
    opts.count = 3;
    opts.fixed_point_limit = 0.0;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_oracle_check(opts, out, err), kCheckFailed);
    EXPECT_NE(out.str().find("failing seeds: 7 8 9"), std::string::npos) << out.str();
}

TEST_F(CliTest, ReproduceUnknownTarget) {
    EXPECT_EQ(invoke({"reproduce", "table9"}).code, kInputError);
}

TEST_F(CliTest, ReproduceTable1) {
    const auto r = invoke({"reproduce", "table1", "--out", path("t1")});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto csv = slurp(dir_ / "t1" / "table1.csv");
    EXPECT_NE(csv.find("64,0.015625,299,299,1"), std::string::npos) << csv;
}

TEST(CliBinary, ExitCodesPropagate) {
    const std::string bin = CADE_BINARY;
    EXPECT_EQ(std::system((bin + " oracle-check --count 0 > /dev/null").c_str()), 0);
    const int rc = std::system((bin + " solve --problem nope 2> /dev/null").c_str());
    ASSERT_TRUE(WIFEXITED(rc));
    EXPECT_EQ(WEXITSTATUS(rc), kInputError);
}

}  // namespace
}  // namespace cade::cli

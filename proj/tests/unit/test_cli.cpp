#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "edg/edg.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(EDG_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) { return edg::read_text_file(p.string()); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("edg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, GenSampleSolvePipelineSucceeds) {
    ASSERT_EQ(run("gen --n 100 --r 3 --seed 4 --out " + path("p.csv")).code, 0);
    ASSERT_EQ(run("sample --points " + path("p.csv") + " --r 3 --rho 3 --seed 5 --out " + path("s.txt")).code, 0);
    const CliResult solved = run("solve --samples " + path("s.txt") + " --r 3 --truth " + path("p.csv") + " --out " + path("x"));
    ASSERT_EQ(solved.code, 0) << solved.out;
    const auto summary = nlohmann::json::parse(slurp(path("x_summary.json")));
    EXPECT_TRUE(summary["success"].get<bool>());
    EXPECT_TRUE(summary["converged"].get<bool>());
    EXPECT_LE(summary["relative_error"].get<double>(), 1e-3);
    EXPECT_GT(summary["iterations"].get<int>(), 0);
    EXPECT_TRUE(summary.contains("wall_ms"));
    EXPECT_EQ(nlohmann::json::parse(solved.out)["iterations"], summary["iterations"]);
    EXPECT_EQ(edg::read_point_cloud_csv(slurp(path("x_points.csv"))).n(), 100);
    const std::string trace = slurp(path("x_trace.csv"));
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "k,eps,sigma_r1,rel_change,inner_iters,procrustes_err,wall_ms");
}

TEST_F(Cli, SolveOnFullSamplingMatchesMds) {
    ASSERT_EQ(run("gen --n 25 --r 2 --seed 2 --out " + path("p.csv")).code, 0);
    ASSERT_EQ(run("sample --points " + path("p.csv") + " --r 2 --rho 1000 --out " + path("s.txt")).code, 0);
    ASSERT_EQ(run("solve --samples " + path("s.txt") + " --r 2 --out " + path("x")).code, 0);
    const auto p = edg::read_point_cloud_csv(slurp(path("p.csv")));
    const auto rec = edg::read_point_cloud_csv(slurp(path("x_points.csv")));
    EXPECT_LE(edg::procrustes_distance(rec, edg::classical_mds(edg::edm(p), 2)), 1e-9);
    EXPECT_TRUE(nlohmann::json::parse(slurp(path("x_summary.json")))["relative_error"].is_null());
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("solve --samples " + path("missing.txt") + " --r 2 --out " + path("x")).code, 1);
    std::ofstream(path("bad.txt")) << "not a sample file\n";
    EXPECT_EQ(run("solve --samples " + path("bad.txt") + " --r 2 --out " + path("x")).code, 1);
    EXPECT_EQ(run("gen --bogus-flag").code, 1);
    EXPECT_EQ(run("").code, 1);
    // non-convergence still writes the partial outputs
    ASSERT_EQ(run("gen --n 60 --r 2 --out " + path("p.csv")).code, 0);
    ASSERT_EQ(run("sample --points " + path("p.csv") + " --r 2 --rho 2 --out " + path("s.txt")).code, 0);
    EXPECT_EQ(run("solve --samples " + path("s.txt") + " --r 2 --max-outer 1 --out " + path("x")).code, 2);
    EXPECT_TRUE(fs::exists(path("x_points.csv")));
    EXPECT_FALSE(nlohmann::json::parse(slurp(path("x_summary.json")))["converged"].get<bool>());
}

TEST_F(Cli, OutputsAreReproducible) {
    EXPECT_EQ(run("gen --n 50 --r 3 --seed 9").out, run("gen --n 50 --r 3 --seed 9").out);
    EXPECT_EQ(run("gen --n 50 --r 3 --kind ill_conditioned --kappa 100 --seed 9").out,
              run("gen --n 50 --r 3 --kind ill_conditioned --kappa 100 --seed 9").out);
    ASSERT_EQ(run("gen --n 50 --r 3 --out " + path("p.csv")).code, 0);
    const std::string sample_args = "sample --points " + path("p.csv") + " --r 3 --rho 2.5 --seed 3";
    EXPECT_EQ(run(sample_args).out, run(sample_args).out);
    const std::string phase = "phase --n 30 --rank-list 1,2 --rho-range 0.5,3 --instances 2 --max-outer 50";
    const CliResult a = run(phase), b = run(phase);
    ASSERT_EQ(a.code, 0);
    // drop the timing column before comparing
    auto strip = [](const std::string& csv) {
        std::istringstream in(csv);
        std::string line, out;
        while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
        return out;
    };
    EXPECT_EQ(strip(a.out), strip(b.out));
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "rank,rho,success_prob,median_err,q25_err,q75_err,median_time_ms");
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 5);
}

TEST_F(Cli, PhaseJsonTraceBenchAndRip) {
    const CliResult phase = run("phase --n 30 --rank-list 2 --rho-range 3 --instances 1 --format json");
    ASSERT_EQ(phase.code, 0);
    const auto pj = nlohmann::json::parse(phase.out);
    ASSERT_EQ(pj["cells"].size(), 1u);
    EXPECT_EQ(pj["cells"][0]["success_prob"].get<double>(), 1.0);

    const CliResult trace = run("trace --n 60 --r 2 --rho 3");
    ASSERT_EQ(trace.code, 0);
    EXPECT_EQ(trace.out.substr(0, trace.out.find('\n')), "k,eps,sigma_r1,rel_change,inner_iters,procrustes_err,wall_ms");

    const CliResult bench = run("bench --sizes 50 --r 2 --rho 3 --format json");
    ASSERT_EQ(bench.code, 0);
    EXPECT_LE(nlohmann::json::parse(bench.out)[0]["relative_error"].get<double>(), 1e-6);

    const CliResult rip = run("rip --n 12 --r 2 --m 66 --trials 2 --without-replacement");
    ASSERT_EQ(rip.code, 0);
    const auto rj = nlohmann::json::parse(rip.out);
    EXPECT_LE(rj["norm_PTQPT_minus_PT"].get<double>(), 1e-8);
    EXPECT_TRUE(rj.contains("qomega_norm"));
    EXPECT_TRUE(rj.contains("bound"));
}

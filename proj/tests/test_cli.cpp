#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oamgear/pattern_analysis.hpp"

namespace fs = std::filesystem;
using namespace oamgear;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(OAMGEAR_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("oamgear_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

std::vector<AngleSample> read_csv(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return read_sweep_csv(f);
}

}  // namespace

TEST_F(CliTest, RenderLowCharge) {
    const auto r = run("render --l 2 --theta-deg 15 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("signal petals: FlatProfile"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("fwm petals: 4"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(dir_ / "signal.pgm"));
    EXPECT_TRUE(fs::exists(dir_ / "fwm.pgm"));
    EXPECT_EQ(slurp(dir_ / "fwm.pgm").substr(0, 15), "P5\n512 512\n6553");
}

TEST_F(CliTest, RenderHighCharge) {
    const auto r = run("render --l 20 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("fwm petals: 40"), std::string::npos) << r.output;
}

TEST_F(CliTest, RenderIsDeterministic) {
    ASSERT_EQ(run("render --l 3 --theta-deg 7 --out-dir " + (dir_ / "a").string()).exit_code, 0);
    ASSERT_EQ(run("render --l 3 --theta-deg 7 --out-dir " + (dir_ / "b").string()).exit_code, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "fwm.pgm"), slurp(dir_ / "b" / "fwm.pgm"));
    EXPECT_EQ(slurp(dir_ / "a" / "signal.pgm"), slurp(dir_ / "b" / "signal.pgm"));
}

TEST_F(CliTest, SweepLowCharge) {
    const auto r = run("sweep --l 2 --steps 7 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("within_tolerance (1e-06): yes"), std::string::npos) << r.output;
    const auto rows = read_csv(dir_ / "sweep.csv");
    ASSERT_EQ(rows.size(), 7u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(rows[i].theta, 15.0 * static_cast<double>(i), 1e-12);
        EXPECT_NEAR(rows[i].alpha, 15.0 * static_cast<double>(i), 1e-6);
    }
}

TEST_F(CliTest, SweepHighCharge) {
    const auto r = run("sweep --l 20 --steps 19 --out-dir " + dir_.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto rows = read_csv(dir_ / "sweep.csv");
    ASSERT_EQ(rows.size(), 19u);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i].alpha, 0.5 * static_cast<double>(i), 1e-6);
}

TEST_F(CliTest, SweepThenFitRoundTrip) {
    const auto config = dir_ / "run.json";
    {
        std::ofstream f(config);
        f << R"({"l": 4, "grid": {"n": 256}})";
    }
    ASSERT_EQ(run("sweep --config " + config.string() + " --theta-end-deg 20 --steps 5 --out-dir " + dir_.string()).exit_code, 0);
    const auto r = run("fit --config " + config.string() + " " + (dir_ / "sweep.csv").string());
    EXPECT_EQ(r.exit_code, 0) << r.output;
    const auto at = r.output.find("slope: ");
    ASSERT_NE(at, std::string::npos) << r.output;
    EXPECT_NEAR(std::stod(r.output.substr(at + 7)), 0.5, 1e-6) << r.output;
    const auto mismatch = run("fit --l 2 " + (dir_ / "sweep.csv").string());
    EXPECT_EQ(mismatch.exit_code, 3) << mismatch.output;
}

TEST_F(CliTest, FitRequiresCharge) {
    const auto csv = dir_ / "s.csv";
    std::ofstream(csv) << "theta_deg,alpha_deg\n0,0\n15,15\n30,30\n";
    EXPECT_EQ(run("fit --l 2 " + csv.string()).exit_code, 0);
    const auto r = run("fit " + csv.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("--l"), std::string::npos) << r.output;
}

TEST_F(CliTest, FitRejectsSingleRow) {
    const auto csv = dir_ / "one.csv";
    std::ofstream(csv) << "theta_deg,alpha_deg\n0,0\n";
    const auto r = run("fit --l 2 " + csv.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("InsufficientSamples"), std::string::npos) << r.output;
}

TEST_F(CliTest, FitRejectsMalformedCsv) {
    const auto csv = dir_ / "bad.csv";
    std::ofstream(csv) << "theta_deg,alpha_deg\n0,0\n15,x\n";
    const auto r = run("fit --l 2 " + csv.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
}

TEST_F(CliTest, SweepRejectsTwoFrames) {
    const auto r = run("sweep --l 2 --steps 2 --out-dir " + dir_.string());
    EXPECT_EQ(r.exit_code, 1) << r.output;
}

TEST_F(CliTest, BadArgumentsFail) {
    EXPECT_NE(run("render --beta -2 --out-dir " + dir_.string()).exit_code, 0);
    EXPECT_NE(run("render --detect-mode sideways --out-dir " + dir_.string()).exit_code, 0);
    EXPECT_NE(run("").exit_code, 0);
}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "qmeas/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "qmeas");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = qmeas::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("qmeas_cli_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string str(const std::string& child = "") const { return (path_ / child).string(); }

private:
    fs::path path_;
};

}  // namespace

TEST(Classify, IdealText) {
    const auto r = run({"classify", "--a", "1", "--b", "1", "--c", "0", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("class: TypeO"), std::string::npos);
    EXPECT_NE(r.out.find("delta: 1\n"), std::string::npos);
    EXPECT_NE(r.out.find("reduced position matrix: [[1, 1], [0, 1]]"), std::string::npos);
}

TEST(Classify, Json) {
    const auto r = run({"classify", "--a", "0", "--b", "1", "--c", "-1", "--d", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["class"], "TypeA");
    EXPECT_EQ(j["delta"], 1.0);
    EXPECT_TRUE(j.contains("scale"));
    EXPECT_EQ(j["reduced_position_matrix"].size(), 2u);
}

TEST(Classify, ExitCodes) {
    const auto neg = run({"classify", "--a", "1", "--b", "2", "--c", "3", "--d", "4"});
    EXPECT_EQ(neg.code, 2);
    EXPECT_NE(neg.err.find("determinant −2 ≤ 0"), std::string::npos);
    EXPECT_EQ(run({"classify", "--a", "1", "--b", "1", "--c", "1", "--d", "1"}).code, 2);
    EXPECT_EQ(run({"classify", "--a", "x"}).code, 64);
    EXPECT_EQ(run({"classify", "--bogus", "1"}).code, 64);
    EXPECT_EQ(run({}).code, 64);
}

TEST(Trajectory, HalfGains) {
    const auto r = run({"trajectory", "--a", "0.5", "--b", "0.5", "--delta", "1"});
    ASSERT_EQ(r.code, 0);
    std::istringstream s(r.out);
    const auto rows = qmeas::io::read_trajectory_csv(s);
    ASSERT_EQ(rows.size(), 200u);
    double lo = 1e300;
    for (const auto& row : rows) {
        EXPECT_GE(row.our_lhs, 1.0 - 1e-12);
        lo = std::min(lo, row.circle_lhs);
    }
    EXPECT_NEAR(lo, 1.0, 0.02);
}

TEST(Trajectory, HeisenbergLimitRow) {
    // a' = d / delta = 1 with b = 1: eps * eta = 1 at every w.
    const auto r = run({"trajectory", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    for (const auto& row : json::parse(r.out)) EXPECT_NEAR(row["hur_lhs"].get<double>(), 1.0, 1e-12);
}

TEST(Trajectory, SinglePointAndBadGrid) {
    const auto r = run({"trajectory", "--a", "0.5", "--b", "0.5", "--w", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out).size(), 1u);
    EXPECT_EQ(run({"trajectory", "--a", "0.5", "--b", "0.5", "--w-min", "2", "--w-max", "1"}).code, 64);
}

TEST(Trajectory, SweepFiles) {
    TempDir dir("fig1");
    const auto r = run({"trajectory", "--fig1", "--out", dir.str()});
    ASSERT_EQ(r.code, 0);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir.path())) {
        EXPECT_EQ(e.path().extension(), ".csv");
        ++n;
    }
    EXPECT_EQ(n, 11u);
    EXPECT_TRUE(fs::exists(dir.path() / "trajectory_a0.5.csv"));
}

TEST(Simulate, IdealBundle) {
    TempDir dir("sim_ideal");
    const auto r = run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--out", dir.str()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"f.csv", "F.csv", "g.csv", "G.csv", "F_out.csv", "g_out.csv", "report.json"}) {
        EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
    }
    const auto j = json::parse(slurp(dir.path() / "report.json"));
    EXPECT_NEAR(j["variances"]["F_out"].get<double>(), 2.0, 1e-3);
    EXPECT_NEAR(j["variances"]["g_out"].get<double>(), 0.5, 1e-3);
    EXPECT_EQ(j["bounds"]["our_satisfied"], true);
}

TEST(Simulate, ZeroGainCopiesInput) {
    TempDir a0("sim_a0");
    ASSERT_EQ(run({"simulate", "--a", "0", "--b", "1", "--c", "-1", "--d", "1", "--out", a0.str()}).code, 0);
    EXPECT_EQ(slurp(a0.path() / "F_out.csv"), slurp(a0.path() / "f.csv"));
    const auto j = json::parse(slurp(a0.path() / "report.json"));
    EXPECT_EQ(j["epsilon_star"], 0.0);
    EXPECT_EQ(j["eta_star"], "inf");
    EXPECT_EQ(j["limit_resolved"], true);

    TempDir b0("sim_b0");
    ASSERT_EQ(run({"simulate", "--a", "1", "--b", "0", "--c", "0", "--d", "1", "--out", b0.str()}).code, 0);
    EXPECT_EQ(slurp(b0.path() / "g_out.csv"), slurp(b0.path() / "g.csv"));
}

TEST(Simulate, Deterministic) {
    TempDir x("sim_det1"), y("sim_det2");
    const std::vector<std::string> common{"simulate", "--a", "0.7", "--b", "1.3", "--delta", "1.2", "--mean-P", "0.4"};
    auto ax = common, ay = common;
    ax.insert(ax.end(), {"--out", x.str()});
    ay.insert(ay.end(), {"--out", y.str()});
    ASSERT_EQ(run(ax).code, 0);
    ASSERT_EQ(run(ay).code, 0);
    for (const char* f : {"F_out.csv", "g_out.csv", "report.json"}) {
        EXPECT_EQ(slurp(x.path() / f), slurp(y.path() / f)) << f;
    }
}

TEST(Simulate, ExitCodes) {
    TempDir dir("sim_codes");
    EXPECT_EQ(run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--grid-points", "1000",
                   "--out", dir.str()})
                  .code,
              73);
    EXPECT_EQ(run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--span", "0", "--out", dir.str()}).code,
              73);
    EXPECT_EQ(run({"simulate", "--a", "1e-7", "--b", "1", "--c", "-1", "--d", "1", "--out", dir.str()}).code, 73);
    EXPECT_EQ(run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--sigma-p", "0.1",
                   "--out", dir.str()})
                  .code,
              64);
    EXPECT_EQ(run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1"}).code, 64);
    std::ofstream(dir.path() / "blocker") << "x";
    EXPECT_EQ(run({"simulate", "--a", "1", "--b", "1", "--c", "0", "--d", "1", "--out", dir.str("blocker/sub")})
                  .code,
              74);
}

TEST(Config, CommandLineOverridesFile) {
    TempDir dir("config");
    std::ofstream(dir.path() / "run.cfg") << "# interaction\na=0\nb=1\nc=-1\nd=1\nformat=json\n";
    const auto from_file = run({"classify", "--config", dir.str("run.cfg")});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(json::parse(from_file.out)["class"], "TypeA");
    const auto overridden = run({"classify", "--config", dir.str("run.cfg"), "--a", "1", "--c", "0"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_EQ(json::parse(overridden.out)["class"], "TypeO");
    EXPECT_EQ(run({"classify", "--config", dir.str("missing.cfg")}).code, 74);
}

TEST(VerifyCommand, QuickAndFault) {
    const auto ok = run({"verify", "--level", "quick"});
    EXPECT_EQ(ok.code, 0);
    EXPECT_EQ(json::parse(ok.out)["passed"], true);
    const auto bad = run({"verify", "--level", "quick", "--inject-fourier-fault"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(json::parse(bad.out)["passed"], false);
}

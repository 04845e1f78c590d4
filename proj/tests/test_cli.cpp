#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Result {
    int code = 0;
    std::string out, err;
    pscurv::cli::Json json() const { return pscurv::cli::Json::parse(out); }
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "pscurv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = pscurv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ReportSchema) {
    const auto r = invoke({"analyze", "--family", "sphere", "--points", "10", "--dirs", "3", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"family", "params", "provenance", "samples", "summary"}));
    EXPECT_EQ(j["samples"].size(), 10u);
    EXPECT_EQ(j["provenance"]["seed"], 1);
    EXPECT_TRUE(j["provenance"].contains("tol"));
    EXPECT_TRUE(j["provenance"].contains("torsion_tolerance"));
    EXPECT_TRUE(j["provenance"].contains("version"));
}

TEST(Cli, PerturbedSphereSummary) {
    const auto r = invoke({"analyze", "--family", "perturbed_sphere_E", "--points", "50", "--dirs", "5", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = r.json()["summary"];
    EXPECT_NEAR(s["K_min"].get<double>(), 0.25, 1e-9);
}

TEST(Cli, RhoExpressionSphere) {
    const auto r = invoke({"analyze", "--rho", "abs2(z1)+abs2(z2)-1", "--points", "20", "--dirs", "3", "--assert"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = r.json()["summary"];
    EXPECT_NEAR(s["K_min"].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(s["K_max"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, DirectReinhardt) {
    const auto r = invoke({"analyze", "--family", "reinhardt", "--eps", "0.5", "--direct", "--points", "10", "--assert"});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, SummaryRecomputableFromSamples) {
    const auto r = invoke({"analyze", "--family", "ellipsoid", "--p", "a=1", "--p", "b=2", "--p", "c=3", "--p", "d=4",
                           "--points", "30", "--dirs", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    double kmin = 1e300, kmax = -1e300;
    for (const auto& s : j["samples"]) {
        kmin = std::min(kmin, s["K_min"].get<double>());
        kmax = std::max(kmax, s["K_max"].get<double>());
    }
    EXPECT_EQ(kmin, j["summary"]["K_min"].get<double>());
    EXPECT_EQ(kmax, j["summary"]["K_max"].get<double>());
}

TEST(Cli, DeterministicAcrossThreadCounts) {
    const std::vector<std::string> base{"analyze", "--family", "ellipsoid", "--p", "alpha=1.5", "--p", "beta=2",
                                        "--p",     "gamma=0.3", "--p", "sigma=0.4", "--points", "40", "--seed", "11"};
    auto one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    const auto a = invoke(one), b = invoke(four), c = invoke(one);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
}

TEST(Cli, ProvenanceReproducesSummary) {
    const auto a = invoke({"analyze", "--family", "hartogs", "--t", "0.5", "--points", "12", "--seed", "5"});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto prov = a.json()["provenance"];
    const auto b = invoke({"analyze", "--family", "hartogs", "--t", "0.5", "--points",
                           std::to_string(prov["points"].get<int>()), "--seed", std::to_string(prov["seed"].get<int>())});
    EXPECT_EQ(a.json()["summary"], b.json()["summary"]);
}

TEST(Cli, SweepHartogsCircle) {
    const auto r = invoke({"sweep", "--family", "hartogs", "--param", "t", "--from", "0", "--to", "1", "--steps", "5",
                           "--at-circle", "--assert"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto samples = r.json()["samples"];
    ASSERT_EQ(samples.size(), 5u);
}

TEST(Cli, SweepHartogsEndpointsConvex) {
    const auto r = invoke({"sweep", "--family", "hartogs", "--param", "t", "--from", "0", "--to", "1", "--steps", "2",
                           "--points", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(r.json()["summary"]["bp_min"].get<double>(), -1e-8);
}

TEST(Cli, Brieskorn) {
    const auto r = invoke({"brieskorn", "--exponents", "2,3,5", "--r", "1", "--points", "40", "--assert"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["samples"].size(), 40u);
    const auto bad = invoke({"brieskorn", "--exponents", "2", "--r", "1"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("need >= 3 exponents"), std::string::npos);
}

TEST(Cli, Lambda1) {
    const auto r = invoke({"lambda1", "--family", "perturbed_sphere_E", "--points", "20", "--assert"});
    ASSERT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(invoke({"analyze", "--family", "nosuch"}).code, 2);
    EXPECT_EQ(invoke({"analyze", "--rho", "abs2(z1)+abs2(z2)-", "--points", "3"}).code, 2);
    EXPECT_EQ(invoke({"analyze", "--family", "hartogs", "--t", "2"}).code, 2);
    EXPECT_EQ(invoke({"analyze", "--bogus"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    // Empty surface: sampling cannot succeed.
    EXPECT_EQ(invoke({"analyze", "--rho", "abs2(z1)+abs2(z2)+1", "--points", "2"}).code, 3);
    // The curvature of E for n = 2 is not identically 1/4.
    EXPECT_EQ(invoke({"analyze", "--family", "perturbed_sphere_E", "--n", "2", "--points", "20", "--assert"}).code, 1);
}

TEST(Cli, FileOutputs) {
    const auto dir = std::filesystem::temp_directory_path() / "pscurv_cli_test";
    std::filesystem::create_directories(dir);
    const auto json = dir / "r.json", csv = dir / "r.csv";
    const auto r = invoke({"analyze", "--family", "sphere", "--points", "5", "--out", json.string(), "--csv", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = pscurv::cli::Json::parse(slurp(json));
    EXPECT_EQ(j["samples"].size(), 5u);
    const std::string text = slurp(csv);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
    std::filesystem::remove_all(dir);
}

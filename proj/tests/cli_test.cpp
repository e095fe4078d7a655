#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Invocation {
    int status = -1;
    std::string out;
};

Invocation run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + GRAPHON_CHEEGER_CLI + "' " + args + " 2>/dev/null";
    Invocation r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("graphon_cheeger_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, SpectrumOfConstantKernel) {
    const Invocation r = run("spectrum --preset constant:1 --n 8 --k 3");
    ASSERT_EQ(r.status, 0);
    const Json j = Json::parse(r.out);
    const auto& ev = j["spectrum"]["discrete"];
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_NEAR(ev[0].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(ev[1].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(ev[2].get<double>(), 1.0, 1e-12);
}

TEST(Cli, PartitionWithVerify) {
    const Invocation r = run("partition --preset sbm:2,1,0.05 --n 8 --k 2 --seed 3 --verify");
    ASSERT_EQ(r.status, 0);
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["verify"]["passed"].get<bool>());
    EXPECT_EQ(j["verify"]["checks"].size(), 4u);
    EXPECT_EQ(j["partition"]["sets"].size(), 2u);
    EXPECT_LE(j["partition"]["h_alg"].get<double>(), j["partition"]["bound"].get<double>());
}

TEST(Cli, OracleOfConstantKernel) {
    const Invocation r = run("oracle --preset constant:1 --n 8 --k 2");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(Json::parse(r.out)["oracle"]["h_exact_cellwise"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("partition --n 8 --k 2").status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
    EXPECT_EQ(run("spectrum --preset sbm:2,1,0 --n 4 --k 2").status, 1);
    EXPECT_EQ(run("spectrum --preset sbm:3,1,0.1 --n 4 --k 2").status, 1);
    EXPECT_EQ(run("oracle --preset constant:1 --n 20 --k 2").status, 1);
    const fs::path bad = scratch("bad.csv");
    std::ofstream(bad) << "a,b\n1,1.5\n1.5,1\n";
    EXPECT_EQ(run("spectrum --input '" + bad.string() + "' --format csv --k 1").status, 1);
}

TEST(Cli, PartitionIsByteIdentical) {
    const std::string args = "partition --preset product --n 12 --k 3 --seed 9";
    const Invocation a = run(args);
    const Invocation b = run(args);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, VerifyReloadsReport) {
    const fs::path report = scratch("partition.json");
    ASSERT_EQ(run("partition --preset mean --n 7 --k 2 --seed 1 --out '" + report.string() + "'").status, 0);
    const Invocation r = run("verify --result '" + report.string() + "'");
    ASSERT_EQ(r.status, 0);
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["verify"]["passed"].get<bool>());

    Json tampered = Json::parse(slurp(report));
    tampered["partition"]["h_alg"] = 1e9;
    std::ofstream(report) << tampered.dump(2);
    EXPECT_EQ(run("verify --result '" + report.string() + "'").status, 3);
}

TEST(Cli, SweepCsvProfile) {
    const fs::path csv = scratch("sweep.csv");
    ASSERT_EQ(run("sweep --preset sbm:2,1,0.1 --n 8 --eigenvector 2 --csv '" + csv.string() + "'").status, 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "level,size,expansion,selected");
    double prev = INFINITY;
    int selected = 0;
    while (std::getline(in, line)) {
        const double level = std::stod(line.substr(0, line.find(',')));
        EXPECT_LT(level, prev);
        prev = level;
        selected += line.back() == '1';
    }
    EXPECT_EQ(selected, 1);
}

TEST(Cli, SeedFromEnvironment) {
    const Invocation env = run("partition --preset product --n 6 --k 2", "GRAPHON_CHEEGER_SEED=5");
    const Invocation flag = run("partition --preset product --n 6 --k 2 --seed 5");
    ASSERT_EQ(env.status, 0);
    EXPECT_EQ(Json::parse(env.out)["partition"]["seed"].get<std::uint64_t>(), 5u);
    EXPECT_EQ(env.out, flag.out);
}

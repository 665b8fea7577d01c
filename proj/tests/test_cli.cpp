#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef PIVDML_CLI_PATH
#error "PIVDML_CLI_PATH must point at the built command line binary"
#endif
#ifndef PIVDML_EXAMPLE_DATA
#error "PIVDML_EXAMPLE_DATA must point at the shipped example panel"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    std::string base = ::testing::TempDir() + "cli_" + std::to_string(counter++);
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(PIVDML_CLI_PATH) + " " +
                      args + " >" + base + ".out 2>" + base + ".err";
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(base + ".out");
    res.err = slurp(base + ".err");
    return res;
}

std::string estimate_args() {
    return std::string("estimate --data ") + PIVDML_EXAMPLE_DATA +
           " --unit unit --time time --y y --d d --z z --x x1 --x x2 --x x3 --seed 4";
}

} // namespace

TEST(Cli, EstimateRunsOnShippedExample) {
    RunResult r = run_cli(estimate_args());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("theta"), std::string::npos);
    EXPECT_NE(r.out.find("first stage"), std::string::npos);
    EXPECT_NE(r.out.find("anderson-rubin"), std::string::npos);
    EXPECT_NE(r.out.find("CS kind"), std::string::npos);
    EXPECT_NE(r.err.find("pivdml version="), std::string::npos);
    EXPECT_NE(r.err.find("config_hash="), std::string::npos);
}

TEST(Cli, KvFormatEmitsMachineReadableKeys) {
    RunResult r = run_cli(estimate_args() + " --format kv");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("theta="), std::string::npos);
    EXPECT_NE(r.out.find("se="), std::string::npos);
    EXPECT_NE(r.out.find("cs_kind="), std::string::npos);
    EXPECT_NE(r.out.find("n_units="), std::string::npos);
}

TEST(Cli, MissingRequiredFlagExitsTwo) {
    RunResult r = run_cli(std::string("estimate --data ") + PIVDML_EXAMPLE_DATA +
                          " --unit unit --time time --d d --z z");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("--y"), std::string::npos);
}

TEST(Cli, FoldCountBelowTwoExitsTwo) {
    RunResult r = run_cli(estimate_args() + " --folds 1");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("K >= 2"), std::string::npos);
}

TEST(Cli, UnknownColumnExitsTwo) {
    RunResult r = run_cli(std::string("estimate --data ") + PIVDML_EXAMPLE_DATA +
                          " --unit unit --time time --y y --d d --z nosuch");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("nosuch"), std::string::npos);
}

TEST(Cli, DegenerateInstrumentExitsThree) {
    std::string path = ::testing::TempDir() + "cli_const_z.csv";
    std::ofstream out(path);
    out << "unit,time,y,d,z,x1\n";
    for (int u = 0; u < 6; ++u) {
        for (int t = 1; t <= 4; ++t) {
            out << "u" << u << "," << t << "," << (u + 0.5 * t) << "," << (u - t) << ","
                << "7.0," << (0.1 * u + t) << "\n";
        }
    }
    out.close();
    RunResult r = run_cli("estimate --data " + path +
                          " --unit unit --time time --y y --d d --z z --x x1"
                          " --learner linear --no-dictionary --folds 2");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.err.find("numerical failure"), std::string::npos) << r.err;
}

TEST(Cli, SeedFromEnvironmentMatchesFlag) {
    RunResult flag = run_cli(estimate_args() + " --format kv");
    RunResult env = run_cli(std::string("estimate --data ") + PIVDML_EXAMPLE_DATA +
                                " --unit unit --time time --y y --d d --z z"
                                " --x x1 --x x2 --x x3 --format kv",
                            "PIVDML_SEED=4");
    ASSERT_EQ(flag.exit_code, 0);
    ASSERT_EQ(env.exit_code, 0);
    EXPECT_EQ(flag.out, env.out);
}

TEST(Cli, SimulateIsByteIdenticalAcrossRunsAndThreads) {
    std::string args =
        "simulate --preset strong --n-units 20 --t 4 --p 3 --reps 3 --seed 12"
        " --estimator 2sls --estimator dml-linear --format kv";
    RunResult a = run_cli(args + " --threads 1");
    RunResult b = run_cli(args + " --threads 1");
    RunResult c = run_cli(args + " --threads 8");
    ASSERT_EQ(a.exit_code, 0) << a.err;
    ASSERT_EQ(b.exit_code, 0);
    ASSERT_EQ(c.exit_code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    EXPECT_NE(a.out.find("est.2sls.bias="), std::string::npos);
    EXPECT_NE(a.out.find("est.dml-linear.rmse="), std::string::npos);
}

TEST(Cli, SimulateTablesReportCsRegimes) {
    RunResult r = run_cli(
        "simulate --preset weak --n-units 15 --t 3 --p 3 --reps 2 --seed 3"
        " --estimator 2sls");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("estimator"), std::string::npos);
    EXPECT_NE(r.out.find("bias"), std::string::npos);
    EXPECT_NE(r.out.find("real line"), std::string::npos);
}

TEST(Cli, TuneEchoesSingleCandidate) {
    RunResult r = run_cli(std::string("tune --data ") + PIVDML_EXAMPLE_DATA +
                          " --unit unit --time time --y y --d d --z z --x x1 --x x2 --x x3"
                          " --learner boosting --target r --n-eval 1 --seed 5 --format kv");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("candidate.0."), std::string::npos);
    EXPECT_NE(r.out.find("chosen=0"), std::string::npos);
}

TEST(Cli, ReportGoesToFileWithOut) {
    std::string path = ::testing::TempDir() + "cli_report.txt";
    RunResult r = run_cli(estimate_args() + " --format kv --out " + path);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::string content = slurp(path);
    EXPECT_NE(content.find("theta="), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(ADT_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        res.output.append(buf.data(), n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string scenario(int i) {
    return std::string(ADT_DATA_DIR) + "/example" + std::to_string(i) + ".json";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("adtplan_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("failure-time command: exit codes 0 and 3") {
    RunResult ok = run("failure-time " + scenario(1));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("1.58") != std::string::npos);

    RunResult degenerate = run("failure-time " + scenario(2) + " --alpha 0.95");
    CHECK(degenerate.exit_code == 3);
    CHECK(degenerate.output.find("degenerate") != std::string::npos);

    RunResult bad = run("failure-time /no/such/file.json");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("design commands write CSV and JSON artifacts") {
    TempDir tmp;
    RunResult r = run("design stress " + scenario(1) + " --benchmark --out-dir " +
                      tmp.path.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(tmp.path / "design_stress.csv"));
    CHECK(fs::exists(tmp.path / "report_stress.json"));
    CHECK(slurp(tmp.path / "design_stress.csv").find("0.94964") != std::string::npos);

    RunResult t = run("design time " + scenario(2) + " --grid 0.05 --k 6 --csv --out-dir " +
                      tmp.path.string());
    CHECK(t.exit_code == 0);
    CHECK(fs::exists(tmp.path / "design_time_exact.csv"));
    CHECK(fs::exists(tmp.path / "time_weight_profile.csv"));

    RunResult d = run("design destructive " + scenario(2) + " --out-dir " +
                      tmp.path.string());
    CHECK(d.exit_code == 0);
    CHECK(fs::exists(tmp.path / "design_destructive.csv"));
}

TEST_CASE("efficiency command evaluates a stored design") {
    TempDir tmp;
    std::ofstream(tmp.path / "uniform2.csv") << "x1,weight\n0,0.5\n1,0.5\n";
    RunResult r = run("efficiency " + scenario(1) + " " +
                      (tmp.path / "uniform2.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"efficiency\"") != std::string::npos);
    CHECK(r.output.find("0.55") != std::string::npos);

    RunResult bad = run("efficiency " + scenario(1) + " /no/such/design.csv");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("validate and simulate: byte-stable outputs, exit code 2 on bad design") {
    TempDir tmp;
    const std::string args = "validate " + scenario(1) +
                             " --n 30 --reps 40 --seed 1 --csv --out-dir " +
                             tmp.path.string();
    RunResult a = run(args);
    CHECK(a.exit_code == 0);
    std::string rep_a = slurp(tmp.path / "validation_report.json");
    std::string csv_a = slurp(tmp.path / "validation_replicates.csv");
    RunResult b = run(args);
    CHECK(b.exit_code == 0);
    CHECK(rep_a == slurp(tmp.path / "validation_report.json"));
    CHECK(csv_a == slurp(tmp.path / "validation_replicates.csv"));
    CHECK(a.output == b.output);

    RunResult bad = run("validate " + scenario(1) + " --design /no/such.csv --n 10 --reps 2");
    CHECK(bad.exit_code == 2);

    RunResult sim = run("simulate " + scenario(1) + " --n 5 --seed 3 --out-dir " +
                        tmp.path.string());
    CHECK(sim.exit_code == 0);
    CHECK(fs::exists(tmp.path / "observations.csv"));
}

TEST_CASE("validation failure from a high degenerate rate exits with code 4") {
    RunResult r = run("validate " + scenario(2) +
                      " --n 20 --reps 40 --seed 5 --alpha 0.9 --out-dir " +
                      fs::temp_directory_path().string());
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("\"reliable\": false") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("design stress").exit_code == 2);
    CHECK(run("no-such-command x").exit_code == 2);
}

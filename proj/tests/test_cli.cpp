#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end tests of the command-line tool, driven through the built binary.

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    fs::path out = fs::temp_directory_path() / "credo_cli_out.txt";
    std::string cmd = std::string(CREDO_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::ostringstream buf;
    buf << in.rdbuf();
    int code = -1;
    if (status != -1) code = WEXITSTATUS(status);
    return {code, buf.str()};
}

std::string fixture(const std::string& name) {
    return (fs::path(CREDO_FIXTURE_DIR) / name).string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("credo_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("autocode then check round-trips with agreeing exit codes") {
    TempDir tmp;
    fs::path c = tmp.path / "out.c";
    fs::path report = tmp.path / "gen.json";
    RunResult gen = run("autocode " + fixture("running_example.json") + " -o " + c.string() +
                        " --report " + report.string());
    CHECK(gen.exit_code == 0);
    CHECK(gen.output.find("ProvenPSD") != std::string::npos);
    CHECK(fs::exists(c));
    CHECK(fs::exists(report));
    std::string report_text = slurp(report);
    CHECK(report_text.find("\"containment\": \"ProvenPSD\"") != std::string::npos);
    CHECK(report_text.find("1.0009008107296566") != std::string::npos);
    CHECK(report_text.find("1111.111111111111") != std::string::npos);

    fs::path vreport = tmp.path / "check.json";
    RunResult check = run("check " + c.string() + " --report " + vreport.string());
    CHECK(check.exit_code == 0);
    CHECK(check.output.find("overall Proven") != std::string::npos);
    CHECK(slurp(vreport).find("\"overall\": \"Proven\"") != std::string::npos);

    std::string c_text = slurp(c);
    CHECK(c_text.find("PROOF_TACTIC (use_strategy (AffineEllipsoid));") != std::string::npos);
}

TEST_CASE("flipped spec refutes end to end") {
    TempDir tmp;
    fs::path c = tmp.path / "flipped.c";
    RunResult gen = run("autocode " + fixture("running_example_flipped.json") + " -o " + c.string() +
                        " --report " + (tmp.path / "gen.json").string());
    CHECK(gen.exit_code == 1);
    RunResult check = run("check " + c.string() + " --report " + (tmp.path / "chk.json").string());
    CHECK(check.exit_code == 1);
    CHECK(check.output.find("ProvenNotPSD") != std::string::npos);
    // Every triple still proves; only the containment fails.
    CHECK(check.output.find("15/15 triples proven") != std::string::npos);
}

TEST_CASE("autocode is byte-deterministic across runs") {
    TempDir tmp;
    fs::path c1 = tmp.path / "a.c", c2 = tmp.path / "b.c";
    fs::path r1 = tmp.path / "a.json", r2 = tmp.path / "b.json";
    REQUIRE(run("autocode " + fixture("running_example.json") + " -o " + c1.string() +
                " --report " + r1.string())
                .exit_code == 0);
    REQUIRE(run("autocode " + fixture("running_example.json") + " -o " + c2.string() +
                " --report " + r2.string())
                .exit_code == 0);
    CHECK(slurp(c1) == slurp(c2));
    CHECK(slurp(r1) == slurp(r2));
}

TEST_CASE("lmi subcommand mirrors the stability module") {
    CHECK(run("lmi " + fixture("running_example.json")).exit_code == 0);
    RunResult flipped = run("lmi " + fixture("running_example_flipped.json"));
    CHECK(flipped.exit_code == 1);
    CHECK(flipped.output.find("ProvenNotPSD") != std::string::npos);
}

TEST_CASE("simulate writes a CSV trace with the declared header") {
    TempDir tmp;
    fs::path csv = tmp.path / "trace.csv";
    RunResult sim = run("simulate " + fixture("running_example.json") +
                        " --steps 100 --seed 3 -o " + csv.string());
    CHECK(sim.exit_code == 0);
    std::string text = slurp(csv);
    CHECK(text.rfind("step,Integrator_1,Integrator_2,y,yd,u,level\n", 0) == 0);
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 102);  // header + steps + 1

    // Same seed reproduces the trace bit for bit.
    fs::path csv2 = tmp.path / "trace2.csv";
    REQUIRE(run("simulate " + fixture("running_example.json") + " --steps 100 --seed 3 -o " +
                csv2.string())
                .exit_code == 0);
    CHECK(slurp(csv2) == text);
}

TEST_CASE("tampered artifacts and bad inputs fail loudly") {
    TempDir tmp;
    fs::path c = tmp.path / "out.c";
    REQUIRE(run("autocode " + fixture("running_example.json") + " -o " + c.string() +
                " --report " + (tmp.path / "g.json").string())
                .exit_code == 0);
    std::string text = slurp(c);
    auto at = text.find("mat_of_1x1_scalar(0.5)");
    REQUIRE(at != std::string::npos);
    std::string tampered = text;
    tampered.replace(at, 22, "mat_of_1x1_scalar(0.6)");
    fs::path bad = tmp.path / "bad.c";
    {
        std::ofstream out(bad, std::ios::binary);
        out << tampered;
    }
    RunResult check = run("check " + bad.string() + " --report " + (tmp.path / "b.json").string());
    CHECK(check.exit_code == 1);

    CHECK(run("autocode " + (tmp.path / "missing.json").string()).exit_code == 2);
    RunResult missing = run("autocode " + (tmp.path / "missing.json").string());
    CHECK(missing.output.find("file not found") != std::string::npos);

    fs::path empty = tmp.path / "empty.c";
    { std::ofstream out(empty); }
    CHECK(run("check " + empty.string()).exit_code == 2);

    CHECK(run("bogus-subcommand").exit_code == 2);
}

#include <s4is/cli.hpp>
#include <s4is/errors.hpp>

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace s4is;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("s4is_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "s4is");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallRun = R"({
  "problem": {"builtin": "example5", "params": {"d": 2}},
  "method": "s4is",
  "seed": 7,
  "replicates": 2
})";

}  // namespace

TEST_CASE("config round trip") {
    const auto j = nlohmann::json::parse(R"({
      "problem": {"builtin": "example4", "params": {"c": 4}},
      "method": "akis", "seed": 3, "replicates": 4,
      "s4is": {"k_clusters": 6}, "mcs": {"n": 5000}, "output": {"json": "x.json"}
    })");
    const cli::RunConfig a = cli::parse_run_config(j);
    const nlohmann::json once = cli::to_json(a);
    const nlohmann::json twice = cli::to_json(cli::parse_run_config(once));
    CHECK(once == twice);
    CHECK(a.method == Method::Akis);
    CHECK(a.settings.s4is.k_clusters == 6);
    CHECK(a.settings.mcs_n == 5000);
}

TEST_CASE("external problem selector round trip") {
    const auto j = nlohmann::json::parse(R"({
      "problem": {"external": {"command": "true", "dim": 2,
                   "marginals": [{"kind": "normal", "mean": 1.5, "sd": 1}, {"kind": "lognormal", "mean": 1, "sd": 0.2}]}}
    })");
    const cli::RunConfig a = cli::parse_run_config(j);
    CHECK(a.problem.external());
    CHECK(a.problem.marginals.size() == 2);
    CHECK(cli::to_json(cli::parse_run_config(cli::to_json(a))) == cli::to_json(a));
}

TEST_CASE("unknown keys and bad values are config errors") {
    CHECK_THROWS_AS(cli::parse_run_config(nlohmann::json::parse(R"({"problem": {"builtin": "example1"}, "sead": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(nlohmann::json::parse(R"({"problem": {"builtin": "example1"}, "s4is": {"k": 3}})")),
                    ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(nlohmann::json::parse(R"({"problem": {"builtin": "example9"}})")), ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(nlohmann::json::parse(R"({"problem": {"builtin": "example1"}, "replicates": 0})")),
                    ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(nlohmann::json::parse(R"({"problem": {"builtin": "example1"}, "method": "sorm"})")),
                    ConfigError);
}

TEST_CASE("invalid config exits 2 before any evaluation") {
    TempDir dir;
    const std::string marker = dir.file("touched");
    const std::string config = dir.file("bad.json");
    write(config, R"({"problem": {"external": {"command": "touch )" + marker + R"(", "dim": 1,
                     "marginals": [{"kind": "normal", "mean": 0, "sd": 1}]}}, "bogus": 1})");
    CHECK(run_cli({"run", "-c", config, "-o", dir.file("out.json")}) == cli::kExitConfig);
    CHECK_FALSE(fs::exists(marker));
    CHECK_FALSE(fs::exists(dir.file("out.json")));
}

TEST_CASE("run writes identical reports for a fixed seed") {
    TempDir dir;
    write(dir.file("cfg.json"), kSmallRun);
    REQUIRE(run_cli({"run", "-c", dir.file("cfg.json"), "-o", dir.file("a.json"), "--csv", dir.file("a.csv")}) == cli::kExitOk);
    REQUIRE(run_cli({"run", "-c", dir.file("cfg.json"), "-o", dir.file("b.json")}) == cli::kExitOk);
    CHECK(read(dir.file("a.json")) == read(dir.file("b.json")));

    const auto report = nlohmann::json::parse(read(dir.file("a.json")));
    CHECK(report["method"] == "s4is");
    CHECK(report["replicates"].size() == 2);
    CHECK(report["aggregate"].contains("mean_pf"));
    CHECK(report["aggregate"].contains("eps_r"));
    CHECK(report["reference"]["source"].is_string());

    const std::string csv = read(dir.file("a.csv"));
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 3);
}

TEST_CASE("history CSV") {
    TempDir dir;
    write(dir.file("cfg.json"), kSmallRun);
    REQUIRE(run_cli({"run", "-c", dir.file("cfg.json"), "-o", dir.file("r.json")}) == cli::kExitOk);
    const auto report = nlohmann::json::parse(read(dir.file("r.json")));
    const std::string csv = cli::history_csv(report, 1);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    CHECK(line == "stage,iteration,pf,cov,n_eval_cumulative");
    std::size_t stage1_rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
        if (line.rfind("1,", 0) == 0) ++stage1_rows;
        last = line;
    }
    const auto& rep = report["replicates"][1];
    CHECK(stage1_rows == rep["stages"]["stage1"]["history"].size());
    std::vector<std::string> fields;
    std::istringstream cells(last);
    for (std::string cell; std::getline(cells, cell, ',');) fields.push_back(cell);
    REQUIRE(fields.size() == 5);
    CHECK(fields[0] == "2");
    CHECK(std::stod(fields[2]) == doctest::Approx(rep["pf"].get<double>()).epsilon(1e-15));

    CHECK(run_cli({"history", dir.file("r.json"), "--replicate", "0", "-o", dir.file("h.csv")}) == cli::kExitOk);
    CHECK(read(dir.file("h.csv")) == cli::history_csv(report, 0));
}

TEST_CASE("history without stages is a data error") {
    TempDir dir;
    write(dir.file("cfg.json"), R"({"problem": {"builtin": "example5", "params": {"d": 2}}, "method": "mcs",
                                    "replicates": 1, "mcs": {"n": 1000}})");
    REQUIRE(run_cli({"run", "-c", dir.file("cfg.json"), "-o", dir.file("r.json")}) == cli::kExitOk);
    CHECK_THROWS_AS(cli::history_csv(nlohmann::json::parse(read(dir.file("r.json")))), DataError);
    CHECK(run_cli({"history", dir.file("r.json")}) == cli::kExitRuntime);
}

TEST_CASE("external evaluator through the command line") {
    TempDir dir;
    write(dir.file("cfg.json"), std::string(R"({"problem": {"external": {"command": ")") + S4IS_FIXTURE_CHILD +
                                    R"(", "dim": 2, "marginals": [{"kind": "normal", "mean": 1.5, "sd": 1},
                                    {"kind": "normal", "mean": 2.5, "sd": 1}]}}, "method": "form", "replicates": 1})");
    CHECK(run_cli({"run", "-c", dir.file("cfg.json"), "-o", dir.file("r.json")}) == cli::kExitOk);
    const auto report = nlohmann::json::parse(read(dir.file("r.json")));
    CHECK(report["replicates"][0]["ok"] == true);

    write(dir.file("bad.json"), std::string(R"({"problem": {"external": {"command": ")") + S4IS_FIXTURE_CHILD +
                                    R"( error", "dim": 2, "marginals": [{"kind": "normal", "mean": 1.5, "sd": 1},
                                    {"kind": "normal", "mean": 2.5, "sd": 1}]}}, "method": "form", "replicates": 1})");
    CHECK(run_cli({"run", "-c", dir.file("bad.json"), "-o", dir.file("bad_out.json")}) == cli::kExitRuntime);
}

TEST_CASE("resume replays a checkpoint") {
    TempDir dir;
    write(dir.file("cfg.json"), kSmallRun);
    REQUIRE(run_cli({"run", "-c", dir.file("cfg.json"), "--replicates", "1", "-o", dir.file("r.json"), "--checkpoint-dir",
                     dir.file("cp")}) == cli::kExitOk);
    const std::string cp = dir.file("cp/replicate_0.json");
    REQUIRE(fs::exists(cp));
    REQUIRE(run_cli({"resume", "-c", dir.file("cfg.json"), "--checkpoint", cp, "-o", dir.file("resumed.json")}) == cli::kExitOk);
    const auto first = nlohmann::json::parse(read(dir.file("r.json")));
    const auto resumed = nlohmann::json::parse(read(dir.file("resumed.json")));
    CHECK(resumed["replicates"][0]["pf"] == first["replicates"][0]["pf"]);
    CHECK(resumed["replayed_evaluations"] == first["replicates"][0]["n_eval"]);
}

TEST_CASE("reproduce exits 2 on an unknown id") {
    CHECK(run_cli({"reproduce", "example9"}) == cli::kExitConfig);
}

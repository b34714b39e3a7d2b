#pragma once

#include "s4is/benchmarks.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s4is::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBandFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct MarginalDecl {
    MarginalKind kind = MarginalKind::Normal;
    double mean = 0.0;
    double sd = 1.0;
};

/// Either a built-in problem with parameters or an external command with declared marginals.
struct ProblemSelector {
    std::string builtin;
    std::map<std::string, double> params;
    std::string command;
    std::vector<MarginalDecl> marginals;

    bool external() const { return builtin.empty(); }
};

struct RunConfig {
    ProblemSelector problem;
    Method method = Method::S4is;
    std::uint64_t seed = 0;
    int replicates = 10;
    MethodSettings settings;
    /// Report paths; empty means standard output for JSON and no CSV.
    std::string json_path;
    std::string csv_path;
};

/// Full validation, including problem parameters and method options. Throws ConfigError.
/// Spawns nothing and evaluates nothing.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Builds the problem; an external command is started here.
ProblemSpec make_problem(const ProblemSelector& selector);

/// Runs every replicate and assembles the report. Replicate failures are recorded in it.
nlohmann::json run_report(const RunConfig& config, const ProblemSpec& problem);
bool report_has_failures(const nlohmann::json& report);

/// One row per replicate.
std::string report_csv(const nlohmann::json& report);

/// Columns stage, iteration, pf, cov, n_eval_cumulative for one replicate's S4IS histories.
/// Throws DataError when the report has no such history.
std::string history_csv(const nlohmann::json& report, std::size_t replicate = 0);

/// Entry point behind the executable; returns the process exit code.
int main(int argc, char** argv);

}  // namespace s4is::cli

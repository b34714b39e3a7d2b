#pragma once

#include "s4is/evaluation.hpp"
#include "s4is/form.hpp"
#include "s4is/s4is.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s4is {

enum class Method { Mcs, Form, Akis, S4is };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Where an expected value comes from.
enum class Provenance {
    /// Value printed in the published comparison tables.
    Published,
    /// Computed locally from an independent oracle.
    Derived,
    /// Tolerance chosen for this implementation.
    Design,
};

std::string to_string(Provenance provenance);

struct Band {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    bool empty() const { return !(lo <= hi); }
};

/// Quantities a band can constrain.
enum class Metric {
    Pf,
    /// Relative error of the mean pf against the experiment reference.
    EpsR,
    /// Mean pf divided by the reference.
    PfRatio,
    MeanNEval,
    /// Largest estimator CoV over replicates.
    MaxCov,
    RuntimeSeconds,
    /// |reference - published| in combined standard deviations of both estimates.
    ReferenceDeviation,
};

std::string to_string(Metric metric);

struct Expectation {
    Method method = Method::S4is;
    Metric metric = Metric::EpsR;
    Band band;
    Provenance provenance = Provenance::Design;
    /// Failing a non-gating band is reported but does not fail the experiment.
    bool gating = true;
    std::string note;
};

/// One column of a published comparison table.
struct PublishedRow {
    double pf = 0.0;
    std::optional<double> eps_r;
    /// CoV as printed ("<5.0%", "--").
    std::string cov;
    /// Numeric CoV where the table prints one.
    std::optional<double> cov_value;
    double n_eval = 0.0;
};

enum class ReferenceKind {
    /// Crude Monte Carlo with mcs_n samples.
    MonteCarlo,
    /// Importance sampling on the true performance function around multi-start MPPs.
    IsOracle,
};

/// Per-method options shared by experiments and the command line.
struct MethodSettings {
    std::size_t mcs_n = 1000000;
    S4isConfig s4is;
    AkisConfig akis;
    HlrfOptions form;
    /// Keep a resumption checkpoint in S4IS replicate results.
    bool keep_checkpoint = false;
};

struct ExperimentDef {
    std::string id;
    std::string problem_name;
    std::map<std::string, double> problem_params;
    std::vector<Method> methods;
    std::size_t mcs_n = 1000000;
    int replicates = 10;
    ReferenceKind reference_kind = ReferenceKind::MonteCarlo;
    std::size_t oracle_starts = 20;
    std::vector<Expectation> expected;
    /// Keys: "mcs", "form", "akis", "s4is_stage1", "s4is".
    std::map<std::string, PublishedRow> published;
    S4isConfig s4is;
    AkisConfig akis;
    HlrfOptions form;

    ProblemSpec problem() const;
    MethodSettings settings() const { return {mcs_n, s4is, akis, form, false}; }
    /// Throws ConfigError on an empty method list, non-positive sizes or an empty band.
    void validate() const;
};

/// Experiment ids: example1, example2, example3, example4_c3, example4_c4, example4_c5,
/// example5_d2, example5_d10, example5_d50.
const std::vector<std::string>& experiment_ids();
ExperimentDef reference_table(const std::string& id);

/// Crude Monte Carlo on the true performance function, sampled in chunks.
/// n_eval equals n. Does not go through a ledger.
ReliabilityEstimate monte_carlo(const ProblemSpec& problem, std::size_t n, Rng& rng);

struct OracleResult {
    ReliabilityEstimate estimate;
    PointMatrix centers;
    std::size_t search_evals = 0;
};

/// IS reference with the true performance function: equal-weight unit-covariance mixture on
/// the distinct MPPs of a multi-start HL-RF search.
OracleResult is_oracle(const ProblemSpec& problem, std::size_t n, std::size_t n_starts, Rng& rng);

struct ReplicateResult {
    int replicate = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double pf = 0.0;
    double cov = 0.0;
    bool cov_defined = false;
    std::size_t n_eval = 0;
    std::string termination;
    /// S4IS only.
    std::optional<double> stage1_pf;
    std::optional<double> stage1_cov;
    std::optional<std::size_t> stage1_n_eval;
    double seconds = 0.0;
    /// Per-stage histories for S4IS runs.
    nlohmann::json stages;
    /// S4IS with keep_checkpoint only.
    nlohmann::json checkpoint;
};

nlohmann::json to_json(const StageReport& report);
/// Omits wall-clock time and the checkpoint.
nlohmann::json to_json(const ReplicateResult& result);

/// Runs one method once. Method errors are captured in the result, not thrown. A caller
/// ledger (e.g. one preloaded from a checkpoint) is used by FORM, AK-IS and S4IS.
ReplicateResult run_method(Method method, const ProblemSpec& problem, const MethodSettings& settings, std::uint64_t seed,
                           EvaluationLedger* ledger = nullptr);

struct MethodRow {
    Method method = Method::Mcs;
    std::vector<ReplicateResult> replicates;
    bool ok = true;
    double mean_pf = 0.0;
    double eps_r = 0.0;
    double mean_cov = 0.0;
    double max_cov = 0.0;
    double mean_n_eval = 0.0;
    double mean_seconds = 0.0;
    std::optional<double> stage1_mean_pf;
    std::optional<double> stage1_eps_r;
    std::optional<double> stage1_mean_n_eval;
    std::optional<double> stage1_mean_cov;
};

struct BandCheck {
    Expectation expectation;
    double observed = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::string id;
    std::string problem;
    std::uint64_t seed = 0;
    double reference_pf = 0.0;
    double reference_cov = 0.0;
    std::size_t reference_n = 0;
    std::string reference_source;
    double reference_seconds = 0.0;
    std::optional<double> published_reference;
    double reference_cov_published = 0.0;
    std::vector<MethodRow> rows;
    std::vector<BandCheck> checks;

    const MethodRow* row(Method method) const;
    /// All gating checks passed.
    bool passed() const;
    /// Wall-clock fields and runtime checks are left out so that fixed seeds give identical output.
    nlohmann::json to_json() const;
    /// One line per method row.
    std::string to_csv() const;
    /// Comparison table in the published layout followed by the band verdicts.
    std::string to_text() const;
};

struct ReferenceValue {
    double pf = 0.0;
    double cov = 0.0;
    std::size_t n = 0;
    std::string source;
    double seconds = 0.0;
    /// Set when the reference doubles as the MCS row.
    std::optional<ReplicateResult> mcs_replicate;
};

ReferenceValue compute_reference(const ExperimentDef& def, std::uint64_t seed);

/// Seed of replicate r of a method within an experiment run seeded with `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, Method method, int replicate);

/// Reference first, then every method for its replicates (MCS and FORM once each).
ComparisonReport run_experiment(const ExperimentDef& def, std::uint64_t seed);

}  // namespace s4is

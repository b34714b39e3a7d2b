#pragma once

#include "s4is/clustering.hpp"
#include "s4is/estimators.hpp"
#include "s4is/evaluation.hpp"
#include "s4is/form.hpp"
#include "s4is/learning.hpp"
#include "s4is/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace s4is {

enum class LfScaleMode { Normalized, Raw };
enum class HighDimMode { Auto, On, Off };
enum class SurrogateChoice { Auto, Aggregated, CompositeMin };

struct S4isConfig {
    /// 0 selects min(1e4, max(1e3, 10^d)), or min(1e4, 10^d) with strict_candidate_count.
    std::size_t n_c1 = 0;
    bool strict_candidate_count = false;
    /// 0 selects max(12, (d+1)(d+2)/2).
    std::size_t n_s1_0 = 0;
    std::size_t n_c2 = 10000;
    std::size_t k_clusters = 4;
    double eps1 = 0.01;
    int a1 = 5;
    double eps2 = 0.001;
    int a2 = 5;
    int max_iter1 = 300;
    int max_iter2 = 300;
    double cov_target = 0.05;
    /// Pool enlargement stops at this multiple of n_c2.
    std::size_t max_pool_factor = 10;
    /// FORM-seeded exploration instead of the sampling-based first stage; Auto enables it at d >= 10.
    HighDimMode highdim_form_seed = HighDimMode::Auto;
    std::size_t form_starts = 1;
    /// FORM trace points closer than this to an already kept point do not enter the surrogate.
    double form_support_separation = 1e-3;
    LfScaleMode lf_scale = LfScaleMode::Normalized;
    SurrogateChoice surrogate = SurrogateChoice::Auto;
    GpOptions gp;

    void validate() const;
    std::size_t candidate_count(std::size_t dim) const;
    std::size_t initial_support_count(std::size_t dim) const;
    bool uses_form_seed(std::size_t dim) const;
};

nlohmann::json to_json(const S4isConfig& config);
/// Rejects unknown keys with ConfigError; missing keys keep their defaults.
S4isConfig s4is_config_from_json(const nlohmann::json& j);

enum class Termination { Converged, MaxIterations, PoolExhausted };
std::string to_string(Termination t);

struct HistoryEntry {
    int iteration = 0;
    double pf = 0.0;
    double cov = 0.0;
    bool cov_defined = false;
    std::size_t n_eval = 0;
    /// Entry produced by enlarging the candidate pool rather than by a new evaluation.
    bool enlargement = false;
};

struct StageReport {
    std::vector<HistoryEntry> history;
    ReliabilityEstimate estimate;
    Termination termination = Termination::MaxIterations;
    std::size_t support_size = 0;
    /// The first stage's estimator ignores p_n mass outside the candidate cube.
    bool coarse = false;
    /// The first stage ran the FORM-seeded path.
    bool form_seeded = false;
    /// Second stage: centres of the instrumental mixture.
    PointMatrix mixture_centers;
    std::vector<std::string> notes;
};

/// Trailing-window check: |p_n - mean(last a)| / mean(last a) <= eps. Fires only once the
/// history holds more than a entries; never fires on a zero window mean.
bool window_converged(const std::vector<HistoryEntry>& history, int a, double eps);

struct Stage1Output {
    StageReport report;
    SupportPointSet support;
    std::unique_ptr<Surrogate> model;
    PointMatrix failure_samples;
    /// MPPs found directly by the FORM-seeded path; empty otherwise.
    PointMatrix form_mpps;
};

struct RunContext {
    const ProblemSpec& problem;
    EvaluationLedger& ledger;
    std::uint64_t seed;
};

Stage1Output stage1(const RunContext& ctx, const S4isConfig& config);
StageReport stage2(const RunContext& ctx, const S4isConfig& config, Stage1Output& first);

struct S4isResult {
    ReliabilityEstimate estimate;
    StageReport stage1;
    StageReport stage2;
    PointMatrix mpps;
    SupportPointSet support;
    nlohmann::json surrogate;
};

/// Both stages on one ledger; estimate.n_eval covers every performance-function call.
S4isResult run_s4is(const ProblemSpec& problem, const S4isConfig& config, std::uint64_t seed,
                    EvaluationLedger* ledger = nullptr);

struct AkisConfig {
    std::size_t n_candidates = 10000;
    double u_threshold = 2.0;
    int max_iter = 300;
    double cov_target = 0.05;
    std::size_t max_pool_factor = 10;
    /// HL-RF trace points closer than this to a kept point do not enter the surrogate.
    double support_separation = 1e-3;
    HlrfOptions hlrf;
    GpOptions gp;
};

nlohmann::json to_json(const AkisConfig& config);
nlohmann::json to_json(const HlrfOptions& options);
/// Rejects unknown keys with ConfigError.
HlrfOptions hlrf_options_from_json(const nlohmann::json& j);
AkisConfig akis_config_from_json(const nlohmann::json& j);

struct AkisResult {
    ReliabilityEstimate estimate;
    MppResult mpp;
    std::size_t form_n_eval = 0;
    Termination termination = Termination::MaxIterations;
};

/// Single-MPP baseline: HL-RF, then a GP refined by the U-function on samples of N(MPP, I).
AkisResult run_akis_baseline(const ProblemSpec& problem, const AkisConfig& config, std::uint64_t seed,
                             EvaluationLedger* ledger = nullptr);

/// Support set, configuration and seed of a run, for resumption against an expensive model.
nlohmann::json checkpoint_json(const S4isResult& result, const S4isConfig& config, std::uint64_t seed);
/// Preloads the checkpoint's evaluations; rerunning with the stored seed and config then
/// replays them without calling the performance function.
void restore_checkpoint(const nlohmann::json& checkpoint, EvaluationLedger& ledger, S4isConfig& config,
                        std::uint64_t& seed);

}  // namespace s4is

#include "s4is/benchmarks.hpp"

#include "s4is/errors.hpp"
#include "s4is/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace s4is {

std::string to_string(Method method) {
    switch (method) {
        case Method::Mcs: return "mcs";
        case Method::Form: return "form";
        case Method::Akis: return "akis";
        case Method::S4is: return "s4is";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::Mcs, Method::Form, Method::Akis, Method::S4is}) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown method '" + name + "' (expected mcs, form, akis or s4is)");
}

std::string to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::Published: return "published";
        case Provenance::Derived: return "derived";
        case Provenance::Design: return "design";
    }
    return "unknown";
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::Pf: return "pf";
        case Metric::EpsR: return "eps_r";
        case Metric::PfRatio: return "pf_ratio";
        case Metric::MeanNEval: return "mean_n_eval";
        case Metric::MaxCov: return "max_cov";
        case Metric::RuntimeSeconds: return "runtime_s";
        case Metric::ReferenceDeviation: return "reference_deviation";
    }
    return "unknown";
}

ProblemSpec ExperimentDef::problem() const { return builtin_problem(problem_name, problem_params); }

void ExperimentDef::validate() const {
    if (methods.empty()) throw ConfigError("experiment '" + id + "' has no methods");
    if (mcs_n == 0) throw ConfigError("experiment '" + id + "': mcs_n must be positive");
    if (replicates < 1) throw ConfigError("experiment '" + id + "': replicates must be >= 1");
    if (reference_kind == ReferenceKind::IsOracle && oracle_starts == 0) {
        throw ConfigError("experiment '" + id + "': oracle_starts must be positive");
    }
    for (const Expectation& e : expected) {
        if (e.band.empty()) throw ConfigError("experiment '" + id + "': empty tolerance band for " + to_string(e.metric));
    }
    s4is.validate();
}

// ---------------------------------------------------------------------------
// Reference tables

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Expectation expect(Method m, Metric metric, double lo, double hi, Provenance p = Provenance::Design,
                   std::string note = {}, bool gating = true) {
    return Expectation{m, metric, Band{lo, hi}, p, gating, std::move(note)};
}

PublishedRow pub(double pf, std::optional<double> eps, std::string cov, double n_eval,
                 std::optional<double> cov_value = std::nullopt) {
    return PublishedRow{pf, eps, std::move(cov), cov_value, n_eval};
}

ExperimentDef base(std::string id, std::string problem, std::map<std::string, double> params = {}) {
    ExperimentDef def;
    def.id = std::move(id);
    def.problem_name = std::move(problem);
    def.problem_params = std::move(params);
    def.methods = {Method::Mcs, Method::Form, Method::Akis, Method::S4is};
    return def;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids{"example1",    "example2",    "example3",    "example4_c3", "example4_c4",
                                              "example4_c5", "example5_d2", "example5_d10", "example5_d50"};
    return ids;
}

ExperimentDef reference_table(const std::string& id) {
    using enum Method;
    using enum Metric;
    ExperimentDef def;
    if (id == "example1") {
        def = base(id, "example1");
        def.published = {{"mcs", pub(4.460e-3, {}, "1.0%", 1e6, 0.010)},
                         {"form", pub(1.348e-3, 0.698, "--", 12)},
                         {"akis", pub(1.179e-3, 0.736, "<5.0%", 71.1)},
                         {"s4is_stage1", pub(5.222e-3, 0.171, "13.7%", 35.7, 0.137)},
                         {"s4is", pub(4.483e-3, 0.005, "<5.0%", 60.6)}};
        def.expected = {expect(Mcs, Pf, 4.2e-3, 4.7e-3, Provenance::Published, "published MCS 4.460e-3"),
                        expect(Mcs, RuntimeSeconds, 0.0, 5.0),
                        expect(S4is, EpsR, 0.0, 0.10),
                        expect(S4is, MaxCov, 0.0, 0.05, Provenance::Published, "published CoV < 5%"),
                        expect(S4is, MeanNEval, 0.0, 150.0),
                        expect(Akis, PfRatio, 0.0, 0.5, Provenance::Published,
                               "single-MPP baseline misses the other failure regions")};
    } else if (id == "example2") {
        def = base(id, "example2");
        def.published = {{"mcs", pub(0.02857, {}, "0.6%", 1e6, 0.006)},
                          {"form", pub(0.03116, 0.091, "--", 39)},
                          {"akis", pub(0.02863, 0.002, "<5.0%", 91.4)},
                          {"s4is_stage1", pub(0.03347, 0.172, "40%", 34.2, 0.40)},
                          {"s4is", pub(0.02830, 0.009, "<5.0%", 53.3)}};
        def.expected = {expect(S4is, EpsR, 0.0, 0.10), expect(S4is, MeanNEval, 0.0, 150.0),
                        expect(Form, Pf, 0.03116 * 0.85, 0.03116 * 1.15, Provenance::Published,
                               "within 15% of the published FORM value")};
    } else if (id == "example3") {
        def = base(id, "example3");
        def.published = {{"mcs", pub(0.03130, {}, "0.3%", 1e6, 0.003)},
                         {"form", pub(0.1182, 2.776, "--", 695)},
                         {"akis", pub(0.03123, 0.002, "<5.0%", 985.9)},
                         {"s4is_stage1", pub(0.02049, 0.345, "61.5%", 46.2, 0.615)},
                         {"s4is", pub(0.03078, 0.017, "<5.0%", 71.4)}};
        def.expected = {expect(S4is, EpsR, 0.0, 0.10), expect(S4is, MeanNEval, 0.0, 200.0),
                        expect(Form, EpsR, 1.0, kInf, Provenance::Published, "FORM grossly wrong on the multimodal boundary")};
    } else if (id == "example4_c3") {
        def = base(id, "example4", {{"c", 3.0}});
        def.published = {{"mcs", pub(3.470e-3, {}, "1.3%", 1e6, 0.013)},
                         {"form", pub(1.350e-3, 0.611, "--", 7)},
                         {"akis", pub(1.462e-3, 0.579, "<5.0%", 97.6)},
                         {"s4is_stage1", pub(3.941e-3, 0.136, "35.7%", 44.9, 0.357)},
                         {"s4is", pub(3.531e-3, 0.018, "<5.0%", 72.8)}};
        def.expected = {expect(S4is, EpsR, 0.0, 0.15), expect(S4is, MeanNEval, 0.0, 200.0),
                        expect(Form, Pf, 1.350e-3 * 0.9, 1.350e-3 * 1.1, Provenance::Published,
                               "within 10% of the published FORM value")};
    } else if (id == "example4_c4") {
        def = base(id, "example4", {{"c", 4.0}});
        def.mcs_n = 4000000;
        def.published = {{"mcs", pub(9.172e-5, {}, "4.8%", 4e6, 0.048)},
                         {"form", pub(3.167e-5, 0.655, "--", 7)},
                         {"akis", pub(4.509e-5, 0.508, "<5.0%", 110.3)},
                         {"s4is_stage1", pub(9.286e-5, 0.012, "9.3%", 54.4, 0.093)},
                         {"s4is", pub(9.120e-5, 0.006, "<5.0%", 83.2)}};
        def.expected = {expect(S4is, EpsR, 0.0, 0.20), expect(S4is, MeanNEval, 0.0, 250.0)};
    } else if (id == "example4_c5") {
        def = base(id, "example4", {{"c", 5.0}});
        def.methods = {Form, Akis, S4is};
        def.reference_kind = ReferenceKind::IsOracle;
        def.published = {{"mcs", pub(9.485e-7, {}, "4.9%", 4e8, 0.049)},
                         {"form", pub(2.867e-7, 0.698, "--", 7)},
                         {"akis", pub(2.277e-7, 0.760, "<5.0%", 92.4)},
                         {"s4is_stage1", pub(6.060e-7, 0.361, "9.1%", 63.4, 0.091)},
                         {"s4is", pub(9.035e-7, 0.047, "<5.0%", 118.6)}};
        def.expected = {expect(Mcs, ReferenceDeviation, 0.0, 3.0, Provenance::Derived,
                               "IS oracle vs published 4e8-sample MCS, combined 3 sigma"),
                        expect(S4is, EpsR, 0.0, 0.30), expect(S4is, MeanNEval, 0.0, 300.0)};
    } else if (id == "example5_d2" || id == "example5_d10" || id == "example5_d50") {
        const int d = id == "example5_d2" ? 2 : (id == "example5_d10" ? 10 : 50);
        def = base(id, "example5", {{"d", static_cast<double>(d)}});
        if (d == 2) {
            def.published = {{"mcs", pub(4.926e-3, {}, "1.6%", 1e6, 0.016)},
                             {"form", pub(3.844e-3, 0.220, "--", 20)},
                             {"akis", pub(4.928e-3, 0.0004, "<5.0%", 59.0)},
                             {"s4is_stage1", pub(4.936e-3, 0.002, "15.4%", 16.4, 0.154)},
                             {"s4is", pub(4.921e-3, 0.001, "<5.0%", 23.9)}};
            def.expected = {expect(S4is, EpsR, 0.0, 0.10), expect(S4is, MeanNEval, 0.0, 80.0)};
        } else if (d == 10) {
            def.published = {{"mcs", pub(2.744e-3, {}, "1.5%", 1e6, 0.015)},
                             {"form", pub(1.003e-3, 0.634, "--", 35)},
                             {"akis", pub(2.711e-3, 0.012, "<5.0%", 678.2)},
                             {"s4is_stage1", pub(1.523e-3, 0.445, "--", 38)},
                             {"s4is", pub(2.739e-3, 0.002, "<5.0%", 48.6)}};
            def.expected = {expect(S4is, EpsR, 0.0, 0.15), expect(S4is, MeanNEval, 0.0, 200.0)};
        } else {
            def.published = {{"mcs", pub(1.934e-3, {}, "1.3%", 1e6, 0.013)},
                             {"form", pub(1.541e-4, 0.920, "--", 155)},
                             {"akis", pub(1.903e-3, 0.016, "<5.0%", 1845.2)},
                             {"s4is_stage1", pub(2.318e-4, 0.880, "--", 157)},
                             {"s4is", pub(1.915e-3, 0.010, "<5.0%", 168.6)}};
            def.expected = {expect(S4is, EpsR, 0.0, 0.20, Provenance::Design, "stretch target", false),
                            expect(S4is, MeanNEval, 0.0, 500.0, Provenance::Design, "stretch target", false),
                            expect(S4is, RuntimeSeconds, 0.0, 600.0, Provenance::Design, "stretch target", false)};
        }
    } else {
        throw ConfigError("unknown experiment '" + id + "'");
    }
    return def;
}

// ---------------------------------------------------------------------------
// Reference estimators

namespace {

constexpr std::size_t kChunk = 100000;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ReliabilityEstimate monte_carlo(const ProblemSpec& problem, std::size_t n, Rng& rng) {
    if (n == 0) throw PreconditionError("monte_carlo needs at least one sample");
    problem.validate();
    std::vector<bool> failed;
    failed.reserve(n);
    for (std::size_t done = 0; done < n; done += kChunk) {
        const std::size_t m = std::min(kChunk, n - done);
        const PointMatrix u = sample_std_normal(problem.dim(), m, rng);
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const Vector theta = problem.marginals.from_standard_normal(u.row(i).transpose());
            failed.push_back(evaluate(problem, theta).g <= 0.0);
        }
    }
    ReliabilityEstimate est = mcs_estimate(failed);
    est.n_eval = n;
    return est;
}

OracleResult is_oracle(const ProblemSpec& problem, std::size_t n, std::size_t n_starts, Rng& rng) {
    if (n < 2) throw PreconditionError("is_oracle needs at least two samples");
    // Undamped HL-RF cycles on limit states with curvature >= 1/beta at the MPP (Example 4's
    // hyperbola), which would drop those failure regions from the mixture.
    HlrfOptions search;
    search.line_search = true;
    OracleResult out;
    std::vector<Vector> centers;
    auto collect = [&](const ProblemSpec& target) {
        EvaluationLedger ledger(target);
        const MultiStartResult ms = multi_start_mpps(ledger, n_starts, rng, search);
        out.search_evals += ledger.count();
        for (const MppResult& m : ms.mpps) {
            const bool distinct =
                std::none_of(centers.begin(), centers.end(), [&](const Vector& c) { return (c - m.u_star).norm() < 0.5; });
            if (distinct) centers.push_back(m.u_star);
        }
    };
    collect(problem);
    // Starts drift to the dominant component of a series system; every component's own MPPs
    // bound a part of the failure domain, so search each one as well.
    if (problem.aggregation == Aggregation::SeriesMin) {
        for (const ComponentFn& fn : problem.components) {
            ProblemSpec part = problem;
            part.aggregation = Aggregation::Single;
            part.components = {fn};
            collect(part);
        }
    }
    out.centers.resize(static_cast<Eigen::Index>(centers.size()), static_cast<Eigen::Index>(problem.dim()));
    for (std::size_t k = 0; k < centers.size(); ++k) out.centers.row(static_cast<Eigen::Index>(k)) = centers[k].transpose();
    const GaussianMixture q(out.centers);

    std::vector<bool> failed;
    failed.reserve(n);
    Vector log_pn(static_cast<Eigen::Index>(n));
    Vector log_q(static_cast<Eigen::Index>(n));
    Eigen::Index at = 0;
    for (std::size_t done = 0; done < n; done += kChunk) {
        const std::size_t m = std::min(kChunk, n - done);
        const PointMatrix u = q.sample(m, rng);
        for (Eigen::Index i = 0; i < u.rows(); ++i, ++at) {
            const Vector ui = u.row(i).transpose();
            failed.push_back(evaluate(problem, problem.marginals.from_standard_normal(ui)).g <= 0.0);
            log_pn[at] = std_normal_log_pdf(ui);
            log_q[at] = q.log_pdf(ui);
        }
    }
    out.estimate = is_estimate_log(failed, log_pn, log_q);
    out.estimate.n_eval = n + out.search_evals;
    return out;
}

ReferenceValue compute_reference(const ExperimentDef& def, std::uint64_t seed) {
    const ProblemSpec problem = def.problem();
    Rng rng = substream(seed, 900);
    ReferenceValue ref;
    const auto start = std::chrono::steady_clock::now();
    if (def.reference_kind == ReferenceKind::MonteCarlo) {
        const ReliabilityEstimate est = monte_carlo(problem, def.mcs_n, rng);
        ref.seconds = seconds_since(start);
        ref.pf = est.pf;
        ref.cov = est.cov_defined ? est.cov : 0.0;
        ref.n = def.mcs_n;
        ref.source = "local MCS, " + std::to_string(def.mcs_n) + " samples";
        ReplicateResult r;
        r.seed = seed;
        r.pf = est.pf;
        r.cov = est.cov;
        r.cov_defined = est.cov_defined;
        r.n_eval = est.n_eval;
        r.termination = "fixed_sample";
        r.seconds = ref.seconds;
        ref.mcs_replicate = r;
    } else {
        const OracleResult o = is_oracle(problem, def.mcs_n, def.oracle_starts, rng);
        ref.seconds = seconds_since(start);
        ref.pf = o.estimate.pf;
        ref.cov = o.estimate.cov_defined ? o.estimate.cov : 0.0;
        ref.n = def.mcs_n;
        ref.source = "local IS oracle on the true g, " + std::to_string(def.mcs_n) + " samples around " +
                     std::to_string(o.centers.rows()) + " MPPs";
    }
    return ref;
}

// ---------------------------------------------------------------------------
// Method runs

namespace {

nlohmann::json cov_json(bool defined, double cov) { return defined ? nlohmann::json(cov) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const StageReport& report) {
    nlohmann::json history = nlohmann::json::array();
    for (const HistoryEntry& h : report.history) {
        history.push_back({{"iteration", h.iteration},
                           {"pf", h.pf},
                           {"cov", cov_json(h.cov_defined, h.cov)},
                           {"n_eval", h.n_eval},
                           {"enlargement", h.enlargement}});
    }
    return {{"history", history},
            {"pf", report.estimate.pf},
            {"cov", cov_json(report.estimate.cov_defined, report.estimate.cov)},
            {"n_eval", report.estimate.n_eval},
            {"termination", to_string(report.termination)},
            {"support_size", report.support_size},
            {"coarse", report.coarse},
            {"form_seeded", report.form_seeded},
            {"notes", report.notes}};
}

nlohmann::json to_json(const ReplicateResult& rep) {
    nlohmann::json x{{"replicate", rep.replicate},
                     {"seed", rep.seed},
                     {"ok", rep.ok},
                     {"pf", rep.pf},
                     {"cov", cov_json(rep.cov_defined, rep.cov)},
                     {"n_eval", rep.n_eval},
                     {"termination", rep.termination}};
    if (!rep.ok) x["error"] = rep.error;
    if (rep.stage1_pf) {
        x["stage1_pf"] = *rep.stage1_pf;
        x["stage1_cov"] = rep.stage1_cov ? nlohmann::json(*rep.stage1_cov) : nlohmann::json(nullptr);
        x["stage1_n_eval"] = rep.stage1_n_eval.value_or(0);
    }
    if (!rep.stages.is_null()) x["stages"] = rep.stages;
    return x;
}

std::uint64_t replicate_seed(std::uint64_t seed, Method method, int replicate) {
    Rng rng = substream(seed, 1000 + 1000 * static_cast<std::uint64_t>(method) + static_cast<std::uint64_t>(replicate));
    return rng();
}

ReplicateResult run_method(Method method, const ProblemSpec& problem, const MethodSettings& def, std::uint64_t seed,
                           EvaluationLedger* ledger) {
    ReplicateResult r;
    r.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (method) {
            case Method::Mcs: {
                Rng rng = substream(seed, 1);
                const ReliabilityEstimate est = monte_carlo(problem, def.mcs_n, rng);
                r.pf = est.pf;
                r.cov = est.cov;
                r.cov_defined = est.cov_defined;
                r.n_eval = est.n_eval;
                r.termination = "fixed_sample";
                break;
            }
            case Method::Form: {
                std::optional<EvaluationLedger> own;
                if (!ledger) ledger = &own.emplace(problem);
                Rng rng = substream(seed, 4);
                const FormResult f = run_form(*ledger, rng, def.form);
                if (!f.mpp.converged) throw StageFailure("HL-RF did not converge");
                r.pf = f.pf;
                r.n_eval = ledger->count();
                r.termination = "converged";
                break;
            }
            case Method::Akis: {
                const AkisResult a = run_akis_baseline(problem, def.akis, seed, ledger);
                r.pf = a.estimate.pf;
                r.cov = a.estimate.cov;
                r.cov_defined = a.estimate.cov_defined;
                r.n_eval = a.estimate.n_eval;
                r.termination = to_string(a.termination);
                break;
            }
            case Method::S4is: {
                const S4isResult s = run_s4is(problem, def.s4is, seed, ledger);
                r.pf = s.estimate.pf;
                r.cov = s.estimate.cov;
                r.cov_defined = s.estimate.cov_defined;
                r.n_eval = s.estimate.n_eval;
                r.termination = to_string(s.stage2.termination);
                r.stage1_pf = s.stage1.estimate.pf;
                if (s.stage1.estimate.cov_defined && !s.stage1.form_seeded) r.stage1_cov = s.stage1.estimate.cov;
                r.stage1_n_eval = s.stage1.estimate.n_eval;
                r.stages = {{"stage1", to_json(s.stage1)}, {"stage2", to_json(s.stage2)}};
                if (def.keep_checkpoint) r.checkpoint = checkpoint_json(s, def.s4is, seed);
                break;
            }
        }
    } catch (const Error& e) {
        r.ok = false;
        r.error = e.what();
    }
    r.seconds = seconds_since(start);
    return r;
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

MethodRow summarize(Method method, std::vector<ReplicateResult> reps, double reference) {
    MethodRow row;
    row.method = method;
    row.replicates = std::move(reps);
    double n = 0.0, s1_pf = 0.0, s1_n = 0.0, s1_cov = 0.0;
    int n_cov = 0, n_s1_cov = 0;
    bool has_stage1 = false;
    for (const ReplicateResult& r : row.replicates) {
        row.mean_seconds += r.seconds;
        if (!r.ok) {
            row.ok = false;
            continue;
        }
        n += 1.0;
        row.mean_pf += r.pf;
        row.mean_n_eval += static_cast<double>(r.n_eval);
        if (r.cov_defined) {
            row.mean_cov += r.cov;
            row.max_cov = std::max(row.max_cov, r.cov);
            ++n_cov;
        } else if (method != Method::Form) {
            row.max_cov = kInf;
        }
        if (r.stage1_pf) {
            has_stage1 = true;
            s1_pf += *r.stage1_pf;
            s1_n += static_cast<double>(r.stage1_n_eval.value_or(0));
            if (r.stage1_cov) {
                s1_cov += *r.stage1_cov;
                ++n_s1_cov;
            }
        }
    }
    row.mean_seconds /= static_cast<double>(std::max<std::size_t>(row.replicates.size(), 1));
    if (n > 0.0) {
        row.mean_pf /= n;
        row.mean_n_eval /= n;
    }
    if (n_cov > 0) row.mean_cov /= n_cov;
    row.eps_r = reference > 0.0 ? relative_error(reference, row.mean_pf) : std::numeric_limits<double>::quiet_NaN();
    if (has_stage1 && n > 0.0) {
        row.stage1_mean_pf = s1_pf / n;
        row.stage1_mean_n_eval = s1_n / n;
        if (reference > 0.0) row.stage1_eps_r = relative_error(reference, *row.stage1_mean_pf);
        if (n_s1_cov > 0) row.stage1_mean_cov = s1_cov / n_s1_cov;
    }
    return row;
}

double observe(const ComparisonReport& report, const Expectation& e, bool& available) {
    available = true;
    if (e.metric == Metric::ReferenceDeviation) {
        if (!report.published_reference) {
            available = false;
            return 0.0;
        }
        const double sigma = std::hypot(report.reference_pf * report.reference_cov,
                                        *report.published_reference * report.reference_cov_published);
        return sigma > 0.0 ? std::abs(report.reference_pf - *report.published_reference) / sigma : kInf;
    }
    const MethodRow* row = report.row(e.method);
    if (e.method == Method::Mcs && e.metric == Metric::RuntimeSeconds) return report.reference_seconds;
    if (e.method == Method::Mcs && e.metric == Metric::Pf) return report.reference_pf;
    if (!row || !row->ok) {
        available = false;
        return 0.0;
    }
    switch (e.metric) {
        case Metric::Pf: return row->mean_pf;
        case Metric::EpsR: return row->eps_r;
        case Metric::PfRatio: return row->mean_pf / report.reference_pf;
        case Metric::MeanNEval: return row->mean_n_eval;
        case Metric::MaxCov: return row->max_cov;
        case Metric::RuntimeSeconds: return row->mean_seconds;
        case Metric::ReferenceDeviation: break;
    }
    return 0.0;
}

}  // namespace

const MethodRow* ComparisonReport::row(Method method) const {
    for (const MethodRow& r : rows) {
        if (r.method == method) return &r;
    }
    return nullptr;
}

bool ComparisonReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const BandCheck& c) { return c.pass || !c.expectation.gating; });
}

ComparisonReport run_experiment(const ExperimentDef& def, std::uint64_t seed) {
    def.validate();
    const ProblemSpec problem = def.problem();
    ComparisonReport report;
    report.id = def.id;
    report.problem = problem.name;
    report.seed = seed;

    const ReferenceValue ref = compute_reference(def, seed);
    report.reference_pf = ref.pf;
    report.reference_cov = ref.cov;
    report.reference_n = ref.n;
    report.reference_source = ref.source;
    report.reference_seconds = ref.seconds;
    if (auto it = def.published.find("mcs"); it != def.published.end()) {
        report.published_reference = it->second.pf;
        report.reference_cov_published = it->second.cov_value.value_or(0.0);
    }

    for (Method m : def.methods) {
        std::vector<ReplicateResult> reps;
        if (m == Method::Mcs && ref.mcs_replicate) {
            reps.push_back(*ref.mcs_replicate);
        } else {
            const int count = (m == Method::Mcs || m == Method::Form) ? 1 : def.replicates;
            for (int r = 0; r < count; ++r) {
                ReplicateResult rep = run_method(m, problem, def.settings(), replicate_seed(seed, m, r));
                rep.replicate = r;
                reps.push_back(std::move(rep));
            }
        }
        report.rows.push_back(summarize(m, std::move(reps), ref.pf));
    }

    for (const Expectation& e : def.expected) {
        bool available = true;
        BandCheck c{e, observe(report, e, available), false};
        c.pass = available && e.band.contains(c.observed);
        report.checks.push_back(c);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report output

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string sci(double x) { return std::isfinite(x) ? fmt("%.3e", x) : "--"; }
std::string pct(double x) { return std::isfinite(x) ? fmt("%.1f%%", 100.0 * x) : "--"; }

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string band_text(const Band& b) {
    std::string lo = std::isfinite(b.lo) ? fmt("%g", b.lo) : "-inf";
    std::string hi = std::isfinite(b.hi) ? fmt("%g", b.hi) : "inf";
    return "[" + lo + ", " + hi + "]";
}

}  // namespace

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = id;
    j["problem"] = problem;
    j["seed"] = seed;
    j["reference"] = {{"pf", reference_pf},
                      {"cov", reference_cov},
                      {"n_samples", reference_n},
                      {"source", reference_source},
                      {"published_pf", published_reference ? nlohmann::json(*published_reference) : nlohmann::json(nullptr)}};
    nlohmann::json rows_j = nlohmann::json::array();
    for (const MethodRow& r : rows) {
        nlohmann::json reps = nlohmann::json::array();
        for (const ReplicateResult& rep : r.replicates) reps.push_back(s4is::to_json(rep));
        nlohmann::json row{{"method", to_string(r.method)},
                           {"ok", r.ok},
                           {"mean_pf", r.mean_pf},
                           {"eps_r", number_or_null(r.eps_r)},
                           {"mean_cov", r.mean_cov},
                           {"max_cov", number_or_null(r.max_cov)},
                           {"mean_n_eval", r.mean_n_eval},
                           {"replicates", reps}};
        if (r.stage1_mean_pf) {
            row["stage1"] = {{"mean_pf", *r.stage1_mean_pf},
                             {"eps_r", r.stage1_eps_r ? number_or_null(*r.stage1_eps_r) : nlohmann::json(nullptr)},
                             {"mean_cov", r.stage1_mean_cov ? nlohmann::json(*r.stage1_mean_cov) : nlohmann::json(nullptr)},
                             {"mean_n_eval", r.stage1_mean_n_eval.value_or(0.0)}};
        }
        rows_j.push_back(std::move(row));
    }
    j["rows"] = rows_j;
    nlohmann::json checks_j = nlohmann::json::array();
    bool all = true;
    for (const BandCheck& c : checks) {
        if (c.expectation.metric == Metric::RuntimeSeconds) continue;
        if (c.expectation.gating && !c.pass) all = false;
        checks_j.push_back({{"method", to_string(c.expectation.method)},
                            {"metric", to_string(c.expectation.metric)},
                            {"lo", number_or_null(c.expectation.band.lo)},
                            {"hi", number_or_null(c.expectation.band.hi)},
                            {"observed", number_or_null(c.observed)},
                            {"pass", c.pass},
                            {"gating", c.expectation.gating},
                            {"provenance", to_string(c.expectation.provenance)},
                            {"note", c.expectation.note}});
    }
    j["checks"] = checks_j;
    j["passed"] = all;
    return j;
}

std::string ComparisonReport::to_csv() const {
    std::ostringstream out;
    out << "experiment,method,replicates,ok,mean_pf,eps_r,mean_cov,max_cov,mean_n_eval,reference_pf\n";
    out.precision(17);
    for (const MethodRow& r : rows) {
        out << id << ',' << to_string(r.method) << ',' << r.replicates.size() << ',' << (r.ok ? 1 : 0) << ','
            << r.mean_pf << ',';
        if (std::isfinite(r.eps_r)) out << r.eps_r;
        out << ',' << r.mean_cov << ',';
        if (std::isfinite(r.max_cov)) out << r.max_cov;
        out << ',' << r.mean_n_eval << ',' << reference_pf << '\n';
    }
    return out.str();
}

std::string ComparisonReport::to_text() const {
    std::ostringstream out;
    out << id << " (" << problem << "), seed " << seed << "\n";
    out << "reference pf " << sci(reference_pf) << " (CoV " << pct(reference_cov) << "): " << reference_source << "\n\n";

    struct Column {
        std::string name;
        std::string pf, eps, cov, n_eval;
    };
    std::vector<Column> cols;
    const MethodRow* mcs = row(Method::Mcs);
    if (mcs) {
        cols.push_back({"MCS", sci(mcs->mean_pf), "--", pct(reference_cov), fmt("%.0f", mcs->mean_n_eval)});
    } else {
        cols.push_back({"Reference", sci(reference_pf), "--", pct(reference_cov), fmt("%.0f", static_cast<double>(reference_n))});
    }
    auto failed = [](const std::string& name) { return Column{name, "failed", "--", "--", "--"}; };
    if (const MethodRow* r = row(Method::Form)) {
        cols.push_back(r->ok ? Column{"FORM", sci(r->mean_pf), pct(r->eps_r), "--", fmt("%.1f", r->mean_n_eval)} : failed("FORM"));
    }
    if (const MethodRow* r = row(Method::Akis)) {
        cols.push_back(r->ok ? Column{"AK-IS", sci(r->mean_pf), pct(r->eps_r), pct(r->max_cov), fmt("%.1f", r->mean_n_eval)}
                             : failed("AK-IS"));
    }
    if (const MethodRow* r = row(Method::S4is)) {
        if (r->ok && r->stage1_mean_pf) {
            cols.push_back({"S4IS St.1", sci(*r->stage1_mean_pf), pct(r->stage1_eps_r.value_or(kInf)),
                            r->stage1_mean_cov ? pct(*r->stage1_mean_cov) : "--", fmt("%.1f", r->stage1_mean_n_eval.value_or(0.0))});
        }
        cols.push_back(r->ok ? Column{"S4IS St.2", sci(r->mean_pf), pct(r->eps_r), pct(r->max_cov), fmt("%.1f", r->mean_n_eval)}
                             : failed("S4IS"));
    }
    constexpr std::size_t w = 13;
    out << pad("", 10);
    for (const Column& c : cols) out << pad(c.name, w);
    out << "\n" << pad("pf", 10);
    for (const Column& c : cols) out << pad(c.pf, w);
    out << "\n" << pad("eps_r", 10);
    for (const Column& c : cols) out << pad(c.eps, w);
    out << "\n" << pad("CoV", 10);
    for (const Column& c : cols) out << pad(c.cov, w);
    out << "\n" << pad("N_eval", 10);
    for (const Column& c : cols) out << pad(c.n_eval, w);
    out << "\n(AK-IS and S4IS CoV columns show the largest replicate CoV)\n\n";

    for (const MethodRow& r : rows) {
        for (const ReplicateResult& rep : r.replicates) {
            if (!rep.ok) out << to_string(r.method) << " replicate " << rep.replicate << " failed: " << rep.error << "\n";
        }
    }
    for (const BandCheck& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << pad(to_string(c.expectation.method) + " " + to_string(c.expectation.metric), 26)
            << fmt("%.6g", c.observed) << " in " << band_text(c.expectation.band) << " (" << to_string(c.expectation.provenance)
            << (c.expectation.gating ? "" : ", non-gating") << ")";
        if (!c.expectation.note.empty()) out << "  " << c.expectation.note;
        out << "\n";
    }
    out << (passed() ? "verdict: PASS\n" : "verdict: FAIL\n");
    return out.str();
}

}  // namespace s4is

#include "s4is/s4is.hpp"

#include "s4is/errors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace s4is {

// ---------------------------------------------------------------------------
// Configuration

void S4isConfig::validate() const {
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ConfigError("eps1 and eps2 must be positive");
    if (a1 < 1 || a2 < 1) throw ConfigError("a1 and a2 must be at least 1");
    if (max_iter1 < 0 || max_iter2 < 0) throw ConfigError("iteration caps must be non-negative");
    if (n_c2 < 1) throw ConfigError("n_c2 must be at least 1");
    if (k_clusters < 1) throw ConfigError("k_clusters must be at least 1");
    if (!(cov_target > 0.0)) throw ConfigError("cov_target must be positive");
    if (max_pool_factor < 1) throw ConfigError("max_pool_factor must be at least 1");
    if (form_starts < 1) throw ConfigError("form_starts must be at least 1");
    if (!(form_support_separation >= 0.0)) throw ConfigError("form_support_separation must be non-negative");
    if (gp.restarts < 0 || !(gp.min_lengthscale > 0.0) || !(gp.max_lengthscale > gp.min_lengthscale) ||
        !(gp.min_nugget > 0.0) || !(gp.max_nugget >= gp.min_nugget)) {
        throw ConfigError("invalid GP options");
    }
}

std::size_t S4isConfig::candidate_count(std::size_t dim) const {
    if (n_c1 > 0) return n_c1;
    const double full = std::pow(10.0, static_cast<double>(dim));
    const double n = strict_candidate_count ? std::min(1e4, full) : std::min(1e4, std::max(1e3, full));
    return static_cast<std::size_t>(n);
}

std::size_t S4isConfig::initial_support_count(std::size_t dim) const {
    if (n_s1_0 > 0) return n_s1_0;
    return std::max<std::size_t>(12, (dim + 1) * (dim + 2) / 2);
}

bool S4isConfig::uses_form_seed(std::size_t dim) const {
    switch (highdim_form_seed) {
        case HighDimMode::On: return true;
        case HighDimMode::Off: return false;
        case HighDimMode::Auto: break;
    }
    return dim >= 10;
}

namespace {

template <class E>
struct EnumNames {
    std::vector<std::pair<E, const char*>> names;

    const char* name(E e) const {
        for (const auto& [v, n] : names) {
            if (v == e) return n;
        }
        return "?";
    }
    E parse(const std::string& key, const std::string& s) const {
        for (const auto& [v, n] : names) {
            if (s == n) return v;
        }
        throw ConfigError("invalid value '" + s + "' for '" + key + "'");
    }
};

const EnumNames<LfScaleMode> kLfScale{{{LfScaleMode::Normalized, "normalized"}, {LfScaleMode::Raw, "raw"}}};
const EnumNames<HighDimMode> kHighDim{{{HighDimMode::Auto, "auto"}, {HighDimMode::On, "on"}, {HighDimMode::Off, "off"}}};
const EnumNames<SurrogateChoice> kSurrogate{
    {{SurrogateChoice::Auto, "auto"}, {SurrogateChoice::Aggregated, "aggregated"}, {SurrogateChoice::CompositeMin, "composite_min"}}};

using Setter = std::function<void(const nlohmann::json&)>;

void apply_keys(const nlohmann::json& j, const std::string& where, const std::map<std::string, Setter>& setters) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown key '" + key + "' in " + where);
        try {
            it->second(value);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("wrong type for '" + key + "' in " + where);
        }
    }
}

template <class T>
Setter set_number(T& target, const std::string& key) {
    return [&target, key](const nlohmann::json& v) {
        if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
                    throw ConfigError("'" + key + "' must be non-negative");
                }
            }
        }
        target = v.get<T>();
    };
}

Setter set_bool(bool& target, const std::string& key) {
    return [&target, key](const nlohmann::json& v) {
        if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
        target = v.get<bool>();
    };
}

nlohmann::json gp_to_json(const GpOptions& gp) {
    return {{"restarts", gp.restarts},
            {"min_lengthscale", gp.min_lengthscale},
            {"max_lengthscale", gp.max_lengthscale},
            {"min_nugget", gp.min_nugget},
            {"max_nugget", gp.max_nugget},
            {"seed", gp.seed},
            {"max_optimizer_iterations", gp.max_optimizer_iterations},
            {"trend", gp_trend_name(gp.trend)}};
}

void gp_from_json(const nlohmann::json& j, GpOptions& gp) {
    apply_keys(j, "gp", {{"restarts", set_number(gp.restarts, "restarts")},
                         {"min_lengthscale", set_number(gp.min_lengthscale, "min_lengthscale")},
                         {"max_lengthscale", set_number(gp.max_lengthscale, "max_lengthscale")},
                         {"min_nugget", set_number(gp.min_nugget, "min_nugget")},
                         {"max_nugget", set_number(gp.max_nugget, "max_nugget")},
                         {"seed", set_number(gp.seed, "seed")},
                         {"max_optimizer_iterations", set_number(gp.max_optimizer_iterations, "max_optimizer_iterations")},
                         {"trend", [&gp](const nlohmann::json& v) {
                              if (!v.is_string()) throw ConfigError("'trend' must be a string");
                              gp.trend = gp_trend_from_name(v.get<std::string>());
                          }}});
}

nlohmann::json hlrf_to_json(const HlrfOptions& h) {
    return {{"step_tolerance", h.step_tolerance},
            {"g_tolerance", h.g_tolerance},
            {"max_iterations", h.max_iterations},
            {"fd_step", h.fd_step},
            {"stationary_gradient", h.stationary_gradient},
            {"line_search", h.line_search},
            {"max_backtracks", h.max_backtracks}};
}

void hlrf_from_json(const nlohmann::json& j, HlrfOptions& h) {
    apply_keys(j, "hlrf", {{"step_tolerance", set_number(h.step_tolerance, "step_tolerance")},
                           {"g_tolerance", set_number(h.g_tolerance, "g_tolerance")},
                           {"max_iterations", set_number(h.max_iterations, "max_iterations")},
                           {"fd_step", set_number(h.fd_step, "fd_step")},
                           {"stationary_gradient", set_number(h.stationary_gradient, "stationary_gradient")},
                           {"line_search", set_bool(h.line_search, "line_search")},
                           {"max_backtracks", set_number(h.max_backtracks, "max_backtracks")}});
    if (!(h.step_tolerance > 0.0) || !(h.g_tolerance > 0.0) || h.max_iterations < 1 || !(h.fd_step > 0.0) ||
        !(h.stationary_gradient >= 0.0) || h.max_backtracks < 0) {
        throw ConfigError("invalid hlrf options");
    }
}

}  // namespace

nlohmann::json to_json(const HlrfOptions& options) { return hlrf_to_json(options); }

HlrfOptions hlrf_options_from_json(const nlohmann::json& j) {
    HlrfOptions h;
    hlrf_from_json(j, h);
    return h;
}

nlohmann::json to_json(const S4isConfig& c) {
    return {{"n_c1", c.n_c1},
            {"strict_candidate_count", c.strict_candidate_count},
            {"n_s1_0", c.n_s1_0},
            {"n_c2", c.n_c2},
            {"k_clusters", c.k_clusters},
            {"eps1", c.eps1},
            {"a1", c.a1},
            {"eps2", c.eps2},
            {"a2", c.a2},
            {"max_iter1", c.max_iter1},
            {"max_iter2", c.max_iter2},
            {"cov_target", c.cov_target},
            {"max_pool_factor", c.max_pool_factor},
            {"highdim_form_seed", kHighDim.name(c.highdim_form_seed)},
            {"form_starts", c.form_starts},
            {"form_support_separation", c.form_support_separation},
            {"lf_scale", kLfScale.name(c.lf_scale)},
            {"surrogate", kSurrogate.name(c.surrogate)},
            {"gp", gp_to_json(c.gp)}};
}

S4isConfig s4is_config_from_json(const nlohmann::json& j) {
    S4isConfig c;
    auto enum_setter = [](auto& target, const auto& names, const std::string& key) -> Setter {
        return [&target, &names, key](const nlohmann::json& v) {
            if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
            target = names.parse(key, v.get<std::string>());
        };
    };
    apply_keys(j, "s4is", {
        {"n_c1", set_number(c.n_c1, "n_c1")},
        {"strict_candidate_count", [&](const nlohmann::json& v) { c.strict_candidate_count = v.get<bool>(); }},
        {"n_s1_0", set_number(c.n_s1_0, "n_s1_0")},
        {"n_c2", set_number(c.n_c2, "n_c2")},
        {"k_clusters", set_number(c.k_clusters, "k_clusters")},
        {"eps1", set_number(c.eps1, "eps1")},
        {"a1", set_number(c.a1, "a1")},
        {"eps2", set_number(c.eps2, "eps2")},
        {"a2", set_number(c.a2, "a2")},
        {"max_iter1", set_number(c.max_iter1, "max_iter1")},
        {"max_iter2", set_number(c.max_iter2, "max_iter2")},
        {"cov_target", set_number(c.cov_target, "cov_target")},
        {"max_pool_factor", set_number(c.max_pool_factor, "max_pool_factor")},
        {"highdim_form_seed", [&](const nlohmann::json& v) {
             if (v.is_boolean()) {
                 c.highdim_form_seed = v.get<bool>() ? HighDimMode::On : HighDimMode::Off;
             } else {
                 enum_setter(c.highdim_form_seed, kHighDim, "highdim_form_seed")(v);
             }
         }},
        {"form_starts", set_number(c.form_starts, "form_starts")},
        {"form_support_separation", set_number(c.form_support_separation, "form_support_separation")},
        {"lf_scale", enum_setter(c.lf_scale, kLfScale, "lf_scale")},
        {"raw_lf_scale", [&](const nlohmann::json& v) {
             const bool raw = v.is_boolean() ? v.get<bool>() : v.get<int>() != 0;
             c.lf_scale = raw ? LfScaleMode::Raw : LfScaleMode::Normalized;
         }},
        {"surrogate", enum_setter(c.surrogate, kSurrogate, "surrogate")},
        {"gp", [&](const nlohmann::json& v) { gp_from_json(v, c.gp); }},
    });
    c.validate();
    return c;
}

nlohmann::json to_json(const AkisConfig& c) {
    return {{"n_candidates", c.n_candidates},
            {"u_threshold", c.u_threshold},
            {"max_iter", c.max_iter},
            {"cov_target", c.cov_target},
            {"max_pool_factor", c.max_pool_factor},
            {"support_separation", c.support_separation},
            {"hlrf", hlrf_to_json(c.hlrf)},
            {"gp", gp_to_json(c.gp)}};
}

AkisConfig akis_config_from_json(const nlohmann::json& j) {
    AkisConfig c;
    apply_keys(j, "akis", {
        {"n_candidates", set_number(c.n_candidates, "n_candidates")},
        {"u_threshold", set_number(c.u_threshold, "u_threshold")},
        {"max_iter", set_number(c.max_iter, "max_iter")},
        {"cov_target", set_number(c.cov_target, "cov_target")},
        {"max_pool_factor", set_number(c.max_pool_factor, "max_pool_factor")},
        {"support_separation", set_number(c.support_separation, "support_separation")},
        {"hlrf", [&](const nlohmann::json& v) { hlrf_from_json(v, c.hlrf); }},
        {"gp", [&](const nlohmann::json& v) { gp_from_json(v, c.gp); }},
    });
    if (c.n_candidates < 1 || c.max_iter < 0 || !(c.cov_target > 0.0) || c.max_pool_factor < 1 ||
        !(c.support_separation >= 0.0)) {
        throw ConfigError("invalid akis options");
    }
    return c;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIterations: return "max_iterations";
        case Termination::PoolExhausted: return "pool_exhausted";
    }
    return "?";
}

bool window_converged(const std::vector<HistoryEntry>& history, int a, double eps) {
    if (a < 1 || history.size() <= static_cast<std::size_t>(a)) return false;
    double sum = 0.0;
    for (std::size_t i = history.size() - static_cast<std::size_t>(a); i < history.size(); ++i) sum += history[i].pf;
    const double mean = sum / a;
    if (!(mean > 0.0)) return false;
    return std::abs(history.back().pf - mean) / mean <= eps;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

enum Stream : std::uint64_t { kStage1 = 1, kStage2 = 2, kClusters = 3, kForm = 4, kGp = 5 };

GpOptions run_gp_options(const GpOptions& base, std::uint64_t seed) {
    GpOptions gp = base;
    Rng r = substream(seed ^ base.seed, kGp);
    gp.seed = r();
    return gp;
}

SurrogateMode resolve_mode(SurrogateChoice choice, const ProblemSpec& problem) {
    switch (choice) {
        case SurrogateChoice::Aggregated: return SurrogateMode::Aggregated;
        case SurrogateChoice::CompositeMin: return SurrogateMode::CompositeMin;
        case SurrogateChoice::Auto: break;
    }
    return default_surrogate_mode(problem);
}

Vector log_pn_rows(const PointMatrix& points) {
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = std_normal_log_pdf(points.row(i).transpose());
    return out;
}

Vector log_gm_rows(const GaussianMixture& gm, const PointMatrix& points) {
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = gm.log_pdf(points.row(i).transpose());
    return out;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

/// Evaluates a candidate and adds it to the support set.
void add_support(const RunContext& ctx, SupportPointSet& support, const Vector& u) {
    const Vector theta = ctx.problem.marginals.from_standard_normal(u);
    const Evaluation e = ctx.ledger.evaluate(theta);
    support.append(u, theta, e);
}

HistoryEntry entry(int iteration, const ReliabilityEstimate& e, std::size_t n_eval, bool enlargement = false) {
    return {iteration, e.pf, e.cov, e.cov_defined, n_eval, enlargement};
}

double lf_scale(const S4isConfig& config, const SupportPointSet& support) {
    return config.lf_scale == LfScaleMode::Raw ? 1.0 : support.output_scale();
}

Stage1Output stage1_form_seeded(const RunContext& ctx, const S4isConfig& config) {
    Stage1Output out;
    const std::size_t d = ctx.problem.dim();
    out.support = SupportPointSet(d, ctx.problem.num_components());
    Rng rng = substream(ctx.seed, kForm);
    MultiStartResult ms = multi_start_mpps(ctx.ledger, config.form_starts, rng);
    // Finite-difference stencils sit 1e-4 apart; as training data they pin the likelihood
    // to short lengthscales, so only points separated by form_support_separation are kept.
    for (const TracePoint& p : ms.support) {
        if (out.support.size() > 0 && min_distance(p.u, out.support.inputs_u()) < config.form_support_separation) continue;
        out.support.append(p.u, p.theta, p.value);
    }
    if (out.support.size() < 2) throw ExplorationFailure("FORM-seeded exploration produced fewer than two distinct support points");
    out.model = fit_surrogate(out.support, resolve_mode(config.surrogate, ctx.problem), run_gp_options(config.gp, ctx.seed));
    out.form_mpps.resize(static_cast<Eigen::Index>(ms.mpps.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < ms.mpps.size(); ++i) out.form_mpps.row(static_cast<Eigen::Index>(i)) = ms.mpps[i].u_star.transpose();
    StageReport& r = out.report;
    r.form_seeded = true;
    r.estimate.pf = form_pf(ms.mpps.front().beta);
    r.estimate.cov_defined = false;
    r.estimate.cov = std::numeric_limits<double>::quiet_NaN();
    r.estimate.n_eval = ctx.ledger.count();
    r.termination = Termination::Converged;
    r.support_size = out.support.size();
    r.notes.push_back("FORM-seeded exploration: " + std::to_string(ms.mpps.size()) + " distinct MPP(s) from " +
                      std::to_string(config.form_starts) + " start(s)");
    return out;
}

}  // namespace

Stage1Output stage1(const RunContext& ctx, const S4isConfig& config) {
    config.validate();
    const std::size_t d = ctx.problem.dim();
    if (config.uses_form_seed(d)) return stage1_form_seeded(ctx, config);

    Stage1Output out;
    StageReport& report = out.report;
    report.coarse = true;
    out.support = SupportPointSet(d, ctx.problem.num_components());
    Rng rng = substream(ctx.seed, kStage1);
    CandidatePool pool(sample_hypercube(d, config.candidate_count(d), rng));
    const Vector log_pn = log_pn_rows(pool.points());
    const Vector log_q1 = Vector::Constant(log_pn.size(), -static_cast<double>(d) * std::log(2.0 * kHypercubeHalfWidth));
    Vector min_dist = Vector::Constant(static_cast<Eigen::Index>(pool.size()), std::numeric_limits<double>::infinity());

    auto promote = [&](std::size_t idx, bool marked) {
        if (!marked) pool.mark_selected(idx);
        const Vector u = pool.point(idx);
        add_support(ctx, out.support, u);
        update_min_distances(min_dist, pool.points(), u);
    };

    // Greedy maximin initial design, seeded at the candidate nearest the origin.
    const std::size_t n0 = std::min(config.initial_support_count(d), pool.size());
    Eigen::Index first = 0;
    pool.points().rowwise().squaredNorm().minCoeff(&first);
    promote(static_cast<std::size_t>(first), false);
    for (std::size_t j = 1; j < n0; ++j) {
        std::size_t best = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool.is_selected(i)) continue;
            if (best == pool.size() || min_dist[static_cast<Eigen::Index>(i)] > min_dist[static_cast<Eigen::Index>(best)]) best = i;
        }
        promote(best, false);
    }

    const GpOptions gp = run_gp_options(config.gp, ctx.seed);
    out.model = fit_surrogate(out.support, resolve_mode(config.surrogate, ctx.problem), gp);
    std::vector<bool> failed = surrogate_indicators(*out.model, pool.points());
    ReliabilityEstimate est = is_estimate_log(failed, log_pn, log_q1);

    report.termination = Termination::MaxIterations;
    for (int k = 1; k <= config.max_iter1; ++k) {
        const Vector mean = out.model->predict_mean(pool.points());
        const Vector scores = lf1_scores(mean, min_dist, lf_scale(config, out.support));
        std::size_t idx = 0;
        try {
            idx = select_next(pool, scores);
        } catch (const ExhaustionError&) {
            report.termination = Termination::PoolExhausted;
            report.notes.push_back("stage-1 candidate pool exhausted");
            break;
        }
        promote(idx, true);
        out.model = out.model->refit(out.support);
        failed = surrogate_indicators(*out.model, pool.points());
        est = is_estimate_log(failed, log_pn, log_q1);
        report.history.push_back(entry(k, est, ctx.ledger.count()));
        if (window_converged(report.history, config.a1, config.eps1)) {
            report.termination = Termination::Converged;
            break;
        }
    }

    std::vector<Eigen::Index> fail_rows;
    for (std::size_t i = 0; i < failed.size(); ++i) {
        if (failed[i]) fail_rows.push_back(static_cast<Eigen::Index>(i));
    }
    out.failure_samples.resize(static_cast<Eigen::Index>(fail_rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < fail_rows.size(); ++i) out.failure_samples.row(static_cast<Eigen::Index>(i)) = pool.points().row(fail_rows[i]);

    est.n_eval = ctx.ledger.count();
    est.n_samples = pool.size();
    for (const auto& h : report.history) est.history.push_back(h.pf);
    report.estimate = est;
    report.support_size = out.support.size();
    if (fail_rows.empty()) {
        throw StageFailure("first stage found no failure samples among " + std::to_string(pool.size()) +
                           " candidates; enable highdim_form_seed or raise n_c1");
    }
    return out;
}

StageReport stage2(const RunContext& ctx, const S4isConfig& config, Stage1Output& first) {
    config.validate();
    if (!first.model) throw PreconditionError("second stage needs the first stage's surrogate");
    StageReport report;
    SupportPointSet& support = first.support;

    PointMatrix mpps;
    if (first.report.form_seeded) {
        mpps = first.form_mpps;
    } else {
        Rng krng = substream(ctx.seed, kClusters);
        const ClusterAssignment clusters = kmeans(first.failure_samples, config.k_clusters, krng);
        if (clusters.k < clusters.requested_k) {
            report.notes.push_back("k-means reduced K from " + std::to_string(clusters.requested_k) + " to " +
                                   std::to_string(clusters.k));
        }
        mpps = mpp_per_cluster(first.failure_samples, clusters);
    }
    if (mpps.rows() == 0) throw StageFailure("second stage has no MPPs to centre the mixture on");
    const GaussianMixture gm = build_gm(mpps);

    Rng rng = substream(ctx.seed, kStage2);
    CandidatePool pool(gm.sample(config.n_c2, rng));
    Vector log_pn = log_pn_rows(pool.points());
    Vector log_q2 = log_gm_rows(gm, pool.points());
    Vector min_dist = min_distances(pool.points(), support.inputs_u());
    std::unique_ptr<Surrogate>& model = first.model;

    auto estimate = [&]() { return is_estimate_log(surrogate_indicators(*model, pool.points()), log_pn, log_q2); };
    ReliabilityEstimate est = estimate();

    report.termination = Termination::MaxIterations;
    int k = 0;
    for (k = 1; k <= config.max_iter2; ++k) {
        const Vector mean = model->predict_mean(pool.points());
        const Vector scores = lf2_scores(mean, min_dist, lf_scale(config, support), log_pn, log_q2);
        std::size_t idx = 0;
        try {
            idx = select_next(pool, scores);
        } catch (const ExhaustionError&) {
            report.termination = Termination::PoolExhausted;
            report.notes.push_back("warning: second-stage candidate pool exhausted before convergence");
            break;
        }
        const Vector u = pool.point(idx);
        add_support(ctx, support, u);
        update_min_distances(min_dist, pool.points(), u);
        model = model->refit(support);
        est = estimate();
        report.history.push_back(entry(k, est, ctx.ledger.count()));
        if (window_converged(report.history, config.a2, config.eps2)) {
            report.termination = Termination::Converged;
            break;
        }
    }

    // Surrogate-only pool enlargement until the CoV target is met.
    const std::size_t cap = config.max_pool_factor * config.n_c2;
    while ((!est.cov_defined || est.cov > config.cov_target) && pool.size() + config.n_c2 <= cap) {
        const PointMatrix more = gm.sample(config.n_c2, rng);
        pool.append(more);
        log_pn = concat(log_pn, log_pn_rows(more));
        log_q2 = concat(log_q2, log_gm_rows(gm, more));
        est = estimate();
        report.history.push_back(entry(std::min(k, config.max_iter2), est, ctx.ledger.count(), true));
    }
    if (!est.cov_defined || est.cov > config.cov_target) {
        report.notes.push_back("CoV target not reached with " + std::to_string(pool.size()) + " candidates");
    }

    est.n_eval = ctx.ledger.count();
    est.n_samples = pool.size();
    for (const auto& h : report.history) est.history.push_back(h.pf);
    report.estimate = est;
    report.support_size = support.size();
    report.mixture_centers = mpps;
    return report;
}

S4isResult run_s4is(const ProblemSpec& problem, const S4isConfig& config, std::uint64_t seed, EvaluationLedger* ledger) {
    config.validate();
    std::unique_ptr<EvaluationLedger> own;
    if (!ledger) {
        own = std::make_unique<EvaluationLedger>(problem);
        ledger = own.get();
    }
    RunContext ctx{problem, *ledger, seed};
    Stage1Output first = stage1(ctx, config);
    S4isResult result;
    result.stage1 = first.report;
    result.stage2 = stage2(ctx, config, first);
    result.estimate = result.stage2.estimate;
    result.estimate.n_eval = ledger->count();
    result.mpps = result.stage2.mixture_centers;
    result.support = first.support;
    result.surrogate = first.model->to_json();
    return result;
}

// ---------------------------------------------------------------------------
// AK-IS baseline

AkisResult run_akis_baseline(const ProblemSpec& problem, const AkisConfig& config, std::uint64_t seed,
                             EvaluationLedger* ledger) {
    std::unique_ptr<EvaluationLedger> own;
    if (!ledger) {
        own = std::make_unique<EvaluationLedger>(problem);
        ledger = own.get();
    }
    RunContext ctx{problem, *ledger, seed};
    const std::size_t d = problem.dim();
    AkisResult out;
    Rng frng = substream(seed, kForm);
    FormResult form = run_form(*ledger, frng, config.hlrf);
    if (!form.mpp.converged) throw StageFailure("AK-IS baseline: HL-RF search did not converge");
    out.mpp = form.mpp;
    out.form_n_eval = ledger->count();

    SupportPointSet support(d, problem.num_components());
    for (const TracePoint& p : form.mpp.evaluated) {
        if (support.size() > 0 && min_distance(p.u, support.inputs_u()) < config.support_separation) continue;
        if (!support.contains(p.u)) support.append(p.u, p.theta, p.value);
    }
    PointMatrix center(1, static_cast<Eigen::Index>(d));
    center.row(0) = form.mpp.u_star.transpose();
    const GaussianMixture q(center);
    Rng rng = substream(seed, kStage2);
    CandidatePool pool(q.sample(config.n_candidates, rng));
    Vector log_pn = log_pn_rows(pool.points());
    Vector log_q = log_gm_rows(q, pool.points());
    std::unique_ptr<Surrogate> model = fit_surrogate(support, SurrogateMode::Aggregated, run_gp_options(config.gp, seed));

    const std::size_t cap = config.max_pool_factor * config.n_candidates;
    int iterations = 0;
    ReliabilityEstimate est;
    out.termination = Termination::MaxIterations;
    for (;;) {
        bool learned = false;
        while (iterations < config.max_iter) {
            const Vector mean = model->predict_mean(pool.points());
            const Vector sd = model->predict_sd(pool.points());
            Vector u_scores(mean.size());
            for (Eigen::Index i = 0; i < mean.size(); ++i) u_scores[i] = u_function(mean[i], sd[i]);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (!pool.is_selected(i)) best = std::min(best, u_scores[static_cast<Eigen::Index>(i)]);
            }
            if (best >= config.u_threshold) {
                learned = true;
                break;
            }
            const std::size_t idx = select_next(pool, u_scores);
            add_support(ctx, support, pool.point(idx));
            model = model->refit(support);
            ++iterations;
        }
        est = is_estimate_log(surrogate_indicators(*model, pool.points()), log_pn, log_q);
        est.history.push_back(est.pf);
        out.termination = learned ? Termination::Converged : Termination::MaxIterations;
        if ((est.cov_defined && est.cov <= config.cov_target) || pool.size() + config.n_candidates > cap) break;
        const PointMatrix more = q.sample(config.n_candidates, rng);
        pool.append(more);
        log_pn = concat(log_pn, log_pn_rows(more));
        log_q = concat(log_q, log_gm_rows(q, more));
    }
    est.n_eval = ledger->count();
    est.n_samples = pool.size();
    out.estimate = est;
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

nlohmann::json checkpoint_json(const S4isResult& result, const S4isConfig& config, std::uint64_t seed) {
    nlohmann::json points = nlohmann::json::array();
    const SupportPointSet& s = result.support;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const Vector u = s.inputs_u().row(r).transpose();
        const Vector theta = s.inputs_theta().row(r).transpose();
        const Vector comps = s.component_outputs().row(r).transpose();
        points.push_back({{"u", std::vector<double>(u.data(), u.data() + u.size())},
                          {"theta", std::vector<double>(theta.data(), theta.data() + theta.size())},
                          {"g", s.outputs()[r]},
                          {"components", std::vector<double>(comps.data(), comps.data() + comps.size())}});
    }
    return {{"seed", seed}, {"config", to_json(config)}, {"support", points}};
}

void restore_checkpoint(const nlohmann::json& checkpoint, EvaluationLedger& ledger, S4isConfig& config, std::uint64_t& seed) {
    try {
        seed = checkpoint.at("seed").get<std::uint64_t>();
        config = s4is_config_from_json(checkpoint.at("config"));
        for (const auto& p : checkpoint.at("support")) {
            const auto theta = p.at("theta").get<std::vector<double>>();
            Evaluation e{p.at("g").get<double>(), p.at("components").get<std::vector<double>>()};
            ledger.preload(Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size())), e);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

}  // namespace s4is

#include "s4is/form.hpp"

#include "s4is/errors.hpp"
#include "s4is/probability.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <map>
#include <random>

namespace s4is {

namespace {

struct Tracer {
    EvaluationLedger& ledger;
    std::vector<TracePoint>& out;

    double operator()(const Vector& u) {
        const Vector theta = ledger.problem().marginals.from_standard_normal(u);
        Evaluation e = ledger.evaluate(theta);
        const double g = e.g;
        out.push_back({u, theta, std::move(e)});
        return g;
    }
};

}  // namespace

MppResult hlrf_run(EvaluationLedger& ledger, const Vector& start_u, const HlrfOptions& options) {
    if (!start_u.allFinite()) throw PreconditionError("HL-RF start point must be finite");
    if (static_cast<std::size_t>(start_u.size()) != ledger.problem().dim()) {
        throw PreconditionError("HL-RF start point dimension mismatch");
    }
    MppResult r;
    const std::size_t before = ledger.count();
    Tracer g{ledger, r.evaluated};
    const Eigen::Index d = start_u.size();
    Vector u = start_u;
    double g_tol = 0.0;
    r.status = HlrfStatus::MaxIterations;
    for (int it = 0; it < options.max_iterations; ++it) {
        r.iterates.push_back(u);
        const double gu = g(u);
        if (it == 0) g_tol = options.g_tolerance * (std::abs(gu) + 1.0);
        Vector grad(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            Vector up = u;
            Vector down = u;
            up[k] += options.fd_step;
            down[k] -= options.fd_step;
            grad[k] = (g(up) - g(down)) / (2.0 * options.fd_step);
        }
        r.iterations = it + 1;
        const double gn2 = grad.squaredNorm();
        if (!(std::sqrt(gn2) > options.stationary_gradient)) {
            r.status = HlrfStatus::Stationary;
            r.u_star = u;
            break;
        }
        const Vector next = ((grad.dot(u) - gu) / gn2) * grad;
        r.u_star = u;
        if ((next - u).norm() <= options.step_tolerance && std::abs(gu) <= g_tol) {
            r.status = HlrfStatus::Converged;
            break;
        }
        if (!options.line_search) {
            u = next;
            continue;
        }
        const Vector step = next - u;
        const double c = 2.0 * std::max(u.norm() / std::sqrt(gn2), 1.0);
        const double merit = 0.5 * u.squaredNorm() + c * std::abs(gu);
        const double slope = u.dot(step) + c * (gu > 0.0 ? 1.0 : -1.0) * grad.dot(step);
        double lambda = 1.0;
        Vector trial = next;
        for (int b = 0; b < options.max_backtracks; ++b) {
            trial = u + lambda * step;
            if (0.5 * trial.squaredNorm() + c * std::abs(g(trial)) <= merit + 1e-4 * lambda * slope) break;
            lambda *= 0.5;
        }
        u = trial;
    }
    if (r.status == HlrfStatus::MaxIterations) r.u_star = u;
    r.converged = r.status == HlrfStatus::Converged;
    r.beta = r.u_star.norm();
    r.n_eval = ledger.count() - before;
    return r;
}

MppResult hlrf_search(EvaluationLedger& ledger, const Vector& start_u, const HlrfOptions& options) {
    MppResult r = hlrf_run(ledger, start_u, options);
    if (r.status == HlrfStatus::Stationary) {
        throw StationaryPointError("performance-function gradient vanishes at iterate " + std::to_string(r.iterations));
    }
    return r;
}

double form_pf(double beta) {
    if (beta < 0.0) throw PreconditionError("reliability index must be non-negative");
    return normal_cdf(-beta);
}

namespace {

Vector uniform_start(std::size_t d, Rng& rng) {
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    Vector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = unif(rng);
    return v;
}

}  // namespace

MultiStartResult multi_start_mpps(EvaluationLedger& ledger, std::size_t n_starts, Rng& rng, const HlrfOptions& options,
                                  double dedup_radius) {
    if (n_starts == 0) throw PreconditionError("multi-start search needs at least one start");
    MultiStartResult out;
    const std::size_t before = ledger.count();
    const std::size_t d = ledger.problem().dim();
    std::map<std::vector<double>, bool> seen;
    for (std::size_t s = 0; s < n_starts; ++s) {
        const Vector start = s == 0 ? Vector(Vector::Zero(static_cast<Eigen::Index>(d))) : uniform_start(d, rng);
        MppResult r = hlrf_run(ledger, start, options);
        for (const TracePoint& p : r.evaluated) {
            std::vector<double> key(p.u.data(), p.u.data() + p.u.size());
            if (seen.emplace(std::move(key), true).second) out.support.push_back(p);
        }
        out.all.push_back(std::move(r));
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < out.all.size(); ++i) {
        if (out.all[i].converged) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.all[a].beta < out.all[b].beta; });
    for (std::size_t i : order) {
        const bool distinct = std::none_of(out.mpps.begin(), out.mpps.end(), [&](const MppResult& m) {
            return (m.u_star - out.all[i].u_star).norm() < dedup_radius;
        });
        if (distinct) out.mpps.push_back(out.all[i]);
    }
    out.n_eval = ledger.count() - before;
    if (out.mpps.empty()) {
        throw ExplorationFailure("none of " + std::to_string(n_starts) + " HL-RF searches converged; increase the number of starts");
    }
    return out;
}

FormResult run_form(EvaluationLedger& ledger, Rng& rng, const HlrfOptions& options, int max_starts) {
    const std::size_t before = ledger.count();
    const std::size_t d = ledger.problem().dim();
    HlrfOptions damped = options;
    damped.line_search = true;
    FormResult out;
    std::optional<MppResult> fallback;
    for (int s = 0; s < std::max(1, max_starts); ++s) {
        const Vector start = s == 0 ? Vector(Vector::Zero(static_cast<Eigen::Index>(d))) : uniform_start(d, rng);
        MppResult r = hlrf_run(ledger, start, options);
        if (r.status == HlrfStatus::MaxIterations && !options.line_search) r = hlrf_run(ledger, start, damped);
        out.starts = s + 1;
        if (r.converged) {
            out.pf = form_pf(r.beta);
            out.mpp = std::move(r);
            out.n_eval = ledger.count() - before;
            return out;
        }
        if (r.status != HlrfStatus::Stationary && !fallback) fallback = std::move(r);
    }
    if (!fallback) throw StationaryPointError("every FORM start hit a vanishing gradient");
    out.pf = form_pf(fallback->beta);
    out.mpp = std::move(*fallback);
    out.n_eval = ledger.count() - before;
    return out;
}

}  // namespace s4is

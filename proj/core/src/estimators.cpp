#include "s4is/estimators.hpp"

#include "s4is/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace s4is {

namespace {

void finish(ReliabilityEstimate& e) {
    e.cov_defined = e.pf > 0.0;
    e.cov = e.cov_defined ? std::sqrt(e.variance) / e.pf : std::numeric_limits<double>::quiet_NaN();
}

ReliabilityEstimate from_weights(const Vector& w) {
    ReliabilityEstimate e;
    e.n_samples = static_cast<std::size_t>(w.size());
    long double sum = 0.0L;
    for (double v : w) sum += v;
    e.pf = static_cast<double>(sum / static_cast<long double>(w.size()));
    e.variance = is_variance_deviation_form(w);
    finish(e);
    return e;
}

}  // namespace

ReliabilityEstimate mcs_estimate(const std::vector<bool>& failed) {
    if (failed.empty()) throw PreconditionError("MCS needs at least one sample");
    std::size_t nf = 0;
    for (bool f : failed) nf += f ? 1 : 0;
    ReliabilityEstimate e;
    const auto n = static_cast<double>(failed.size());
    e.n_samples = failed.size();
    e.pf = static_cast<double>(nf) / n;
    e.variance = e.pf * (1.0 - e.pf) / n;
    finish(e);
    return e;
}

double is_variance_deviation_form(const Vector& w) {
    const Eigen::Index n = w.size();
    if (n < 2) return 0.0;
    long double sum = 0.0L;
    for (double v : w) sum += v;
    const long double mean = sum / static_cast<long double>(n);
    long double ss = 0.0L;
    for (double v : w) ss += (v - mean) * (v - mean);
    return static_cast<double>(ss / (static_cast<long double>(n) * static_cast<long double>(n - 1)));
}

double is_variance_moment_form(const Vector& w) {
    const Eigen::Index n = w.size();
    if (n < 2) return 0.0;
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (double v : w) {
        sum += v;
        sum_sq += static_cast<long double>(v) * v;
    }
    const long double mean = sum / static_cast<long double>(n);
    const long double second = sum_sq / static_cast<long double>(n);
    return static_cast<double>(std::max(0.0L, second - mean * mean) / static_cast<long double>(n - 1));
}

ReliabilityEstimate is_estimate(const std::vector<bool>& failed, const Vector& pn, const Vector& q) {
    const auto n = static_cast<Eigen::Index>(failed.size());
    if (n == 0) throw PreconditionError("IS needs at least one sample");
    if (pn.size() != n || q.size() != n) throw PreconditionError("IS inputs differ in length");
    Vector w = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!failed[static_cast<std::size_t>(i)]) continue;
        if (!(q[i] > 0.0)) {
            throw DensitySupportError("instrumental density is zero at failure sample " + std::to_string(i));
        }
        w[i] = pn[i] / q[i];
    }
    return from_weights(w);
}

ReliabilityEstimate is_estimate_log(const std::vector<bool>& failed, const Vector& log_pn, const Vector& log_q) {
    const auto n = static_cast<Eigen::Index>(failed.size());
    if (n == 0) throw PreconditionError("IS needs at least one sample");
    if (log_pn.size() != n || log_q.size() != n) throw PreconditionError("IS inputs differ in length");
    Vector w = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!failed[static_cast<std::size_t>(i)]) continue;
        if (!std::isfinite(log_q[i])) {
            throw DensitySupportError("instrumental density is zero at failure sample " + std::to_string(i));
        }
        w[i] = std::exp(log_pn[i] - log_q[i]);
    }
    return from_weights(w);
}

bool surrogate_indicator(const Surrogate& model, const Vector& u) { return model.predict_mean(u) <= 0.0; }

std::vector<bool> surrogate_indicators(const Surrogate& model, const PointMatrix& points) {
    const Vector m = model.predict_mean(points);
    std::vector<bool> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) out[static_cast<std::size_t>(i)] = m[i] <= 0.0;
    return out;
}

double relative_error(double reference_pf, double pf) {
    if (!(reference_pf > 0.0)) throw PreconditionError("relative error needs a positive reference");
    return std::abs(reference_pf - pf) / reference_pf;
}

}  // namespace s4is

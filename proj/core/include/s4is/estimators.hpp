#pragma once

#include "s4is/surrogate.hpp"
#include "s4is/types.hpp"

#include <cstddef>
#include <vector>

namespace s4is {

struct ReliabilityEstimate {
    double pf = 0.0;
    double variance = 0.0;
    /// sqrt(variance) / pf; NaN when pf is zero (see cov_defined).
    double cov = 0.0;
    bool cov_defined = false;
    std::size_t n_eval = 0;
    std::size_t n_samples = 0;
    std::vector<double> history;
};

/// Crude Monte Carlo from failure indicators.
ReliabilityEstimate mcs_estimate(const std::vector<bool>& failed);

/// Importance sampling from samples drawn from q: mean of 1_F p_n / q.
/// Throws DensitySupportError when q is zero at a failure sample.
ReliabilityEstimate is_estimate(const std::vector<bool>& failed, const Vector& pn, const Vector& q);

/// Same estimator with densities in log form, for likelihood ratios that under/overflow.
ReliabilityEstimate is_estimate_log(const std::vector<bool>& failed, const Vector& log_pn, const Vector& log_q);

/// Estimator variance as the scaled sum of squared deviations from the estimate.
double is_variance_deviation_form(const Vector& weighted_indicators);
/// Estimator variance from the second moment: (mean(w^2) - pf^2) / (N - 1).
double is_variance_moment_form(const Vector& weighted_indicators);

/// Failure under the surrogate mean; a prediction of exactly zero counts as failure.
bool surrogate_indicator(const Surrogate& model, const Vector& u);
std::vector<bool> surrogate_indicators(const Surrogate& model, const PointMatrix& points);

/// |reference - pf| / reference.
double relative_error(double reference_pf, double pf);

}  // namespace s4is

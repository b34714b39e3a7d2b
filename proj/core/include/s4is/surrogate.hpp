#pragma once

#include "s4is/evaluation.hpp"
#include "s4is/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace s4is {

/// Inputs where the true performance function has been evaluated. Append-only.
class SupportPointSet {
public:
    SupportPointSet() = default;
    SupportPointSet(std::size_t dim, std::size_t num_components);

    std::size_t size() const { return static_cast<std::size_t>(outputs_.size()); }
    std::size_t dim() const { return dim_; }
    std::size_t num_components() const { return num_components_; }

    const PointMatrix& inputs_u() const { return inputs_u_; }
    const PointMatrix& inputs_theta() const { return inputs_theta_; }
    const Vector& outputs() const { return outputs_; }
    /// One column per component of a series/parallel system.
    const Eigen::MatrixXd& component_outputs() const { return component_outputs_; }

    /// Throws PreconditionError when u is already present.
    void append(const Vector& u, const Vector& theta, const Evaluation& value);
    bool contains(const Vector& u) const;

    /// Sample standard deviation of the aggregated outputs (1 if fewer than two points or constant).
    double output_scale() const;

private:
    std::size_t dim_ = 0;
    std::size_t num_components_ = 0;
    PointMatrix inputs_u_;
    PointMatrix inputs_theta_;
    Vector outputs_;
    Eigen::MatrixXd component_outputs_;
};

/// Regression part of the GP mean: a constant (ordinary kriging) or affine in u.
enum class GpTrend { Constant, Linear };
std::string gp_trend_name(GpTrend trend);
GpTrend gp_trend_from_name(const std::string& name);

struct GpOptions {
    int restarts = 5;
    double min_lengthscale = 1e-2;
    double max_lengthscale = 1e2;
    /// Nugget relative to the profiled signal variance; escalated x10 on factorization failure.
    double min_nugget = 1e-10;
    double max_nugget = 1e-4;
    std::uint64_t seed = 0x5eedULL;
    int max_optimizer_iterations = 100;
    GpTrend trend = GpTrend::Constant;
};

/// Common face of the surrogates the learning loops drive.
class Surrogate {
public:
    virtual ~Surrogate() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t training_size() const = 0;
    virtual double predict_mean(const Vector& u) const = 0;
    /// Only surrogates with a predictive distribution provide this; learning functions LF1/LF2 do not need it.
    virtual bool provides_sd() const { return false; }
    virtual double predict_sd(const Vector& u) const;

    /// Batch predictions over rows of `points`.
    virtual Vector predict_mean(const PointMatrix& points) const;
    virtual Vector predict_sd(const PointMatrix& points) const;

    /// Re-fit on `support`, which extends the current training set.
    virtual std::unique_ptr<Surrogate> refit(const SupportPointSet& support) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

/// Ordinary kriging: constant trend, anisotropic squared-exponential kernel,
/// signal variance profiled out of the likelihood, outputs standardized internally.
class GpSurrogate final : public Surrogate {
public:
    /// Hyperparameters by maximum likelihood over log-lengthscales, from `options.restarts`
    /// seeded random starts plus `warm_start` when given.
    static GpSurrogate fit(const PointMatrix& inputs, const Vector& outputs, const GpOptions& options = {},
                           const Vector* warm_start_log_lengthscales = nullptr);

    /// Factorizes with fixed hyperparameters; no optimization.
    static GpSurrogate with_hyperparameters(const PointMatrix& inputs, const Vector& outputs,
                                            const Vector& lengthscales, double relative_nugget,
                                            const GpOptions& options = {});

    static GpSurrogate from_json(const nlohmann::json& j);

    /// Fit on the training set plus one new point, warm-started at the current optimum.
    GpSurrogate update(const Vector& u, double y) const;

    std::size_t dim() const override { return static_cast<std::size_t>(inputs_.cols()); }
    std::size_t training_size() const override { return static_cast<std::size_t>(inputs_.rows()); }

    double predict_mean(const Vector& u) const override;
    bool provides_sd() const override { return true; }
    double predict_sd(const Vector& u) const override;
    Vector predict_mean(const PointMatrix& points) const override;
    Vector predict_sd(const PointMatrix& points) const override;

    std::unique_ptr<Surrogate> refit(const SupportPointSet& support) const override;
    nlohmann::json to_json() const override;

    const Vector& lengthscales() const { return lengthscales_; }
    /// Signal variance in standardized output units.
    double signal_variance() const { return signal_variance_; }
    /// Absolute nugget in standardized output units (signal variance times relative nugget).
    double nugget() const { return signal_variance_ * relative_nugget_; }
    double relative_nugget() const { return relative_nugget_; }
    double output_mean() const { return y_mean_; }
    double output_scale() const { return y_scale_; }
    double log_likelihood() const { return log_likelihood_; }
    /// Log-likelihood after every accepted optimizer step of the winning start.
    const std::vector<double>& optimizer_trace() const { return trace_; }
    const PointMatrix& inputs() const { return inputs_; }
    const Vector& outputs() const { return outputs_; }
    const GpOptions& options() const { return options_; }

private:
    GpSurrogate() = default;

    Vector cross_correlation(const Vector& u) const;
    double trend_value(const Vector& u) const;

    GpOptions options_;
    PointMatrix inputs_;
    Vector outputs_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    bool constant_ = false;

    Vector lengthscales_;
    double relative_nugget_ = 0.0;
    double signal_variance_ = 0.0;
    Vector trend_;
    double log_likelihood_ = 0.0;
    std::vector<double> trace_;

    Eigen::MatrixXd chol_lower_;
    Vector weights_;
};

/// Series-system surrogate: one GP per component, prediction is the minimum.
class CompositeMinSurrogate final : public Surrogate {
public:
    static CompositeMinSurrogate fit(const PointMatrix& inputs, const Eigen::MatrixXd& component_outputs,
                                     const GpOptions& options = {},
                                     const std::vector<Vector>* warm_start_log_lengthscales = nullptr);

    std::size_t dim() const override { return components_.front().dim(); }
    std::size_t training_size() const override { return components_.front().training_size(); }

    double predict_mean(const Vector& u) const override;
    bool provides_sd() const override { return true; }
    /// Standard deviation of the component attaining the minimum mean.
    double predict_sd(const Vector& u) const override;
    Vector predict_mean(const PointMatrix& points) const override;
    Vector predict_sd(const PointMatrix& points) const override;

    std::unique_ptr<Surrogate> refit(const SupportPointSet& support) const override;
    nlohmann::json to_json() const override;

    const std::vector<GpSurrogate>& components() const { return components_; }

private:
    std::vector<GpSurrogate> components_;
};

enum class SurrogateMode { Aggregated, CompositeMin };

/// Fits the surrogate the mode asks for; CompositeMin requires a series_min problem.
std::unique_ptr<Surrogate> fit_surrogate(const SupportPointSet& support, SurrogateMode mode, const GpOptions& options);

/// Default mode for a problem: composite for series systems, aggregated otherwise.
SurrogateMode default_surrogate_mode(const ProblemSpec& problem);

}  // namespace s4is

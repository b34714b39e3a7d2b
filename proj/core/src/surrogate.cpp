#include "s4is/surrogate.hpp"

#include "s4is/errors.hpp"
#include "s4is/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace s4is {

// ---------------------------------------------------------------------------
// SupportPointSet

SupportPointSet::SupportPointSet(std::size_t dim, std::size_t num_components)
    : dim_(dim), num_components_(num_components), inputs_u_(0, dim), inputs_theta_(0, dim),
      component_outputs_(0, num_components) {}

bool SupportPointSet::contains(const Vector& u) const {
    for (Eigen::Index i = 0; i < inputs_u_.rows(); ++i) {
        if ((inputs_u_.row(i).transpose().array() == u.array()).all()) return true;
    }
    return false;
}

void SupportPointSet::append(const Vector& u, const Vector& theta, const Evaluation& value) {
    if (static_cast<std::size_t>(u.size()) != dim_ || static_cast<std::size_t>(theta.size()) != dim_) {
        throw PreconditionError("support point dimension mismatch");
    }
    if (value.components.size() != num_components_) throw PreconditionError("support point component count mismatch");
    if (contains(u)) throw PreconditionError("support point already present");
    const Eigen::Index n = inputs_u_.rows();
    inputs_u_.conservativeResize(n + 1, Eigen::NoChange);
    inputs_theta_.conservativeResize(n + 1, Eigen::NoChange);
    outputs_.conservativeResize(n + 1);
    component_outputs_.conservativeResize(n + 1, Eigen::NoChange);
    inputs_u_.row(n) = u.transpose();
    inputs_theta_.row(n) = theta.transpose();
    outputs_[n] = value.g;
    for (std::size_t c = 0; c < num_components_; ++c) component_outputs_(n, static_cast<Eigen::Index>(c)) = value.components[c];
}

double SupportPointSet::output_scale() const {
    if (outputs_.size() < 2) return 1.0;
    const double mean = outputs_.mean();
    const double var = (outputs_.array() - mean).square().sum() / static_cast<double>(outputs_.size() - 1);
    return var > 0.0 ? std::sqrt(var) : 1.0;
}

std::string gp_trend_name(GpTrend trend) { return trend == GpTrend::Linear ? "linear" : "constant"; }

GpTrend gp_trend_from_name(const std::string& name) {
    if (name == "constant") return GpTrend::Constant;
    if (name == "linear") return GpTrend::Linear;
    throw ConfigError("unknown GP trend '" + name + "'");
}

// ---------------------------------------------------------------------------
// Surrogate defaults

double Surrogate::predict_sd(const Vector&) const {
    throw PreconditionError("this surrogate provides no predictive standard deviation");
}

Vector Surrogate::predict_mean(const PointMatrix& points) const {
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = predict_mean(Vector(points.row(i).transpose()));
    return out;
}

Vector Surrogate::predict_sd(const PointMatrix& points) const {
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = predict_sd(Vector(points.row(i).transpose()));
    return out;
}

// ---------------------------------------------------------------------------
// Likelihood

namespace {

Eigen::MatrixXd correlation_matrix(const PointMatrix& scaled) {
    const Eigen::Index n = scaled.rows();
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        c(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = std::exp(-0.5 * (scaled.row(i) - scaled.row(j)).squaredNorm());
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

PointMatrix scale_inputs(const PointMatrix& x, const Vector& lengthscales) {
    return (x.array().rowwise() / lengthscales.transpose().array()).matrix();
}

struct Profile {
    bool ok = false;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    Vector trend;
    double signal_variance = 0.0;
    Eigen::MatrixXd chol_lower;
    Vector weights;  // R^-1 (z - F trend)
};

Eigen::MatrixXd trend_basis(const PointMatrix& x, GpTrend trend) {
    if (trend == GpTrend::Constant) return Eigen::MatrixXd::Ones(x.rows(), 1);
    Eigen::MatrixXd f(x.rows(), x.cols() + 1);
    f.col(0).setOnes();
    f.rightCols(x.cols()) = x;
    return f;
}

/// Concentrated log-likelihood of standardized outputs z; gradient w.r.t. log-lengthscales.
Profile profile_likelihood(const PointMatrix& x, const Vector& z, const Vector& log_ls, double tau, GpTrend trend,
                           Vector* grad) {
    Profile p;
    const Eigen::Index n = x.rows();
    const Vector ls = log_ls.array().exp();
    const PointMatrix xs = scale_inputs(x, ls);
    const Eigen::MatrixXd c = correlation_matrix(xs);
    Eigen::MatrixXd r = c;
    r.diagonal().array() += tau;
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) return p;
    const Eigen::MatrixXd lower = llt.matrixL();
    const Vector diag = lower.diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) return p;

    // Generalized least squares for the trend coefficients.
    const Eigen::MatrixXd f = trend_basis(x, trend);
    const Eigen::MatrixXd r_inv_f = llt.solve(f);
    const Vector r_inv_z = llt.solve(z);
    Eigen::LLT<Eigen::MatrixXd> gls(f.transpose() * r_inv_f);
    if (gls.info() != Eigen::Success) return p;
    p.trend = gls.solve(f.transpose() * r_inv_z);
    if (!p.trend.allFinite()) return p;
    const Vector resid = z - f * p.trend;
    p.weights = r_inv_z - r_inv_f * p.trend;
    p.signal_variance = std::max(resid.dot(p.weights) / static_cast<double>(n), 1e-300);
    const double log_det = 2.0 * diag.array().log().sum();
    p.log_likelihood = -0.5 * static_cast<double>(n) * std::log(p.signal_variance) - 0.5 * log_det;
    if (!std::isfinite(p.log_likelihood)) return p;

    if (grad) {
        // The trend is at its optimum, so only the explicit dependence on R contributes.
        const Eigen::MatrixXd r_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        Eigen::MatrixXd m = (p.weights * p.weights.transpose()) / p.signal_variance - r_inv;
        m.array() *= c.array();
        const Eigen::Index d = x.cols();
        grad->setZero(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                const double w = m(i, j);
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double diff = xs(i, k) - xs(j, k);
                    (*grad)[k] += w * diff * diff;
                }
            }
        }
        // 0.5 * sum over ordered pairs == sum over i > j
        if (!grad->allFinite()) return p;
    }
    p.chol_lower = lower;
    p.ok = true;
    return p;
}

void check_training_data(const PointMatrix& x, const Vector& y, GpTrend trend) {
    if (x.rows() != y.size()) throw PreconditionError("inputs and outputs differ in length");
    if (trend == GpTrend::Linear && x.rows() <= x.cols() + 1) {
        throw PreconditionError("a linear trend needs more than d + 1 support points");
    }
    if (x.rows() < 2) throw PreconditionError("a surrogate needs at least 2 support points");
    if (x.cols() < 1) throw PreconditionError("inputs need dimension >= 1");
    if (!x.allFinite() || !y.allFinite()) throw PreconditionError("training data must be finite");
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if ((x.row(i).array() == x.row(j).array()).all()) {
                throw PreconditionError("duplicate support inputs at rows " + std::to_string(j) + " and " + std::to_string(i));
            }
        }
    }
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

// ---------------------------------------------------------------------------
// GpSurrogate


GpSurrogate GpSurrogate::fit(const PointMatrix& inputs, const Vector& outputs, const GpOptions& options,
                             const Vector* warm_start) {
    check_training_data(inputs, outputs, options.trend);
    if (!(options.min_lengthscale > 0.0 && options.max_lengthscale > options.min_lengthscale)) {
        throw ConfigError("invalid GP lengthscale bounds");
    }
    GpSurrogate gp;
    gp.options_ = options;
    gp.inputs_ = inputs;
    gp.outputs_ = outputs;
    const auto n = static_cast<double>(outputs.size());
    const Eigen::Index d = inputs.cols();
    gp.y_mean_ = outputs.mean();
    const double var = (outputs.array() - gp.y_mean_).square().sum() / (n - 1.0);
    gp.y_scale_ = std::sqrt(var);
    if (!(gp.y_scale_ > 0.0) || gp.y_scale_ <= 1e-300 * std::abs(gp.y_mean_)) {
        gp.constant_ = true;
        gp.y_scale_ = 1.0;
        gp.lengthscales_ = Vector::Ones(d);
        gp.relative_nugget_ = options.min_nugget;
        return gp;
    }
    const Vector z = (outputs.array() - gp.y_mean_) / gp.y_scale_;
    // The likelihood of a nearly singular R carries rounding noise well above 1e-8, so the ML
    // optimum follows last-bit changes in z (e.g. from training on y + c). Hyperparameters are
    // therefore estimated on z rounded to a 2^-30 grid; the final weights use z itself.
    const Vector z_search = (z.array() * 0x1p30).round() * 0x1p-30;

    const double lo = std::log(options.min_lengthscale);
    const double hi = std::log(options.max_lengthscale);
    const double span = hi - lo;
    auto to_free = [&](const Vector& log_ls) {
        Vector free(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const double p = std::clamp((log_ls[k] - lo) / span, 1e-6, 1.0 - 1e-6);
            free[k] = logit(p);
        }
        return free;
    };
    auto to_log_ls = [&](const Vector& free) {
        Vector log_ls(d);
        for (Eigen::Index k = 0; k < d; ++k) log_ls[k] = lo + span * sigmoid(free[k]);
        return log_ls;
    };

    std::vector<Vector> starts;
    if (warm_start && warm_start->size() == d) starts.push_back(*warm_start);
    Rng rng(options.seed);
    const double start_lo = std::log(std::max(options.min_lengthscale, 0.1));
    const double start_hi = std::log(std::min(options.max_lengthscale, 10.0));
    std::uniform_real_distribution<double> unif(std::min(start_lo, start_hi), std::max(start_lo, start_hi));
    for (int s = 0; s < options.restarts; ++s) {
        Vector v(d);
        for (Eigen::Index k = 0; k < d; ++k) v[k] = unif(rng);
        starts.push_back(v);
    }
    if (starts.empty()) starts.push_back(Vector::Zero(d));

    BfgsOptions bfgs;
    bfgs.max_iterations = options.max_optimizer_iterations;
    bfgs.gradient_tolerance = 1e-5;
    bfgs.relative_tolerance = 1e-9;

    for (double tau = options.min_nugget; tau <= options.max_nugget * (1.0 + 1e-9); tau *= 10.0) {
        Objective objective = [&](const Vector& free, Vector& grad) {
            const Vector log_ls = to_log_ls(free);
            Vector g_log;
            const Profile prof = profile_likelihood(inputs, z_search, log_ls, tau, options.trend, &g_log);
            if (!prof.ok) return std::numeric_limits<double>::infinity();
            grad.resize(d);
            for (Eigen::Index k = 0; k < d; ++k) {
                const double s = sigmoid(free[k]);
                grad[k] = -g_log[k] * span * s * (1.0 - s);
            }
            return -prof.log_likelihood;
        };
        BfgsResult best;
        best.value = std::numeric_limits<double>::infinity();
        for (const Vector& start : starts) {
            BfgsResult res = minimize_bfgs(objective, to_free(start), bfgs);
            if (std::isfinite(res.value) && res.value < best.value) best = std::move(res);
        }
        if (!std::isfinite(best.value)) continue;
        const Vector log_ls = to_log_ls(best.x);
        Profile prof = profile_likelihood(inputs, z, log_ls, tau, options.trend, nullptr);
        if (!prof.ok) continue;
        gp.lengthscales_ = log_ls.array().exp();
        gp.relative_nugget_ = tau;
        gp.signal_variance_ = prof.signal_variance;
        gp.trend_ = prof.trend;
        gp.log_likelihood_ = prof.log_likelihood;
        gp.chol_lower_ = std::move(prof.chol_lower);
        gp.weights_ = std::move(prof.weights);
        gp.trace_.clear();
        for (double f : best.trace) gp.trace_.push_back(-f);
        return gp;
    }
    throw FitError("kernel matrix is not positive definite even with relative nugget " + std::to_string(options.max_nugget));
}

GpSurrogate GpSurrogate::with_hyperparameters(const PointMatrix& inputs, const Vector& outputs,
                                              const Vector& lengthscales, double relative_nugget,
                                              const GpOptions& options) {
    check_training_data(inputs, outputs, options.trend);
    if (lengthscales.size() != inputs.cols() || !(lengthscales.array() > 0.0).all()) {
        throw PreconditionError("lengthscales must be positive, one per dimension");
    }
    GpSurrogate gp;
    gp.options_ = options;
    gp.inputs_ = inputs;
    gp.outputs_ = outputs;
    const auto n = static_cast<double>(outputs.size());
    gp.y_mean_ = outputs.mean();
    gp.y_scale_ = std::sqrt((outputs.array() - gp.y_mean_).square().sum() / (n - 1.0));
    gp.lengthscales_ = lengthscales;
    gp.relative_nugget_ = relative_nugget;
    if (!(gp.y_scale_ > 0.0)) {
        gp.constant_ = true;
        gp.y_scale_ = 1.0;
        return gp;
    }
    const Vector z = (outputs.array() - gp.y_mean_) / gp.y_scale_;
    Profile prof = profile_likelihood(inputs, z, lengthscales.array().log(), relative_nugget, options.trend, nullptr);
    if (!prof.ok) throw FitError("kernel matrix is not positive definite for the given hyperparameters");
    gp.signal_variance_ = prof.signal_variance;
    gp.trend_ = prof.trend;
    gp.log_likelihood_ = prof.log_likelihood;
    gp.chol_lower_ = std::move(prof.chol_lower);
    gp.weights_ = std::move(prof.weights);
    return gp;
}

GpSurrogate GpSurrogate::update(const Vector& u, double y) const {
    if (u.size() != inputs_.cols()) throw PreconditionError("update point dimension mismatch");
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        if ((inputs_.row(i).transpose().array() == u.array()).all()) {
            throw PreconditionError("update point already in the training set");
        }
    }
    PointMatrix x(inputs_.rows() + 1, inputs_.cols());
    x << inputs_, u.transpose();
    Vector out(outputs_.size() + 1);
    out << outputs_, y;
    const Vector warm = lengthscales_.array().log();
    return fit(x, out, options_, &warm);
}

double GpSurrogate::trend_value(const Vector& u) const {
    if (options_.trend == GpTrend::Constant) return trend_[0];
    return trend_[0] + trend_.tail(trend_.size() - 1).dot(u);
}

Vector GpSurrogate::cross_correlation(const Vector& u) const {
    const Eigen::Index n = inputs_.rows();
    Vector r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double q = ((inputs_.row(i).transpose() - u).array() / lengthscales_.array()).square().sum();
        r[i] = std::exp(-0.5 * q);
        // The nugget is a white-noise term: it correlates a training input with itself only.
        if (q == 0.0 && (inputs_.row(i).transpose().array() == u.array()).all()) r[i] += relative_nugget_;
    }
    return r;
}

double GpSurrogate::predict_mean(const Vector& u) const {
    if (u.size() != inputs_.cols()) throw PreconditionError("prediction point dimension mismatch");
    if (constant_) return y_mean_;
    return y_mean_ + y_scale_ * (trend_value(u) + cross_correlation(u).dot(weights_));
}

double GpSurrogate::predict_sd(const Vector& u) const {
    if (u.size() != inputs_.cols()) throw PreconditionError("prediction point dimension mismatch");
    if (constant_) return 0.0;
    const Vector r = cross_correlation(u);
    const Vector v = chol_lower_.triangularView<Eigen::Lower>().solve(r);
    const double prior = 1.0 + (r.maxCoeff() > 1.0 ? relative_nugget_ : 0.0);
    const double var = signal_variance_ * std::max(0.0, prior - v.squaredNorm());
    return y_scale_ * std::sqrt(var);
}

Vector GpSurrogate::predict_mean(const PointMatrix& points) const {
    if (points.cols() != inputs_.cols()) throw PreconditionError("prediction point dimension mismatch");
    if (constant_) return Vector::Constant(points.rows(), y_mean_);
    const PointMatrix xs = scale_inputs(inputs_, lengthscales_);
    const PointMatrix ps = scale_inputs(points, lengthscales_);
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < ps.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < xs.rows(); ++j) {
            const double q = (ps.row(i) - xs.row(j)).squaredNorm();
            acc += weights_[j] * (std::exp(-0.5 * q) + (q == 0.0 && points.row(i) == inputs_.row(j) ? relative_nugget_ : 0.0));
        }
        out[i] = y_mean_ + y_scale_ * (trend_value(points.row(i).transpose()) + acc);
    }
    return out;
}

Vector GpSurrogate::predict_sd(const PointMatrix& points) const {
    if (points.cols() != inputs_.cols()) throw PreconditionError("prediction point dimension mismatch");
    if (constant_) return Vector::Zero(points.rows());
    const PointMatrix xs = scale_inputs(inputs_, lengthscales_);
    const PointMatrix ps = scale_inputs(points, lengthscales_);
    Eigen::MatrixXd cross(xs.rows(), ps.rows());
    Vector prior = Vector::Ones(ps.rows());
    for (Eigen::Index i = 0; i < ps.rows(); ++i) {
        for (Eigen::Index j = 0; j < xs.rows(); ++j) {
            const double q = (ps.row(i) - xs.row(j)).squaredNorm();
            cross(j, i) = std::exp(-0.5 * q);
            if (q == 0.0 && points.row(i) == inputs_.row(j)) {
                cross(j, i) += relative_nugget_;
                prior[i] = 1.0 + relative_nugget_;
            }
        }
    }
    chol_lower_.triangularView<Eigen::Lower>().solveInPlace(cross);
    Vector out(points.rows());
    for (Eigen::Index i = 0; i < ps.rows(); ++i) {
        const double var = signal_variance_ * std::max(0.0, prior[i] - cross.col(i).squaredNorm());
        out[i] = y_scale_ * std::sqrt(var);
    }
    return out;
}

std::unique_ptr<Surrogate> GpSurrogate::refit(const SupportPointSet& support) const {
    const Vector warm = lengthscales_.array().log();
    return std::make_unique<GpSurrogate>(fit(support.inputs_u(), support.outputs(), options_, &warm));
}

namespace {

nlohmann::json matrix_to_json(const PointMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(std::vector<double>(m.row(i).data(), m.row(i).data() + m.cols()));
    }
    return rows;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json GpSurrogate::to_json() const {
    return {
        {"kind", "gp"},
        {"lengthscales", to_std(lengthscales_)},
        {"relative_nugget", relative_nugget_},
        {"signal_variance", signal_variance_},
        {"trend", gp_trend_name(options_.trend)},
        {"trend_coefficients", to_std(trend_)},
        {"output_mean", y_mean_},
        {"output_scale", y_scale_},
        {"log_likelihood", log_likelihood_},
        {"options", {{"restarts", options_.restarts},
                     {"min_lengthscale", options_.min_lengthscale},
                     {"max_lengthscale", options_.max_lengthscale},
                     {"min_nugget", options_.min_nugget},
                     {"max_nugget", options_.max_nugget},
                     {"seed", options_.seed},
                     {"max_optimizer_iterations", options_.max_optimizer_iterations},
                     {"trend", gp_trend_name(options_.trend)}}},
        {"inputs", matrix_to_json(inputs_)},
        {"outputs", to_std(outputs_)},
    };
}

GpSurrogate GpSurrogate::from_json(const nlohmann::json& j) {
    try {
        if (j.at("kind").get<std::string>() != "gp") throw DataError("model dump is not a GP");
        const auto rows = j.at("inputs").get<std::vector<std::vector<double>>>();
        const auto out = j.at("outputs").get<std::vector<double>>();
        const auto ls = j.at("lengthscales").get<std::vector<double>>();
        if (rows.empty()) throw DataError("model dump has no training inputs");
        PointMatrix x(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size()) throw DataError("ragged training inputs in model dump");
            for (std::size_t k = 0; k < rows[i].size(); ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
        GpOptions opts;
        const auto& o = j.at("options");
        opts.restarts = o.at("restarts").get<int>();
        opts.min_lengthscale = o.at("min_lengthscale").get<double>();
        opts.max_lengthscale = o.at("max_lengthscale").get<double>();
        opts.min_nugget = o.at("min_nugget").get<double>();
        opts.max_nugget = o.at("max_nugget").get<double>();
        opts.seed = o.at("seed").get<std::uint64_t>();
        opts.max_optimizer_iterations = o.at("max_optimizer_iterations").get<int>();
        opts.trend = gp_trend_from_name(o.at("trend").get<std::string>());
        return with_hyperparameters(x, Eigen::Map<const Vector>(out.data(), static_cast<Eigen::Index>(out.size())),
                                    Eigen::Map<const Vector>(ls.data(), static_cast<Eigen::Index>(ls.size())),
                                    j.at("relative_nugget").get<double>(), opts);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed GP model dump: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// CompositeMinSurrogate

CompositeMinSurrogate CompositeMinSurrogate::fit(const PointMatrix& inputs, const Eigen::MatrixXd& component_outputs,
                                                 const GpOptions& options, const std::vector<Vector>* warm) {
    if (component_outputs.cols() < 1) throw PreconditionError("composite surrogate needs at least one component");
    if (component_outputs.rows() != inputs.rows()) throw PreconditionError("component outputs and inputs differ in length");
    CompositeMinSurrogate s;
    for (Eigen::Index c = 0; c < component_outputs.cols(); ++c) {
        const Vector* w = (warm && static_cast<std::size_t>(c) < warm->size()) ? &(*warm)[static_cast<std::size_t>(c)] : nullptr;
        s.components_.push_back(GpSurrogate::fit(inputs, component_outputs.col(c), options, w));
    }
    return s;
}

double CompositeMinSurrogate::predict_mean(const Vector& u) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : components_) best = std::min(best, c.predict_mean(u));
    return best;
}

double CompositeMinSurrogate::predict_sd(const Vector& u) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const double m = components_[i].predict_mean(u);
        if (m < best) {
            best = m;
            arg = i;
        }
    }
    return components_[arg].predict_sd(u);
}

Vector CompositeMinSurrogate::predict_mean(const PointMatrix& points) const {
    Vector best = components_.front().predict_mean(points);
    for (std::size_t i = 1; i < components_.size(); ++i) best = best.cwiseMin(components_[i].predict_mean(points));
    return best;
}

Vector CompositeMinSurrogate::predict_sd(const PointMatrix& points) const {
    Vector best = components_.front().predict_mean(points);
    Vector sd = components_.front().predict_sd(points);
    for (std::size_t i = 1; i < components_.size(); ++i) {
        const Vector m = components_[i].predict_mean(points);
        const Vector s = components_[i].predict_sd(points);
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            if (m[k] < best[k]) {
                best[k] = m[k];
                sd[k] = s[k];
            }
        }
    }
    return sd;
}

std::unique_ptr<Surrogate> CompositeMinSurrogate::refit(const SupportPointSet& support) const {
    std::vector<Vector> warm;
    for (const auto& c : components_) warm.push_back(c.lengthscales().array().log());
    return std::make_unique<CompositeMinSurrogate>(
        fit(support.inputs_u(), support.component_outputs(), components_.front().options(), &warm));
}

nlohmann::json CompositeMinSurrogate::to_json() const {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& c : components_) parts.push_back(c.to_json());
    return {{"kind", "composite_min"}, {"components", parts}};
}

std::unique_ptr<Surrogate> fit_surrogate(const SupportPointSet& support, SurrogateMode mode, const GpOptions& options) {
    if (mode == SurrogateMode::CompositeMin) {
        if (support.num_components() < 2) throw ConfigError("composite surrogate needs a multi-component problem");
        return std::make_unique<CompositeMinSurrogate>(
            CompositeMinSurrogate::fit(support.inputs_u(), support.component_outputs(), options));
    }
    return std::make_unique<GpSurrogate>(GpSurrogate::fit(support.inputs_u(), support.outputs(), options));
}

SurrogateMode default_surrogate_mode(const ProblemSpec& problem) {
    return problem.aggregation == Aggregation::SeriesMin ? SurrogateMode::CompositeMin : SurrogateMode::Aggregated;
}

}  // namespace s4is

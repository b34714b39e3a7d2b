#include "s4is/probability.hpp"

#include "s4is/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace s4is {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

std::string describe(MarginalKind kind, double mean, double sd) {
    return to_string(kind) + "(mean=" + std::to_string(mean) + ", sd=" + std::to_string(sd) + ")";
}

}  // namespace

std::string to_string(MarginalKind kind) {
    switch (kind) {
        case MarginalKind::Normal: return "normal";
        case MarginalKind::Lognormal: return "lognormal";
        case MarginalKind::Uniform: return "uniform";
    }
    return "unknown";
}

MarginalKind marginal_kind_from_string(const std::string& name) {
    if (name == "normal") return MarginalKind::Normal;
    if (name == "lognormal") return MarginalKind::Lognormal;
    if (name == "uniform") return MarginalKind::Uniform;
    throw ConfigError("unknown marginal kind '" + name + "' (expected normal, lognormal or uniform)");
}

Marginal::Marginal(MarginalKind kind, double mean, double sd) : kind_(kind), mean_(mean), sd_(sd) {
    if (!std::isfinite(mean) || !std::isfinite(sd) || !(sd > 0.0)) {
        throw ConfigError("invalid marginal " + describe(kind, mean, sd) + ": sd must be finite and > 0");
    }
    switch (kind) {
        case MarginalKind::Normal:
            p1_ = mean;
            p2_ = sd;
            break;
        case MarginalKind::Lognormal: {
            if (!(mean > 0.0)) {
                throw ConfigError("invalid marginal " + describe(kind, mean, sd) + ": lognormal mean must be > 0");
            }
            const double cv = sd / mean;
            const double var_log = std::log1p(cv * cv);
            p2_ = std::sqrt(var_log);
            p1_ = std::log(mean) - 0.5 * var_log;
            break;
        }
        case MarginalKind::Uniform: {
            const double half = std::numbers::sqrt3 * sd;
            p1_ = mean - half;
            p2_ = mean + half;
            break;
        }
    }
}

Marginal Marginal::normal(double mean, double sd) { return {MarginalKind::Normal, mean, sd}; }
Marginal Marginal::lognormal(double mean, double sd) { return {MarginalKind::Lognormal, mean, sd}; }
Marginal Marginal::uniform(double mean, double sd) { return {MarginalKind::Uniform, mean, sd}; }
Marginal Marginal::make(MarginalKind kind, double mean, double sd) { return {kind, mean, sd}; }

double Marginal::to_u(double theta) const {
    if (!std::isfinite(theta)) throw DomainError("non-finite input " + std::to_string(theta));
    switch (kind_) {
        case MarginalKind::Normal:
            return (theta - p1_) / p2_;
        case MarginalKind::Lognormal:
            if (!(theta > 0.0)) {
                throw DomainError("value " + std::to_string(theta) + " outside lognormal support (0, inf)");
            }
            return (std::log(theta) - p1_) / p2_;
        case MarginalKind::Uniform:
            if (!(theta > p1_ && theta < p2_)) {
                throw DomainError("value " + std::to_string(theta) + " outside uniform support (" +
                                  std::to_string(p1_) + ", " + std::to_string(p2_) + ")");
            }
            return normal_quantile((theta - p1_) / (p2_ - p1_));
    }
    return 0.0;
}

double Marginal::from_u(double u) const {
    if (!std::isfinite(u)) throw DomainError("non-finite standard-normal coordinate");
    switch (kind_) {
        case MarginalKind::Normal: return p1_ + p2_ * u;
        case MarginalKind::Lognormal: return std::exp(p1_ + p2_ * u);
        case MarginalKind::Uniform: return p1_ + (p2_ - p1_) * normal_cdf(u);
    }
    return 0.0;
}

RandomVector::RandomVector(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
    if (marginals_.empty()) throw ConfigError("random vector needs at least one marginal");
}

RandomVector RandomVector::standard_normal(std::size_t dim) {
    return RandomVector(std::vector<Marginal>(dim, Marginal::normal(0.0, 1.0)));
}

Vector RandomVector::to_standard_normal(const Vector& theta) const {
    if (static_cast<std::size_t>(theta.size()) != dim()) {
        throw PreconditionError("point has dimension " + std::to_string(theta.size()) + ", expected " +
                                std::to_string(dim()));
    }
    Vector u(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        try {
            u[i] = marginals_[static_cast<std::size_t>(i)].to_u(theta[i]);
        } catch (const DomainError& e) {
            throw DomainError("component " + std::to_string(i) + ": " + e.what());
        }
    }
    return u;
}

Vector RandomVector::from_standard_normal(const Vector& u) const {
    if (static_cast<std::size_t>(u.size()) != dim()) {
        throw PreconditionError("point has dimension " + std::to_string(u.size()) + ", expected " +
                                std::to_string(dim()));
    }
    Vector theta(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        try {
            theta[i] = marginals_[static_cast<std::size_t>(i)].from_u(u[i]);
        } catch (const DomainError& e) {
            throw DomainError("component " + std::to_string(i) + ": " + e.what());
        }
    }
    return theta;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("probability " + std::to_string(p) + " outside (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double std_normal_log_pdf(const Vector& u) {
    return -0.5 * static_cast<double>(u.size()) * kLogTwoPi - 0.5 * u.squaredNorm();
}

double std_normal_pdf(const Vector& u) { return std::exp(std_normal_log_pdf(u)); }

double hypercube_density(const Vector& u) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!(std::abs(u[i]) <= kHypercubeHalfWidth)) return 0.0;
    }
    return std::pow(2.0 * kHypercubeHalfWidth, -static_cast<double>(u.size()));
}

PointMatrix sample_hypercube(std::size_t dim, std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> unif(-kHypercubeHalfWidth, kHypercubeHalfWidth);
    PointMatrix pts(n, dim);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = unif(rng);
    }
    return pts;
}

PointMatrix sample_std_normal(std::size_t dim, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    PointMatrix pts(n, dim);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = normal(rng);
    }
    return pts;
}

GaussianMixture::GaussianMixture(PointMatrix centers) : centers_(std::move(centers)) {
    if (centers_.rows() < 1 || centers_.cols() < 1) {
        throw PreconditionError("gaussian mixture needs at least one center of dimension >= 1");
    }
}

double GaussianMixture::log_pdf(const Vector& u) const {
    if (u.size() != centers_.cols()) throw PreconditionError("mixture dimension mismatch");
    const auto k = centers_.rows();
    Vector terms(k);
    for (Eigen::Index t = 0; t < k; ++t) terms[t] = -0.5 * (u.transpose() - centers_.row(t)).squaredNorm();
    const double top = terms.maxCoeff();
    const double sum = (terms.array() - top).exp().sum();
    return top + std::log(sum) - std::log(static_cast<double>(k)) -
           0.5 * static_cast<double>(u.size()) * kLogTwoPi;
}

double GaussianMixture::pdf(const Vector& u) const { return std::exp(log_pdf(u)); }

PointMatrix GaussianMixture::sample(std::size_t n, Rng& rng) const {
    std::uniform_int_distribution<Eigen::Index> pick(0, centers_.rows() - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    PointMatrix pts(n, centers_.cols());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const Eigen::Index t = pick(rng);
        for (Eigen::Index j = 0; j < pts.cols(); ++j) pts(i, j) = centers_(t, j) + normal(rng);
    }
    return pts;
}

}  // namespace s4is

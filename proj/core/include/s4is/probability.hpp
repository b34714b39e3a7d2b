#pragma once

#include "s4is/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace s4is {

enum class MarginalKind { Normal, Lognormal, Uniform };

std::string to_string(MarginalKind kind);
MarginalKind marginal_kind_from_string(const std::string& name);

/// One-dimensional input distribution, parameterized by its original-space mean
/// and standard deviation whatever the family.
class Marginal {
public:
    static Marginal normal(double mean, double sd);
    /// Lognormal with original-space moments; log-space parameters are derived.
    static Marginal lognormal(double mean, double sd);
    /// Uniform on [mean - sqrt(3) sd, mean + sqrt(3) sd].
    static Marginal uniform(double mean, double sd);
    static Marginal make(MarginalKind kind, double mean, double sd);

    MarginalKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double sd() const { return sd_; }

    /// Log-space location and scale; only meaningful for Lognormal.
    double log_location() const { return p1_; }
    double log_scale() const { return p2_; }
    /// Uniform bounds; only meaningful for Uniform.
    double lower() const { return p1_; }
    double upper() const { return p2_; }

    /// Phi^-1(F(theta)). Throws DomainError outside the support.
    double to_u(double theta) const;
    /// F^-1(Phi(u)). Throws DomainError for non-finite u.
    double from_u(double u) const;

private:
    Marginal(MarginalKind kind, double mean, double sd);

    MarginalKind kind_;
    double mean_;
    double sd_;
    double p1_ = 0.0;
    double p2_ = 0.0;
};

/// Independent marginals; the isoprobabilistic transform is applied componentwise.
class RandomVector {
public:
    explicit RandomVector(std::vector<Marginal> marginals);
    static RandomVector standard_normal(std::size_t dim);

    std::size_t dim() const { return marginals_.size(); }
    const Marginal& operator[](std::size_t i) const { return marginals_[i]; }
    const std::vector<Marginal>& marginals() const { return marginals_; }

    Vector to_standard_normal(const Vector& theta) const;
    Vector from_standard_normal(const Vector& u) const;

private:
    std::vector<Marginal> marginals_;
};

double normal_cdf(double x);
double normal_quantile(double p);

double std_normal_pdf(const Vector& u);
double std_normal_log_pdf(const Vector& u);

inline constexpr double kHypercubeHalfWidth = 5.0;

/// Uniform density on the closed cube [-5, 5]^d.
double hypercube_density(const Vector& u);

PointMatrix sample_hypercube(std::size_t dim, std::size_t n, Rng& rng);
PointMatrix sample_std_normal(std::size_t dim, std::size_t n, Rng& rng);

/// Equal-weight mixture of unit-covariance Gaussians.
class GaussianMixture {
public:
    explicit GaussianMixture(PointMatrix centers);

    std::size_t size() const { return static_cast<std::size_t>(centers_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(centers_.cols()); }
    const PointMatrix& centers() const { return centers_; }
    double weight() const { return 1.0 / static_cast<double>(size()); }

    double pdf(const Vector& u) const;
    /// Stable for points far from every center.
    double log_pdf(const Vector& u) const;
    PointMatrix sample(std::size_t n, Rng& rng) const;

private:
    PointMatrix centers_;
};

}  // namespace s4is

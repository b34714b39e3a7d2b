#include "oracle_values.hpp"

#include <s4is/errors.hpp>
#include <s4is/probability.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace s4is;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("standard normal marginals map to themselves") {
    const RandomVector rv = RandomVector::standard_normal(2);
    CHECK(rv.to_standard_normal(vec({0, 0})).norm() == doctest::Approx(0.0));
    const Vector theta = rv.from_standard_normal(vec({3, -1}));
    CHECK(theta(0) == doctest::Approx(3.0));
    CHECK(theta(1) == doctest::Approx(-1.0));
}

TEST_CASE("normal marginal shifts and scales") {
    CHECK(Marginal::normal(1.5, 1.0).to_u(1.5) == doctest::Approx(0.0));
    CHECK(Marginal::normal(2.5, 1.0).from_u(1.0) == doctest::Approx(3.5));
}

TEST_CASE("lognormal moment matching") {
    const Marginal wide = Marginal::lognormal(1.0, 2.0);
    CHECK(wide.log_scale() == doctest::Approx(std::sqrt(std::log(5.0))).epsilon(1e-12));
    CHECK(wide.log_location() == doctest::Approx(-0.5 * std::log(5.0)).epsilon(1e-12));
    CHECK(wide.from_u(0.0) == doctest::Approx(0.44721).epsilon(1e-5));
    CHECK(wide.to_u(std::exp(wide.log_location())) == doctest::Approx(0.0).epsilon(1e-12));

    const Marginal narrow = Marginal::lognormal(1.0, 0.2);
    CHECK(narrow.log_location() == doctest::Approx(oracle::kLognormal02LogLocation).epsilon(1e-12));
    CHECK(narrow.log_scale() == doctest::Approx(oracle::kLognormal02LogScale).epsilon(1e-12));
    CHECK(narrow.from_u(1.0) == doctest::Approx(oracle::kLognormal02AtU1).epsilon(1e-12));

    // Moments recovered from the log-space parameters.
    const double m = std::exp(narrow.log_location() + 0.5 * narrow.log_scale() * narrow.log_scale());
    const double v = (std::exp(narrow.log_scale() * narrow.log_scale()) - 1.0) * m * m;
    CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::sqrt(v) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("lognormal sample moments match the declared ones") {
    const Marginal ln = Marginal::lognormal(1.0, 2.0);
    Rng rng(11);
    std::normal_distribution<double> z;
    const int n = 400000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += ln.from_u(z(rng));
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("uniform marginal covers mean +- sqrt(3) sd") {
    const Marginal u = Marginal::uniform(0.0, 1.0);
    CHECK(u.lower() == doctest::Approx(-std::sqrt(3.0)));
    CHECK(u.upper() == doctest::Approx(std::sqrt(3.0)));
    CHECK(u.from_u(0.5) == doctest::Approx(oracle::kUniformStdAtU05).epsilon(1e-12));
}

TEST_CASE("out-of-support and non-finite inputs are domain errors") {
    CHECK_THROWS_AS(Marginal::lognormal(1.0, 0.2).to_u(0.0), DomainError);
    CHECK_THROWS_AS(Marginal::lognormal(1.0, 0.2).to_u(-1.0), DomainError);
    CHECK_THROWS_AS(Marginal::uniform(0.0, 1.0).to_u(2.0), DomainError);
    CHECK_THROWS_AS(Marginal::normal(0.0, 1.0).from_u(std::nan("")), DomainError);
    CHECK_THROWS_AS(Marginal::normal(0.0, 1.0).from_u(INFINITY), DomainError);
    CHECK_THROWS_AS(Marginal::normal(0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(Marginal::lognormal(-1.0, 1.0), ConfigError);
}

TEST_CASE("domain error names the offending component") {
    const RandomVector rv({Marginal::normal(0, 1), Marginal::lognormal(1, 0.2)});
    try {
        rv.to_standard_normal(vec({0.0, -2.0}));
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find('1') != std::string::npos);
    }
}

TEST_CASE("standard normal density") {
    CHECK(std_normal_pdf(vec({0, 0})) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
    CHECK(std_normal_pdf(vec({0})) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(std_normal_pdf(vec({3, 4})) == doctest::Approx(5.9305e-7).epsilon(1e-4));
    CHECK(std_normal_pdf(vec({1, 1})) == doctest::Approx(oracle::kStdNormalPdf2dAt1_1).epsilon(1e-12));
    CHECK(std_normal_log_pdf(vec({3, 4})) == doctest::Approx(std::log(std_normal_pdf(vec({3, 4})))));
    // Rotation invariance.
    CHECK(std_normal_pdf(vec({0.6, 0.8})) == doctest::Approx(std_normal_pdf(vec({1.0, 0.0}))).epsilon(1e-14));
}

TEST_CASE("normal cdf and quantile") {
    CHECK(normal_cdf(-3.0) == doctest::Approx(oracle::kPhiMinus3).epsilon(1e-12));
    CHECK(normal_cdf(-4.0) == doctest::Approx(oracle::kPhiMinus4).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(oracle::kPhiInvOf0975).epsilon(1e-12));
}

TEST_CASE("hypercube density has a closed support") {
    CHECK(hypercube_density(vec({0, 0})) == doctest::Approx(0.01));
    CHECK(hypercube_density(vec({6, 0})) == 0.0);
    CHECK(hypercube_density(vec({-5})) == doctest::Approx(0.1));
}

TEST_CASE("samplers") {
    Rng rng(3);
    const PointMatrix cube = sample_hypercube(2, 20000, rng);
    CHECK(cube.minCoeff() >= -5.0);
    CHECK(cube.maxCoeff() <= 5.0);

    const PointMatrix z = sample_std_normal(1, 100000, rng);
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / (z.rows() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));

    const GaussianMixture gm(PointMatrix{{3.0, 0.0}});
    const PointMatrix s = gm.sample(100000, rng);
    CHECK(s.col(0).mean() == doctest::Approx(3.0).epsilon(0.02 / 3.0));
    CHECK(std::abs(s.col(1).mean()) < 0.02);
}

TEST_CASE("samplers are reproducible from the seed") {
    Rng a(42), b(42);
    CHECK(sample_std_normal(3, 50, a) == sample_std_normal(3, 50, b));
    const GaussianMixture gm(PointMatrix{{1.0, 0.0}, {-1.0, 2.0}});
    CHECK(gm.sample(50, a) == gm.sample(50, b));
}

TEST_CASE("mixture density") {
    const GaussianMixture one(PointMatrix{{3.0, 0.0}});
    CHECK(one.pdf(vec({3, 0})) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));

    const GaussianMixture two(PointMatrix{{3.0, 0.0}, {-3.0, 0.0}});
    CHECK(two.pdf(vec({3, 0})) == doctest::Approx(0.0795776).epsilon(1e-6));

    const GaussianMixture mixed(PointMatrix{{1.0, 0.0}, {-1.0, 2.0}});
    CHECK(mixed.pdf(vec({0.5, -0.25})) == doctest::Approx(oracle::kGmPdfTwoCenters).epsilon(1e-12));
    CHECK(mixed.log_pdf(vec({0.5, -0.25})) == doctest::Approx(std::log(oracle::kGmPdfTwoCenters)).epsilon(1e-12));
    // Far from every centre the log form stays finite.
    CHECK(std::isfinite(mixed.log_pdf(vec({60.0, 60.0}))));
}

TEST_CASE("mixture dominates each scaled component") {
    const GaussianMixture gm(PointMatrix{{2.0, 1.0}, {-1.0, 0.5}, {0.0, -3.0}});
    Rng rng(5);
    const PointMatrix pts = sample_std_normal(2, 200, rng) * 2.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const Vector u = pts.row(i).transpose();
        for (Eigen::Index t = 0; t < gm.centers().rows(); ++t) {
            const Vector c = gm.centers().row(t).transpose();
            CHECK(gm.pdf(u) >= std_normal_pdf(u - c) * gm.weight() * (1.0 - 1e-12));
        }
    }
}

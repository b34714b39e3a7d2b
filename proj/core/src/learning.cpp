#include "s4is/learning.hpp"

#include "s4is/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace s4is {

CandidatePool::CandidatePool(PointMatrix points)
    : points_(std::move(points)), selected_(static_cast<std::size_t>(points_.rows()), false) {}

void CandidatePool::mark_selected(std::size_t i) {
    if (i >= size()) throw PreconditionError("candidate index out of range");
    if (selected_[i]) throw PreconditionError("candidate already selected");
    selected_[i] = true;
    ++n_selected_;
}

void CandidatePool::append(const PointMatrix& more) {
    if (size() > 0 && more.cols() != points_.cols()) throw PreconditionError("candidate dimension mismatch");
    const Eigen::Index n = points_.rows();
    points_.conservativeResize(n + more.rows(), more.cols());
    points_.bottomRows(more.rows()) = more;
    selected_.resize(selected_.size() + static_cast<std::size_t>(more.rows()), false);
}

double euclidean_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw PreconditionError("distance between points of different dimension");
    return (a - b).norm();
}

double min_distance(const Vector& u, const PointMatrix& set) {
    if (set.rows() == 0) throw PreconditionError("minimum distance to an empty set");
    if (set.cols() != u.size()) throw PreconditionError("distance between points of different dimension");
    return std::sqrt((set.rowwise() - u.transpose()).rowwise().squaredNorm().minCoeff());
}

Vector min_distances(const PointMatrix& points, const PointMatrix& set) {
    if (set.rows() == 0) throw PreconditionError("minimum distance to an empty set");
    Vector out = Vector::Constant(points.rows(), std::numeric_limits<double>::infinity());
    for (Eigen::Index j = 0; j < set.rows(); ++j) update_min_distances(out, points, set.row(j).transpose());
    return out;
}

void update_min_distances(Vector& current, const PointMatrix& points, const Vector& added) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double d = (points.row(i).transpose() - added).norm();
        if (d < current[i]) current[i] = d;
    }
}

double lf1(const Surrogate& model, const Vector& u, const PointMatrix& support_u, double scale) {
    return std::abs(model.predict_mean(u)) / scale - min_distance(u, support_u);
}

double lf2(const Surrogate& model, const Vector& u, const PointMatrix& support_u, double scale, double pn, double q2) {
    if (!(q2 > 0.0)) throw DomainError("instrumental density must be positive for lf2");
    return lf1(model, u, support_u, scale) - (std::log(pn) - std::log(q2));
}

Vector lf1_scores(const Vector& mean, const Vector& min_dist, double scale) {
    return mean.array().abs() / scale - min_dist.array();
}

Vector lf2_scores(const Vector& mean, const Vector& min_dist, double scale, const Vector& log_pn, const Vector& log_q2) {
    if (!log_q2.allFinite()) throw DomainError("instrumental density must be positive for lf2");
    return lf1_scores(mean, min_dist, scale).array() - (log_pn - log_q2).array();
}

std::size_t select_next(CandidatePool& pool, const Vector& scores) {
    if (static_cast<std::size_t>(scores.size()) != pool.size()) throw PreconditionError("one score per candidate required");
    std::size_t best = pool.size();
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.is_selected(i)) continue;
        const double s = scores[static_cast<Eigen::Index>(i)];
        if (best == pool.size() || s < best_score) {
            best = i;
            best_score = s;
        }
    }
    if (best == pool.size()) throw ExhaustionError("candidate pool exhausted");
    pool.mark_selected(best);
    return best;
}

double u_function(double mean, double sd) {
    if (sd < 0.0) throw PreconditionError("standard deviation must be non-negative");
    if (mean == 0.0) return 0.0;
    if (sd == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(mean) / sd;
}

double eff(double mean, double sd, double epsilon) {
    if (sd < 0.0) throw PreconditionError("standard deviation must be non-negative");
    if (sd == 0.0) return 0.0;
    if (epsilon <= 0.0) epsilon = 2.0 * sd;
    const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
    auto f = [&](double x) {
        const double z = (x - mean) / sd;
        return (epsilon - std::abs(x)) * norm * std::exp(-0.5 * z * z);
    };
    using boost::math::quadrature::gauss_kronrod;
    // Split at the kink of |x|.
    const double left = gauss_kronrod<double, 31>::integrate(f, -epsilon, 0.0, 20, 1e-13);
    const double right = gauss_kronrod<double, 31>::integrate(f, 0.0, epsilon, 20, 1e-13);
    return std::max(0.0, left + right);
}

}  // namespace s4is

#include "s4is/clustering.hpp"

#include "s4is/errors.hpp"

#include <limits>
#include <random>

namespace s4is {

namespace {

std::size_t count_distinct(const PointMatrix& points, std::size_t cap) {
    std::vector<Eigen::Index> seen;
    for (Eigen::Index i = 0; i < points.rows() && seen.size() < cap; ++i) {
        bool dup = false;
        for (Eigen::Index j : seen) {
            if ((points.row(i).array() == points.row(j).array()).all()) {
                dup = true;
                break;
            }
        }
        if (!dup) seen.push_back(i);
    }
    return seen.size();
}

PointMatrix seed_plus_plus(const PointMatrix& x, std::size_t k, Rng& rng) {
    const Eigen::Index n = x.rows();
    PointMatrix c(static_cast<Eigen::Index>(k), x.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    c.row(0) = x.row(pick(rng));
    Vector d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
    for (std::size_t j = 1; j < k; ++j) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> unif(0.0, total);
            double r = unif(rng);
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= d2[i];
                if (r < 0.0 && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (d2[chosen] == 0.0) d2.maxCoeff(&chosen);
        }
        c.row(static_cast<Eigen::Index>(j)) = x.row(chosen);
        d2 = d2.cwiseMin((x.rowwise() - c.row(static_cast<Eigen::Index>(j))).rowwise().squaredNorm());
    }
    return c;
}

double assign(const PointMatrix& x, const PointMatrix& c, std::vector<std::size_t>& labels, Vector& dist2) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::Index best = 0;
        const double d = (c.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
        labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
        dist2[i] = d;
        inertia += d;
    }
    return inertia;
}

ClusterAssignment lloyd(const PointMatrix& x, std::size_t k, Rng& rng, int max_iterations) {
    ClusterAssignment a;
    a.k = k;
    a.centroids = seed_plus_plus(x, k, rng);
    a.labels.assign(static_cast<std::size_t>(x.rows()), 0);
    Vector dist2(x.rows());
    a.inertia = assign(x, a.centroids, a.labels, dist2);
    a.inertia_trace.push_back(a.inertia);
    for (int it = 0; it < max_iterations; ++it) {
        PointMatrix sums = PointMatrix::Zero(static_cast<Eigen::Index>(k), x.cols());
        std::vector<std::size_t> counts(k, 0);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            sums.row(static_cast<Eigen::Index>(a.labels[static_cast<std::size_t>(i)])) += x.row(i);
            ++counts[a.labels[static_cast<std::size_t>(i)]];
        }
        for (std::size_t j = 0; j < k; ++j) {
            const auto r = static_cast<Eigen::Index>(j);
            if (counts[j] > 0) {
                a.centroids.row(r) = sums.row(r) / static_cast<double>(counts[j]);
            } else {
                // Empty cluster: reseed at the point farthest from its centroid.
                Eigen::Index far = 0;
                dist2.maxCoeff(&far);
                a.centroids.row(r) = x.row(far);
                dist2[far] = 0.0;
            }
        }
        const std::vector<std::size_t> previous = a.labels;
        a.inertia = assign(x, a.centroids, a.labels, dist2);
        a.inertia_trace.push_back(a.inertia);
        a.iterations = it + 1;
        if (a.labels == previous) break;
    }
    return a;
}

}  // namespace

ClusterAssignment kmeans(const PointMatrix& points, std::size_t k, Rng& rng, const KMeansOptions& options) {
    if (points.rows() == 0) throw PreconditionError("k-means needs at least one point");
    if (k == 0) throw PreconditionError("k-means needs k >= 1");
    const std::size_t distinct = count_distinct(points, k);
    const std::size_t k_eff = std::min(k, distinct);
    ClusterAssignment best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        ClusterAssignment a = lloyd(points, k_eff, rng, options.max_iterations);
        if (a.inertia < best.inertia) best = std::move(a);
    }
    best.requested_k = k;
    return best;
}

PointMatrix mpp_per_cluster(const PointMatrix& failure_points, const ClusterAssignment& assignment) {
    if (assignment.labels.size() != static_cast<std::size_t>(failure_points.rows())) {
        throw PreconditionError("assignment does not cover the failure points");
    }
    std::vector<Eigen::Index> best(assignment.k, -1);
    std::vector<double> best_norm(assignment.k, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < failure_points.rows(); ++i) {
        const std::size_t c = assignment.labels[static_cast<std::size_t>(i)];
        const double n2 = failure_points.row(i).squaredNorm();
        if (n2 < best_norm[c]) {
            best_norm[c] = n2;
            best[c] = i;
        }
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index b : best) {
        if (b >= 0) rows.push_back(b);
    }
    PointMatrix out(static_cast<Eigen::Index>(rows.size()), failure_points.cols());
    for (std::size_t j = 0; j < rows.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = failure_points.row(rows[j]);
    return out;
}

GaussianMixture build_gm(const PointMatrix& mpps) { return GaussianMixture(mpps); }

}  // namespace s4is

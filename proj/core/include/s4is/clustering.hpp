#pragma once

#include "s4is/probability.hpp"
#include "s4is/types.hpp"

#include <cstddef>
#include <vector>

namespace s4is {

struct ClusterAssignment {
    std::vector<std::size_t> labels;
    PointMatrix centroids;
    double inertia = 0.0;
    /// Inertia after every Lloyd iteration of the winning restart.
    std::vector<double> inertia_trace;
    std::size_t requested_k = 0;
    /// Smaller than requested_k when there were fewer distinct points than clusters.
    std::size_t k = 0;
    int iterations = 0;
};

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
};

/// Lloyd's algorithm with k-means++ seeding; the restart with the lowest inertia wins.
ClusterAssignment kmeans(const PointMatrix& points, std::size_t k, Rng& rng, const KMeansOptions& options = {});

/// Minimum-norm member of each cluster (maximum standard-normal density), lowest index on ties.
PointMatrix mpp_per_cluster(const PointMatrix& failure_points, const ClusterAssignment& assignment);

GaussianMixture build_gm(const PointMatrix& mpps);

}  // namespace s4is

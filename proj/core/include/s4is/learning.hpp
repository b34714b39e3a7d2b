#pragma once

#include "s4is/surrogate.hpp"
#include "s4is/types.hpp"

#include <cstddef>
#include <vector>

namespace s4is {

/// Candidate points for pool-based selection. Selected points stay in the pool but
/// can never be chosen again.
class CandidatePool {
public:
    CandidatePool() = default;
    explicit CandidatePool(PointMatrix points);

    std::size_t size() const { return selected_.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    std::size_t unselected_count() const { return size() - n_selected_; }
    const PointMatrix& points() const { return points_; }
    Vector point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
    bool is_selected(std::size_t i) const { return selected_[i]; }
    const std::vector<bool>& selected_mask() const { return selected_; }

    void mark_selected(std::size_t i);
    void append(const PointMatrix& more);

private:
    PointMatrix points_;
    std::vector<bool> selected_;
    std::size_t n_selected_ = 0;
};

double euclidean_distance(const Vector& a, const Vector& b);
/// Throws PreconditionError when `set` has no rows.
double min_distance(const Vector& u, const PointMatrix& set);
/// Row-wise min_distance for every point.
Vector min_distances(const PointMatrix& points, const PointMatrix& set);
/// Lowers `current` wherever `added` is closer.
void update_min_distances(Vector& current, const PointMatrix& points, const Vector& added);

/// |mean| / scale - min distance to the support inputs. Lower is better.
double lf1(const Surrogate& model, const Vector& u, const PointMatrix& support_u, double scale);
/// lf1 - log(pn / q2). Throws DomainError when q2 <= 0.
double lf2(const Surrogate& model, const Vector& u, const PointMatrix& support_u, double scale, double pn, double q2);

/// Batch forms over precomputed predictions and distances.
Vector lf1_scores(const Vector& mean, const Vector& min_dist, double scale);
Vector lf2_scores(const Vector& mean, const Vector& min_dist, double scale, const Vector& log_pn, const Vector& log_q2);

/// Argmin of `scores` over unselected candidates, lowest index on ties; marks the winner.
/// Throws ExhaustionError when every candidate is selected.
std::size_t select_next(CandidatePool& pool, const Vector& scores);

/// |mean| / sd, +inf when sd is zero and mean is not, 0 when both are zero.
double u_function(double mean, double sd);

/// Expected feasibility of a Gaussian prediction over the band [-epsilon, epsilon];
/// epsilon <= 0 selects the default 2 sd.
double eff(double mean, double sd, double epsilon = 0.0);

}  // namespace s4is

#pragma once

#include "s4is/evaluation.hpp"
#include "s4is/types.hpp"

#include <cstddef>
#include <vector>

namespace s4is {

struct HlrfOptions {
    double step_tolerance = 1e-6;
    /// Relative to |g(start)| + 1.
    double g_tolerance = 1e-6;
    int max_iterations = 100;
    double fd_step = 1e-4;
    double stationary_gradient = 1e-12;
    /// Backtracking on the merit 0.5 |u|^2 + c |g| instead of the full HL-RF step.
    bool line_search = false;
    int max_backtracks = 20;
};

struct TracePoint {
    Vector u;
    Vector theta;
    Evaluation value;
};

enum class HlrfStatus { Converged, MaxIterations, Stationary };

struct MppResult {
    Vector u_star;
    double beta = 0.0;
    std::size_t n_eval = 0;
    bool converged = false;
    HlrfStatus status = HlrfStatus::MaxIterations;
    int iterations = 0;
    std::vector<Vector> iterates;
    /// Every point the search evaluated, in order.
    std::vector<TracePoint> evaluated;
};

/// HL-RF with central finite-difference gradients. Returns an unconverged result after
/// max_iterations; throws StationaryPointError on a vanishing gradient.
MppResult hlrf_search(EvaluationLedger& ledger, const Vector& start_u, const HlrfOptions& options = {});

/// Same search, reporting a vanishing gradient through the status instead of throwing.
MppResult hlrf_run(EvaluationLedger& ledger, const Vector& start_u, const HlrfOptions& options = {});

/// Phi(-beta).
double form_pf(double beta);

struct MultiStartResult {
    /// Distinct converged MPPs, ascending beta.
    std::vector<MppResult> mpps;
    std::vector<MppResult> all;
    /// Evaluated points of every search, duplicates removed.
    std::vector<TracePoint> support;
    std::size_t n_eval = 0;
};

/// HL-RF from the origin and n_starts - 1 uniform draws on [-4, 4]^d. Converged results
/// closer than dedup_radius keep the smaller beta. Throws ExplorationFailure when none converge.
MultiStartResult multi_start_mpps(EvaluationLedger& ledger, std::size_t n_starts, Rng& rng,
                                  const HlrfOptions& options = {}, double dedup_radius = 0.5);

struct FormResult {
    MppResult mpp;
    double pf = 0.0;
    std::size_t n_eval = 0;
    /// Starts tried; more than one when earlier starts hit a stationary point.
    int starts = 1;
};

/// FORM from the origin. An oscillating search is repeated from the same start with
/// line_search on. A stationary start (e.g. a symmetric series system) is retried from
/// seeded uniform draws on [-4, 4]^d, up to max_starts in total. Returns the first
/// non-stationary result, converged or not, when no start converges.
FormResult run_form(EvaluationLedger& ledger, Rng& rng, const HlrfOptions& options = {}, int max_starts = 10);

}  // namespace s4is

#pragma once

#include "s4is/types.hpp"

#include <functional>
#include <vector>

namespace s4is {

/// Returns f(x) and writes the gradient; may return +inf to reject a point.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct BfgsOptions {
    int max_iterations = 100;
    double gradient_tolerance = 1e-6;
    double relative_tolerance = 1e-10;
    int max_backtracks = 40;
};

struct BfgsResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective value at the start and after every accepted step; non-increasing.
    std::vector<double> trace;
};

/// Quasi-Newton minimization with an Armijo backtracking line search.
BfgsResult minimize_bfgs(const Objective& objective, Vector x0, const BfgsOptions& options = {});

}  // namespace s4is

#include "s4is/optimize.hpp"

#include <cmath>
#include <limits>

namespace s4is {

BfgsResult minimize_bfgs(const Objective& objective, Vector x0, const BfgsOptions& options) {
    const Eigen::Index n = x0.size();
    BfgsResult result;
    Vector grad(n);
    double f = objective(x0, grad);
    result.x = x0;
    result.value = f;
    if (!std::isfinite(f)) return result;
    result.trace.push_back(f);

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    Vector x = std::move(x0);
    Vector trial_grad(n);
    bool first_step = true;

    for (int it = 0; it < options.max_iterations; ++it) {
        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        Vector direction = -inv_hessian * grad;
        double slope = grad.dot(direction);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            direction = -grad;
            slope = -grad.squaredNorm();
        }
        // Keep the first trial step inside a unit ball; later steps trust the curvature model.
        double step = first_step ? std::min(1.0, 1.0 / direction.norm()) : 1.0;
        Vector trial;
        double trial_f = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            trial = x + step * direction;
            trial_f = objective(trial, trial_grad);
            if (std::isfinite(trial_f) && trial_f <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Vector s = trial - x;
        const Vector y = trial_grad - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (first_step) inv_hessian *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian * (eye - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
        first_step = false;

        const double previous = f;
        x = std::move(trial);
        f = trial_f;
        grad = trial_grad;
        result.trace.push_back(f);
        result.iterations = it + 1;
        if (std::abs(previous - f) <= options.relative_tolerance * (std::abs(f) + 1e-8)) {
            result.converged = true;
            break;
        }
    }
    result.x = x;
    result.value = f;
    return result;
}

}  // namespace s4is

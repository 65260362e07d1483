#pragma once

#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "caladin/linalg.hpp"
#include "caladin/problem.hpp"

namespace caladin {

/// Thrown when a Newton iterate, gradient or Hessian stops being finite.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Prox metric of a local subproblem: scalar rho (rho * I) or an SPD matrix.
using ProxMetric = std::variant<double, Mat>;

/// Applies the prox metric to v.
Vec apply_metric(const ProxMetric& metric, const Vec& v);

/// argmin_x f(x) + lambda^T x + 1/2 ||x - anchor||_P^2
struct SubproblemSpec {
    const ObjectiveOracle* oracle = nullptr;
    Vec dual;
    Vec anchor;
    ProxMetric prox = 1.0;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 100;
    double armijo_c = 1e-4;
    double initial_shift = 1e-8;
    bool record_trace = false;
};

struct NewtonReport {
    Vec minimizer;
    double gradient_norm = 0.0;
    int iterations = 0;
    int regularization_shifts = 0;
    bool converged = false;  ///< false means MaxIterExceeded; minimizer is the best iterate

    // Filled when NewtonOptions::record_trace is set; entry 0 is the start.
    std::vector<Vec> iterates;
    std::vector<double> values;
};

/// Value, gradient and Hessian of a smooth function at one point.
struct SmoothModel {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
};

/// Regularized Newton with Armijo backtracking.
///
/// The Hessian is shifted by tau*I (tau from options.initial_shift, x10 per
/// failed factorization) until Cholesky succeeds. Steps are halved until the
/// Armijo condition holds. Once the predicted decrease -g^T p is below the
/// rounding level of the value, the full step is taken iff it reduces the
/// gradient norm.
NewtonReport newton_minimize(const SmoothModel& model, const Vec& start, const NewtonOptions& options);

/// Augmented objective f(x) + lambda^T x + 1/2 ||x - z||_P^2 of a subproblem.
SmoothModel augmented_model(const SubproblemSpec& spec);

/// Solves one agent's augmented subproblem from warm_start.
NewtonReport solve_subproblem(const SubproblemSpec& spec, const Vec& warm_start, const NewtonOptions& options);

}  // namespace caladin

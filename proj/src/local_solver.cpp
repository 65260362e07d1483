#include "caladin/local_solver.hpp"

#include <cmath>
#include <limits>

namespace caladin {

namespace {

constexpr int kMaxHalvings = 60;
constexpr int kMaxShifts = 40;

void require_finite(const Vec& v, const char* what)
{
    if (!v.allFinite()) {
        throw NonFiniteError(std::string("newton: non-finite ") + what);
    }
}

}  // namespace

Vec apply_metric(const ProxMetric& metric, const Vec& v)
{
    if (const auto* rho = std::get_if<double>(&metric)) {
        return *rho * v;
    }
    return std::get<Mat>(metric) * v;
}

SmoothModel augmented_model(const SubproblemSpec& spec)
{
    if (spec.oracle == nullptr) {
        throw std::invalid_argument("subproblem: missing oracle");
    }
    const Eigen::Index n = spec.oracle->dimension();
    if (spec.dual.size() != n || spec.anchor.size() != n) {
        throw LinalgError("subproblem: dimension mismatch");
    }
    if (const auto* rho = std::get_if<double>(&spec.prox)) {
        if (!(*rho > 0.0)) {
            throw std::invalid_argument("subproblem: prox scalar must be positive");
        }
    } else if (std::get<Mat>(spec.prox).rows() != n || std::get<Mat>(spec.prox).cols() != n) {
        throw LinalgError("subproblem: prox matrix dimension mismatch");
    }

    SmoothModel model;
    model.value = [spec](const Vec& x) {
        const Vec d = x - spec.anchor;
        return spec.oracle->value(x) + spec.dual.dot(x) + 0.5 * d.dot(apply_metric(spec.prox, d));
    };
    model.gradient = [spec](const Vec& x) {
        return Vec(spec.oracle->gradient(x) + spec.dual + apply_metric(spec.prox, x - spec.anchor));
    };
    model.hessian = [spec](const Vec& x) {
        Mat h = spec.oracle->hessian(x);
        if (const auto* rho = std::get_if<double>(&spec.prox)) {
            h.diagonal().array() += *rho;
        } else {
            h += std::get<Mat>(spec.prox);
        }
        return h;
    };
    return model;
}

NewtonReport newton_minimize(const SmoothModel& model, const Vec& start, const NewtonOptions& options)
{
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("newton: tol must be positive");
    }
    require_finite(start, "start point");

    NewtonReport report;
    Vec x = start;
    double f = model.value(x);
    Vec g = model.gradient(x);
    require_finite(g, "gradient");
    double gnorm = g.norm();

    if (options.record_trace) {
        report.iterates.push_back(x);
        report.values.push_back(f);
    }

    const Eigen::Index n = x.size();
    while (gnorm > options.tol && report.iterations < options.max_iter) {
        Mat h = model.hessian(x);
        if (!h.allFinite()) {
            throw NonFiniteError("newton: non-finite hessian");
        }
        h = 0.5 * (h + h.transpose());

        auto factor = cholesky(h);
        double tau = options.initial_shift;
        for (int k = 0; !factor && k < kMaxShifts; ++k) {
            factor = cholesky(h + tau * Mat::Identity(n, n));
            ++report.regularization_shifts;
            tau *= 10.0;
        }
        if (!factor) {
            throw NonFiniteError("newton: hessian could not be regularized");
        }
        const Vec step = spd_solve(*factor, Vec(-g));
        const double slope = g.dot(step);

        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
        Vec trial = x + step;
        double f_trial = model.value(trial);
        Vec g_trial;
        if (-slope <= noise) {
            // Predicted decrease is below value rounding: Armijo cannot
            // discriminate, so take the full step iff it reduces the gradient.
            g_trial = model.gradient(trial);
            if (!(g_trial.norm() < gnorm)) {
                break;
            }
        } else {
            double alpha = 1.0;
            int halvings = 0;
            while (!(f_trial <= f + options.armijo_c * alpha * slope) && halvings < kMaxHalvings) {
                alpha *= 0.5;
                trial = x + alpha * step;
                f_trial = model.value(trial);
                ++halvings;
            }
            if (halvings == kMaxHalvings) {
                // Value rounding dominates the predicted decrease; same rule as above.
                trial = x + step;
                f_trial = model.value(trial);
                g_trial = model.gradient(trial);
                if (!(g_trial.norm() < gnorm)) {
                    break;
                }
            } else {
                g_trial = model.gradient(trial);
            }
        }
        require_finite(trial, "iterate");
        require_finite(g_trial, "gradient");

        x = std::move(trial);
        f = f_trial;
        g = std::move(g_trial);
        gnorm = g.norm();
        ++report.iterations;

        if (options.record_trace) {
            report.iterates.push_back(x);
            report.values.push_back(f);
        }
    }

    report.minimizer = std::move(x);
    report.gradient_norm = gnorm;
    report.converged = gnorm <= options.tol;
    return report;
}

NewtonReport solve_subproblem(const SubproblemSpec& spec, const Vec& warm_start, const NewtonOptions& options)
{
    return newton_minimize(augmented_model(spec), warm_start, options);
}

}  // namespace caladin

#include "caladin/diagnostics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "caladin/local_solver.hpp"

namespace caladin {

namespace {

SmoothModel centralized_model(const ConsensusProblem& problem)
{
    SmoothModel model;
    model.value = [&problem](const Vec& z) { return problem.objective(z); };
    model.gradient = [&problem](const Vec& z) {
        Vec g = Vec::Zero(problem.dimension);
        for (const auto& f : problem.agents) {
            g += f->gradient(z);
        }
        return g;
    };
    model.hessian = [&problem](const Vec& z) {
        Mat h = Mat::Zero(problem.dimension, problem.dimension);
        for (const auto& f : problem.agents) {
            h += f->hessian(z);
        }
        return h;
    };
    return model;
}

ReferenceSolution reference_at(const ConsensusProblem& problem, Vec z, double gradient_norm)
{
    ReferenceSolution ref;
    ref.lambda.reserve(problem.num_agents());
    for (const auto& f : problem.agents) {
        ref.lambda.push_back(-f->gradient(z));
    }
    ref.z = std::move(z);
    ref.gradient_norm = gradient_norm;
    return ref;
}

}  // namespace

double energy(const Vec& z, const std::vector<Vec>& lambda, const ReferenceSolution& ref,
              const std::vector<Mat>& metrics)
{
    if (lambda.size() != metrics.size() || lambda.size() != ref.lambda.size()) {
        throw LinalgError("energy: agent count mismatch");
    }
    const Vec dz = z - ref.z;
    double total = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const auto factor = cholesky(metrics[i]);
        if (!factor) {
            throw LinalgError("energy: metric is not SPD");
        }
        const Vec dl = lambda[i] - ref.lambda[i];
        total += dl.dot(spd_solve(*factor, dl)) + dz.dot(metrics[i] * dz);
    }
    return total;
}

ReferenceSolution centralized_solve(const ConsensusProblem& problem, double tol, int max_iter,
                                    const std::optional<Vec>& start)
{
    const SmoothModel model = centralized_model(problem);
    NewtonOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    const auto report = newton_minimize(model, start.value_or(Vec::Zero(problem.dimension)), options);
    if (!report.converged) {
        throw MaxIterExceeded("centralized_solve: gradient norm " + format_double(report.gradient_norm) +
                              " above tolerance after " + std::to_string(report.iterations) + " iterations");
    }
    return reference_at(problem, report.minimizer, report.gradient_norm);
}

ReferenceSolution multistart_reference(const ConsensusProblem& problem, std::uint64_t seed, int starts,
                                       double spread, double tol)
{
    const SmoothModel model = centralized_model(problem);
    NewtonOptions options;
    options.tol = tol;
    options.max_iter = 500;

    GaussianStream stream(seed);
    std::optional<NewtonReport> best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        const Vec start = stream.vector(problem.dimension, spread);
        auto report = newton_minimize(model, start, options);
        if (!report.converged) {
            continue;
        }
        const double value = model.value(report.minimizer);
        if (value < best_value) {
            best_value = value;
            best = std::move(report);
        }
    }
    if (!best) {
        throw MaxIterExceeded("multistart_reference: no start converged");
    }
    auto ref = reference_at(problem, best->minimizer, best->gradient_norm);
    ref.local = true;
    return ref;
}

CommFloats comm_floats(Algorithm algo, std::int64_t num_agents, std::int64_t dim, int /*round*/)
{
    const std::int64_t vec_payload = num_agents * dim;
    switch (algo) {
    case Algorithm::BfgsAladin:
    case Algorithm::ReducedAladin:
    case Algorithm::MatrixProxAladin:
        return {vec_payload, 2 * vec_payload};
    case Algorithm::AdmmDualFirst:
    case Algorithm::AdmmAggregateFirst:
        return {vec_payload, vec_payload};
    case Algorithm::DirectQpAladin:
        return {2 * vec_payload + num_agents * dim * dim, 2 * vec_payload};
    }
    return {};
}

double consensus_residual(const std::vector<Vec>& x, const Vec& z)
{
    double total = 0.0;
    for (const auto& xi : x) {
        total += (xi - z).norm();
    }
    return total;
}

Vec dual_sum(const std::vector<Vec>& lambda)
{
    if (lambda.empty()) {
        return {};
    }
    Vec total = Vec::Zero(lambda.front().size());
    for (const auto& l : lambda) {
        total += l;
    }
    return total;
}

double max_norm(const std::vector<Vec>& v)
{
    double m = 0.0;
    for (const auto& vi : v) {
        m = std::max(m, vi.norm());
    }
    return m;
}

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string csv_row(const IterationRecord& r)
{
    std::string row = std::to_string(r.round);
    row += ',';
    row += format_double(r.consensus_residual);
    row += ',';
    row += format_double(r.objective_at_z);
    row += ',';
    if (r.energy) {
        row += format_double(*r.energy);
    }
    row += ',';
    row += format_double(r.dual_sum_norm);
    row += ',';
    row += std::to_string(r.floats_up);
    row += ',';
    row += std::to_string(r.floats_down);
    row += ',';
    row += format_double(r.wall_ms);
    return row;
}

void write_csv(std::ostream& out, const std::vector<IterationRecord>& records)
{
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << csv_row(r) << '\n';
    }
}

}  // namespace caladin

#include "caladin/admm.hpp"

#include <chrono>

#include "caladin/network.hpp"

namespace caladin {

std::vector<AdmmAgentState> initial_admm_agents(std::size_t num_agents, Eigen::Index dim)
{
    return std::vector<AdmmAgentState>(num_agents, AdmmAgentState{Vec::Zero(dim), Vec::Zero(dim)});
}

IterationRecord admm_round(AdmmOrder order, const ConsensusProblem& problem, std::vector<AdmmAgentState>& agents,
                           CoordinatorState& coord, const RoundOptions& options)
{
    const double rho = options.rho;
    if (!(rho > 0.0)) {
        throw std::invalid_argument("admm_round: rho must be positive");
    }
    if (agents.size() != problem.num_agents()) {
        throw std::invalid_argument("admm_round: agent state count does not match the problem");
    }
    const auto start = std::chrono::steady_clock::now();
    const int round = coord.round + 1;
    const std::size_t N = agents.size();

    std::vector<Vec> solved(N);
    parallel_for_agents(N, options.threads, [&](std::size_t i) {
        SubproblemSpec spec{problem.agents[i].get(), agents[i].lambda, coord.z, rho};
        const auto report = solve_subproblem(spec, agents[i].x, options.subproblem);
        if (!report.converged) {
            throw SubproblemFailure(i, round,
                                    "gradient norm " + format_double(report.gradient_norm) + " after " +
                                        std::to_string(report.iterations) + " Newton iterations");
        }
        solved[i] = report.minimizer;
    });

    CommChannel channel;
    std::vector<Vec> xs(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = channel.upload(solved[i]);
        agents[i].x = xs[i];
    }

    Vec z_plus = Vec::Zero(problem.dimension);
    if (order == AdmmOrder::DualFirst) {
        for (std::size_t i = 0; i < N; ++i) {
            agents[i].lambda += rho * (xs[i] - coord.z);
            z_plus += xs[i] + agents[i].lambda / rho;
        }
        z_plus /= static_cast<double>(N);
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            z_plus += xs[i] + agents[i].lambda / rho;
        }
        z_plus /= static_cast<double>(N);
        for (std::size_t i = 0; i < N; ++i) {
            agents[i].lambda += rho * (xs[i] - z_plus);
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        channel.download(z_plus);
    }
    coord.z = z_plus;
    coord.round = round;

    std::vector<Vec> lambdas(N);
    for (std::size_t i = 0; i < N; ++i) {
        lambdas[i] = agents[i].lambda;
    }

    IterationRecord record;
    record.round = round;
    record.consensus_residual = consensus_residual(xs, coord.z);
    record.objective_at_z = problem.objective(coord.z);
    record.dual_sum_norm = dual_sum(lambdas).norm();
    record.max_dual_norm = max_norm(lambdas);
    record.floats_up = channel.floats_up();
    record.floats_down = channel.floats_down();
    if (options.reference != nullptr) {
        const std::vector<Mat> metrics(N, rho * Mat::Identity(problem.dimension, problem.dimension));
        record.energy = energy(coord.z, lambdas, *options.reference, metrics);
    }
    if (options.measure_time) {
        record.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return record;
}

}  // namespace caladin

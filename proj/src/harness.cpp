#include "caladin/harness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "caladin/admm.hpp"
#include "caladin/aladin.hpp"

namespace caladin {

void RunConfig::validate() const
{
    if (problem != "quadratic" && problem != "pseudo-huber" && problem != "sensor-allocation") {
        throw ConfigError("--problem must be one of quadratic, pseudo-huber, sensor-allocation (got '" + problem +
                          "')");
    }
    if (num_agents < 1) {
        throw ConfigError("--N must be at least 1");
    }
    if (dim < 1) {
        throw ConfigError("--n must be at least 1");
    }
    if (algo == Algorithm::DirectQpAladin) {
        throw ConfigError("direct-qp-aladin is an accounting reference and cannot be run");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw ConfigError("--rho must be a positive finite number");
    }
    if (max_iter < 1) {
        throw ConfigError("--max-iter must be at least 1");
    }
    if (hessian_schedule && *hessian_schedule < 2) {
        throw ConfigError("--hessian-schedule must be at least 2");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("--tol must be positive");
    }
    if (!(stop_tol >= 0.0)) {
        throw ConfigError("--stop-tol must be non-negative");
    }
}

ConsensusProblem build_problem(const RunConfig& config)
{
    config.validate();
    return make_problem(config.problem, config.num_agents, config.dim, config.seed);
}

RunResult run(const RunConfig& config) { return run(config, build_problem(config)); }

RunResult run(const RunConfig& config, const ConsensusProblem& problem)
{
    config.validate();

    RoundOptions options;
    options.rho = config.rho;
    options.subproblem.tol = config.tol;
    options.threads = config.threads != 0
                          ? config.threads
                          : static_cast<unsigned>(std::min<std::size_t>(
                                problem.num_agents(), std::max(1U, std::thread::hardware_concurrency())));
    options.reference = problem.known_solution ? &*problem.known_solution : nullptr;
    options.measure_time = config.wall_clock;

    RunResult result;
    result.algo = config.algo;
    CoordinatorState coord{Vec::Zero(problem.dimension), 0};

    auto finish = [&](auto&& step) {
        for (int k = 0; k < config.max_iter; ++k) {
            result.records.push_back(step());
            const auto& r = result.records.back();
            result.summary.floats_up += r.floats_up;
            result.summary.floats_down += r.floats_down;
            if (r.consensus_residual <= config.stop_tol) {
                break;
            }
        }
        result.summary.rounds = static_cast<int>(result.records.size());
        result.summary.final_residual = result.records.back().consensus_residual;
        result.z = coord.z;
    };

    if (is_aladin(config.algo)) {
        Variant variant;
        variant.kind = config.algo == Algorithm::BfgsAladin      ? AladinKind::Bfgs
                       : config.algo == Algorithm::ReducedAladin ? AladinKind::Reduced
                                                                 : AladinKind::MatrixProx;
        variant.hessian_update_base = config.hessian_schedule;
        auto agents = initial_agents(problem.num_agents(), problem.dimension, config.rho);
        finish([&] { return run_round(variant, problem, agents, coord, options); });
        for (const auto& a : agents) {
            result.x.push_back(a.x);
            result.lambda.push_back(a.lambda);
        }
    } else {
        const auto order =
            config.algo == Algorithm::AdmmDualFirst ? AdmmOrder::DualFirst : AdmmOrder::AggregateFirst;
        auto agents = initial_admm_agents(problem.num_agents(), problem.dimension);
        finish([&] { return admm_round(order, problem, agents, coord, options); });
        for (const auto& a : agents) {
            result.x.push_back(a.x);
            result.lambda.push_back(a.lambda);
        }
    }
    return result;
}

std::string summary_line(const RunSummary& s)
{
    return "# final_residual=" + format_double(s.final_residual) + ",rounds=" + std::to_string(s.rounds) +
           ",floats_up=" + std::to_string(s.floats_up) + ",floats_down=" + std::to_string(s.floats_down);
}

void write_trace(std::ostream& out, const RunResult& result)
{
    write_csv(out, result.records);
    out << summary_line(result.summary) << '\n';
}

CompareResult compare(const std::vector<RunConfig>& configs)
{
    if (configs.empty()) {
        throw ConfigError("compare: no algorithms given");
    }
    const RunConfig& first = configs.front();
    for (const auto& c : configs) {
        if (c.problem != first.problem || c.seed != first.seed || c.num_agents != first.num_agents ||
            (c.dim != first.dim && c.problem != "sensor-allocation")) {
            throw ConfigError("compare: all runs must share problem, size and seed");
        }
    }

    const ConsensusProblem problem = build_problem(first);
    CompareResult out;
    for (const auto& c : configs) {
        out.runs.push_back(run(c, problem));
    }
    return out;
}

void write_comparison(std::ostream& out, const CompareResult& result)
{
    out << "round";
    std::size_t rounds = 0;
    for (const auto& r : result.runs) {
        out << ',' << algorithm_name(r.algo);
        rounds = std::max(rounds, r.records.size());
    }
    out << '\n';
    for (std::size_t k = 0; k < rounds; ++k) {
        out << (k + 1);
        for (const auto& r : result.runs) {
            out << ',';
            if (k < r.records.size()) {
                out << format_double(r.records[k].consensus_residual);
            }
        }
        out << '\n';
    }
}

}  // namespace caladin

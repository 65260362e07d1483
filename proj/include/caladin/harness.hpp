#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "caladin/algorithm.hpp"
#include "caladin/diagnostics.hpp"
#include "caladin/problem.hpp"

namespace caladin {

/// Invalid run configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string problem = "sensor-allocation";
    std::size_t num_agents = 20;
    Eigen::Index dim = 10;  ///< ignored by sensor-allocation (always 10)
    Algorithm algo = Algorithm::BfgsAladin;
    double rho = 100.0;
    int max_iter = 200;
    std::uint64_t seed = 42;
    std::optional<int> hessian_schedule;
    double tol = 1e-10;       ///< subproblem gradient tolerance
    double stop_tol = 0.0;    ///< stop once consensus_residual <= stop_tol
    unsigned threads = 0;     ///< 0: number of agents capped at hardware parallelism
    bool wall_clock = false;  ///< fill wall_ms; off keeps traces byte-reproducible

    /// Throws ConfigError.
    void validate() const;
};

struct RunSummary {
    double final_residual = 0.0;
    int rounds = 0;
    std::int64_t floats_up = 0;
    std::int64_t floats_down = 0;
};

struct RunResult {
    Algorithm algo = Algorithm::BfgsAladin;
    std::vector<IterationRecord> records;
    RunSummary summary;
    Vec z;
    std::vector<Vec> x;
    std::vector<Vec> lambda;
};

/// Builds the configured problem instance.
ConsensusProblem build_problem(const RunConfig& config);

/// Runs the configured algorithm from the zero start (B_i = rho*I).
RunResult run(const RunConfig& config);
RunResult run(const RunConfig& config, const ConsensusProblem& problem);

/// CSV trace followed by a '#'-prefixed summary line.
void write_trace(std::ostream& out, const RunResult& result);

std::string summary_line(const RunSummary& summary);

struct CompareResult {
    std::vector<RunResult> runs;
};

/// Runs every config on one shared problem instance. All configs must agree on
/// problem name, sizes and seed (ConfigError otherwise).
CompareResult compare(const std::vector<RunConfig>& configs);

/// Wide CSV: `round,<algo>,<algo>,...` with one consensus-residual column per run.
void write_comparison(std::ostream& out, const CompareResult& result);

}  // namespace caladin

// caladin: run Consensus ALADIN / consensus ADMM experiments and write CSV traces.
//
//   caladin run --problem sensor-allocation --N 20 --algo bfgs-aladin --rho 100 --seed 42
//   caladin compare --problem sensor-allocation --algo bfgs-aladin --algo reduced-aladin \
//       --algo admm-aggregate-first --out fig1.csv
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caladin/harness.hpp"
#include "caladin/local_solver.hpp"
#include "caladin/network.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Flags {
    caladin::RunConfig config;
    std::vector<std::string> algos{"bfgs-aladin"};
    int hessian_schedule = 0;
    std::string out = "-";
};

void add_common_flags(CLI::App& cmd, Flags& f)
{
    cmd.add_option("--problem", f.config.problem, "quadratic | pseudo-huber | sensor-allocation")
        ->capture_default_str();
    cmd.add_option("--N", f.config.num_agents, "number of agents")->capture_default_str();
    cmd.add_option("--n", f.config.dim, "variable dimension (sensor-allocation: fixed at 10)")
        ->capture_default_str();
    cmd.add_option("--rho", f.config.rho, "augmented Lagrangian penalty")->capture_default_str();
    cmd.add_option("--max-iter", f.config.max_iter, "round budget")->capture_default_str();
    cmd.add_option("--seed", f.config.seed, "problem data seed")->capture_default_str();
    cmd.add_option("--hessian-schedule", f.hessian_schedule,
                   "update BFGS metrics only at rounds K, K^2, ... (default: every round)");
    cmd.add_option("--tol", f.config.tol, "subproblem gradient tolerance")->capture_default_str();
    cmd.add_option("--stop-tol", f.config.stop_tol, "stop once the consensus residual is <= this")
        ->capture_default_str();
    cmd.add_option("--threads", f.config.threads, "agent solve threads (0: min(N, hardware))")
        ->capture_default_str();
    cmd.add_option("--out", f.out, "output CSV path ('-' for stdout)")->capture_default_str();
    cmd.add_flag("--wall-clock", f.config.wall_clock, "record wall_ms (traces are no longer reproducible)");
}

caladin::RunConfig config_for(const Flags& f, const std::string& algo_name)
{
    caladin::RunConfig c = f.config;
    const auto algo = caladin::parse_algorithm(algo_name);
    if (!algo) {
        throw caladin::ConfigError("--algo must be one of bfgs-aladin, reduced-aladin, matrix-prox-aladin, "
                                   "admm-dual-first, admm-aggregate-first (got '" +
                                   algo_name + "')");
    }
    c.algo = *algo;
    if (f.hessian_schedule != 0) {
        c.hessian_schedule = f.hessian_schedule;
    }
    c.validate();
    return c;
}

template <typename Writer>
void emit(const std::string& path, Writer&& writer)
{
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw caladin::ConfigError("cannot open output file '" + path + "'");
    }
    writer(file);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Consensus ALADIN and consensus ADMM experiment harness"};
    app.require_subcommand(1);

    Flags run_flags;
    auto* run_cmd = app.add_subcommand("run", "run one algorithm and write its CSV trace");
    add_common_flags(*run_cmd, run_flags);
    std::string run_algo = "bfgs-aladin";
    run_cmd->add_option("--algo", run_algo,
                        "bfgs-aladin | reduced-aladin | matrix-prox-aladin | admm-dual-first | admm-aggregate-first")
        ->capture_default_str();

    Flags cmp_flags;
    auto* cmp_cmd = app.add_subcommand("compare", "run several algorithms on one instance; wide residual CSV");
    add_common_flags(*cmp_cmd, cmp_flags);
    cmp_cmd->add_option("--algo", cmp_flags.algos, "algorithms to compare (repeatable)")
        ->expected(1, -1)
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) {
            const auto config = config_for(run_flags, run_algo);
            const auto result = caladin::run(config);
            emit(run_flags.out, [&](std::ostream& os) { caladin::write_trace(os, result); });
            std::cerr << caladin::summary_line(result.summary) << '\n';
        } else {
            std::vector<caladin::RunConfig> configs;
            for (const auto& name : cmp_flags.algos) {
                configs.push_back(config_for(cmp_flags, name));
            }
            const auto result = caladin::compare(configs);
            emit(cmp_flags.out, [&](std::ostream& os) { caladin::write_comparison(os, result); });
        }
    } catch (const caladin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}

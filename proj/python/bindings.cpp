#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "caladin/aladin.hpp"
#include "caladin/harness.hpp"

namespace py = pybind11;
using namespace caladin;

namespace {

Algorithm algorithm_from(const std::string& name)
{
    if (name == algorithm_name(Algorithm::DirectQpAladin)) {
        return Algorithm::DirectQpAladin;
    }
    const auto algo = parse_algorithm(name);
    if (!algo) {
        throw py::value_error("unknown algorithm '" + name + "'");
    }
    return *algo;
}

RunConfig make_config(const std::string& problem, std::size_t N, Eigen::Index n, const std::string& algo, double rho,
                      int max_iter, std::uint64_t seed, std::optional<int> hessian_schedule, double tol,
                      double stop_tol, unsigned threads)
{
    RunConfig c;
    c.problem = problem;
    c.num_agents = N;
    c.dim = n;
    c.algo = algorithm_from(algo);
    c.rho = rho;
    c.max_iter = max_iter;
    c.seed = seed;
    c.hessian_schedule = hessian_schedule;
    c.tol = tol;
    c.stop_tol = stop_tol;
    c.threads = threads;
    return c;
}

py::dict record_dict(const IterationRecord& r)
{
    py::dict d;
    d["round"] = r.round;
    d["consensus_residual"] = r.consensus_residual;
    d["objective_at_z"] = r.objective_at_z;
    d["energy"] = r.energy ? py::cast(*r.energy) : py::none();
    d["dual_sum_norm"] = r.dual_sum_norm;
    d["floats_up"] = r.floats_up;
    d["floats_down"] = r.floats_down;
    d["wall_ms"] = r.wall_ms;
    return d;
}

py::dict result_dict(const RunResult& r)
{
    py::list records;
    for (const auto& rec : r.records) {
        records.append(record_dict(rec));
    }
    std::ostringstream trace;
    write_trace(trace, r);
    py::dict d;
    d["algo"] = std::string(algorithm_name(r.algo));
    d["records"] = records;
    d["final_residual"] = r.summary.final_residual;
    d["rounds"] = r.summary.rounds;
    d["floats_up"] = r.summary.floats_up;
    d["floats_down"] = r.summary.floats_down;
    d["z"] = r.z;
    d["x"] = r.x;
    d["lambda"] = r.lambda;
    d["csv"] = trace.str();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Consensus ALADIN and consensus ADMM";

    py::register_exception<LinalgError>(m, "LinalgError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SubproblemFailure>(m, "SubproblemFailure", PyExc_RuntimeError);

    m.attr("CSV_HEADER") = kCsvHeader;
    std::vector<std::string> algorithms;
    for (const auto a : {Algorithm::BfgsAladin, Algorithm::ReducedAladin, Algorithm::MatrixProxAladin,
                         Algorithm::AdmmDualFirst, Algorithm::AdmmAggregateFirst}) {
        algorithms.emplace_back(algorithm_name(a));
    }
    m.attr("ALGORITHMS") = algorithms;

    py::class_<ReferenceSolution>(m, "ReferenceSolution")
        .def_readonly("z", &ReferenceSolution::z)
        .def_readonly("lambda_", &ReferenceSolution::lambda)
        .def_readonly("gradient_norm", &ReferenceSolution::gradient_norm)
        .def_readonly("local", &ReferenceSolution::local);

    py::class_<ConsensusProblem>(m, "Problem")
        .def_readonly("name", &ConsensusProblem::name)
        .def_readonly("dimension", &ConsensusProblem::dimension)
        .def_property_readonly("num_agents", &ConsensusProblem::num_agents)
        .def_readonly("known_solution", &ConsensusProblem::known_solution)
        .def("objective", &ConsensusProblem::objective, py::arg("z"))
        .def(
            "agent_value", [](const ConsensusProblem& p, std::size_t i, const Vec& x) { return p.agents.at(i)->value(x); },
            py::arg("agent"), py::arg("x"))
        .def(
            "agent_gradient",
            [](const ConsensusProblem& p, std::size_t i, const Vec& x) { return p.agents.at(i)->gradient(x); },
            py::arg("agent"), py::arg("x"))
        .def(
            "agent_hessian",
            [](const ConsensusProblem& p, std::size_t i, const Vec& x) { return p.agents.at(i)->hessian(x); },
            py::arg("agent"), py::arg("x"));

    m.def("make_problem", &make_problem, py::arg("name"), py::arg("N"), py::arg("n"), py::arg("seed"));
    m.def("centralized_solve", &centralized_solve, py::arg("problem"), py::arg("tol") = 1e-10,
          py::arg("max_iter") = 200, py::arg("start") = std::nullopt);
    m.def("multistart_reference", &multistart_reference, py::arg("problem"), py::arg("seed"), py::arg("starts") = 20,
          py::arg("spread") = 5.0, py::arg("tol") = 1e-10);

    m.def(
        "cholesky_lower",
        [](const Mat& a) -> std::optional<Mat> {
            const auto f = cholesky(a);
            if (!f) {
                return std::nullopt;
            }
            return f->lower();
        },
        py::arg("a"), "Lower Cholesky factor, or None when the matrix is not SPD.");
    m.def("min_eig_lower_bound", &min_eig_lower_bound, py::arg("a"));

    m.def(
        "damped_bfgs_update",
        [](const Mat& B, const Vec& s, const Vec& y) {
            const auto u = damped_bfgs_update(B, s, y);
            py::dict d;
            d["B"] = u.B;
            d["y"] = u.y;
            d["skipped"] = u.skipped;
            d["damped"] = u.damped;
            return d;
        },
        py::arg("B"), py::arg("s"), py::arg("y"));
    m.def("recover_gradient", [](double rho, const Vec& z, const Vec& x, const Vec& l) {
        return recover_gradient(rho, z, x, l);
    }, py::arg("rho"), py::arg("z"), py::arg("x_plus"), py::arg("lambda_"));
    m.def("update_global_bfgs",
          py::overload_cast<const std::vector<Mat>&, const std::vector<Vec>&, const std::vector<Vec>&>(
              &update_global_bfgs),
          py::arg("B"), py::arg("x_plus"), py::arg("g"));
    m.def("update_global_reduced", &update_global_reduced, py::arg("rho"), py::arg("x_plus"), py::arg("g"));
    m.def(
        "kkt_oracle",
        [](const std::vector<Mat>& B, const std::vector<Vec>& x, const std::vector<Vec>& g) {
            const auto sol = kkt_oracle(B, x, g);
            return py::make_tuple(sol.z, sol.lambda, sol.dx);
        },
        py::arg("B"), py::arg("x_plus"), py::arg("g"));
    m.def("energy", &energy, py::arg("z"), py::arg("lambda_"), py::arg("reference"), py::arg("metrics"));
    m.def(
        "comm_floats",
        [](const std::string& algo, std::int64_t N, std::int64_t n) {
            const auto c = comm_floats(algorithm_from(algo), N, n);
            return py::make_tuple(c.up, c.down);
        },
        py::arg("algo"), py::arg("N"), py::arg("n"));

    m.def(
        "run",
        [](const std::string& problem, std::size_t N, Eigen::Index n, const std::string& algo, double rho,
           int max_iter, std::uint64_t seed, std::optional<int> hessian_schedule, double tol, double stop_tol,
           unsigned threads) {
            const auto config =
                make_config(problem, N, n, algo, rho, max_iter, seed, hessian_schedule, tol, stop_tol, threads);
            RunResult result;
            {
                py::gil_scoped_release release;
                result = run(config);
            }
            return result_dict(result);
        },
        py::arg("problem") = "sensor-allocation", py::arg("N") = 20, py::arg("n") = 10,
        py::arg("algo") = "bfgs-aladin", py::arg("rho") = 100.0, py::arg("max_iter") = 200, py::arg("seed") = 42,
        py::arg("hessian_schedule") = std::nullopt, py::arg("tol") = 1e-10, py::arg("stop_tol") = 0.0,
        py::arg("threads") = 0U);

    m.def(
        "compare",
        [](const std::vector<std::string>& algos, const std::string& problem, std::size_t N, Eigen::Index n,
           double rho, int max_iter, std::uint64_t seed, double tol, unsigned threads) {
            std::vector<RunConfig> configs;
            for (const auto& a : algos) {
                configs.push_back(
                    make_config(problem, N, n, a, rho, max_iter, seed, std::nullopt, tol, 0.0, threads));
            }
            CompareResult result;
            {
                py::gil_scoped_release release;
                result = compare(configs);
            }
            std::ostringstream csv;
            write_comparison(csv, result);
            py::list runs;
            for (const auto& r : result.runs) {
                runs.append(result_dict(r));
            }
            py::dict d;
            d["runs"] = runs;
            d["csv"] = csv.str();
            return d;
        },
        py::arg("algos"), py::arg("problem") = "sensor-allocation", py::arg("N") = 20, py::arg("n") = 10,
        py::arg("rho") = 100.0, py::arg("max_iter") = 200, py::arg("seed") = 42, py::arg("tol") = 1e-10,
        py::arg("threads") = 0U);
}

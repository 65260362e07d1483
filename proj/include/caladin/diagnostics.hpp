#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "caladin/algorithm.hpp"
#include "caladin/linalg.hpp"
#include "caladin/problem.hpp"

namespace caladin {

/// One row of a convergence trace.
struct IterationRecord {
    int round = 0;
    double consensus_residual = 0.0;  ///< sum_i ||x_i - z||
    double objective_at_z = 0.0;      ///< sum_i f_i(z)
    std::optional<double> energy;     ///< present iff a reference solution exists
    double dual_sum_norm = 0.0;       ///< ||sum_i lambda_i||
    std::int64_t floats_up = 0;
    std::int64_t floats_down = 0;
    double wall_ms = 0.0;

    // Not part of the CSV schema.
    double max_dual_norm = 0.0;  ///< max_i ||lambda_i||
    int bfgs_updates = 0;
    int bfgs_skipped = 0;
    int bfgs_damped = 0;
};

class MaxIterExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// L(z, lambda) = sum_i ( ||lambda_i - lambda*_i||^2_{B_i^-1} + ||z - z*||^2_{B_i} )
double energy(const Vec& z, const std::vector<Vec>& lambda, const ReferenceSolution& ref,
              const std::vector<Mat>& metrics);

/// Newton on F(z) = sum_i f_i(z) to ||grad F|| <= tol; lambda*_i = -grad f_i(z*).
/// Assumes the problem is convex. Throws MaxIterExceeded.
ReferenceSolution centralized_solve(const ConsensusProblem& problem, double tol = 1e-10, int max_iter = 200,
                                    const std::optional<Vec>& start = std::nullopt);

/// Best local minimizer of F over `starts` seeded Gaussian starting points
/// (std `spread`). The result is flagged local.
ReferenceSolution multistart_reference(const ConsensusProblem& problem, std::uint64_t seed, int starts = 20,
                                       double spread = 5.0, double tol = 1e-10);

struct CommFloats {
    std::int64_t up = 0;
    std::int64_t down = 0;
    friend bool operator==(const CommFloats&, const CommFloats&) = default;
};

/// Scalars moved per round.
///   ALADIN variants: up N*n (x_i), down 2*N*n (lambda_i and z per agent)
///   ADMM variants:   up N*n (x_i), down N*n (z per agent)
///   direct-QP:       up 2*N*n + N*n^2 (x_i, g_i, B_i), down 2*N*n
CommFloats comm_floats(Algorithm algo, std::int64_t num_agents, std::int64_t dim, int round = 1);

double consensus_residual(const std::vector<Vec>& x, const Vec& z);
Vec dual_sum(const std::vector<Vec>& lambda);
double max_norm(const std::vector<Vec>& v);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "round,consensus_residual,objective_at_z,energy,dual_sum_norm,floats_up,floats_down,wall_ms";

std::string csv_row(const IterationRecord& record);

void write_csv(std::ostream& out, const std::vector<IterationRecord>& records);

}  // namespace caladin

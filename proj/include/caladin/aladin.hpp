#pragma once

#include <optional>
#include <vector>

#include "caladin/diagnostics.hpp"
#include "caladin/linalg.hpp"
#include "caladin/local_solver.hpp"
#include "caladin/network.hpp"
#include "caladin/problem.hpp"

namespace caladin {

enum class AladinKind {
    Bfgs,        ///< scalar-prox subproblems, damped BFGS metrics, closed-form z
    Reduced,     ///< scalar-prox subproblems, B_i = rho*I, averaged z
    MatrixProx,  ///< matrix-prox subproblems with constant metrics B_i
};

struct Variant {
    AladinKind kind = AladinKind::Bfgs;
    /// Update B_i only at rounds K, K^2, K^3, ...; every round when absent.
    std::optional<int> hessian_update_base;
};

/// One agent's iterate as seen across a round: x, lambda, recovered gradient,
/// metric B and the previous-round values that form the BFGS pair (s, y).
struct AgentState {
    Vec x;
    Vec x_prev;
    Vec lambda;
    Vec g;
    Vec g_prev;
    Mat B;
    bool has_history = false;
};

struct CoordinatorState {
    Vec z;
    int round = 0;
};

/// Zero primal/dual start with B_i = rho*I.
std::vector<AgentState> initial_agents(std::size_t num_agents, Eigen::Index dim, double rho);

/// g = P(z - x_plus) - lambda; the exact local gradient when the subproblem
/// was solved exactly.
Vec recover_gradient(const ProxMetric& prox, const Vec& z, const Vec& x_plus, const Vec& lambda);

struct BfgsUpdate {
    Mat B;
    Vec y;  ///< secant vector actually used (after damping)
    bool skipped = false;
    bool damped = false;
};

/// Powell-damped BFGS update of an SPD matrix.
///
/// If y^T s <= 0.2 s^T B s, y is replaced by y + theta (B s - y) with
/// theta = (0.2 s^T B s - s^T y) / (s^T B s - s^T y), which puts y^T s at
/// exactly 0.2 s^T B s. The update is skipped (B returned unchanged) when
/// ||s|| <= 1e-12 (1 + x_norm) or |s^T B s - s^T y| <= 1e-14 under damping.
BfgsUpdate damped_bfgs_update(const Mat& B, const Vec& s, const Vec& y, double x_norm = 0.0);

/// True when the metric update runs at round k (k >= 1).
bool hessian_update_due(int round, const std::optional<int>& base);

/// z = (sum B_i)^-1 sum (B_i x_i - g_i), via Cholesky.
Vec update_global_bfgs(const std::vector<Mat>& B, const std::vector<Vec>& x_plus, const std::vector<Vec>& g);
Vec update_global_bfgs(const std::vector<AgentState>& agents);

/// z = 1/N sum (x_i - g_i / rho), summed in agent order.
Vec update_global_reduced(double rho, const std::vector<Vec>& x_plus, const std::vector<Vec>& g);

/// lambda+ = P (x_plus - z_plus) - g
Vec recover_dual(const ProxMetric& prox, const Vec& x_plus, const Vec& z_plus, const Vec& g);

struct KktSolution {
    Vec z;
    std::vector<Vec> lambda;
    std::vector<Vec> dx;
};

/// Solves the full consensus QP
///
///   min sum_i 1/2 dx_i^T B_i dx_i + g_i^T dx_i   s.t.  x_i + dx_i = z | lambda_i
///
/// by assembling its (2N+1)n KKT system and factoring it with full-pivot LU.
/// Test oracle for the closed-form global update. Throws LinalgError when the
/// system is singular.
KktSolution kkt_oracle(const std::vector<Mat>& B, const std::vector<Vec>& x_plus, const std::vector<Vec>& g);

struct RoundOptions {
    double rho = 100.0;
    NewtonOptions subproblem;
    unsigned threads = 1;
    const ReferenceSolution* reference = nullptr;
    bool disable_hessian_updates = false;
    bool measure_time = false;
};

/// One Consensus ALADIN round: local solves, upload of x_i, gradient
/// recovery, (damped) BFGS, global update, dual recovery, download of
/// (lambda_i, z). Advances coord.round. Throws SubproblemFailure.
IterationRecord run_round(const Variant& variant, const ConsensusProblem& problem, std::vector<AgentState>& agents,
                          CoordinatorState& coord, const RoundOptions& options);

}  // namespace caladin

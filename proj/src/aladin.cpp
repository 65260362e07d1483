#include "caladin/aladin.hpp"

#include <chrono>
#include <cmath>

namespace caladin {

namespace {

constexpr double kSkipStepTol = 1e-12;
constexpr double kDampingDenominatorTol = 1e-14;
constexpr double kDampingRatio = 0.2;

void require_same_count(std::size_t a, std::size_t b, const char* what)
{
    if (a != b || a == 0) {
        throw LinalgError(std::string(what) + ": agent lists empty or of different length");
    }
}

}  // namespace

std::vector<AgentState> initial_agents(std::size_t num_agents, Eigen::Index dim, double rho)
{
    AgentState zero;
    zero.x = Vec::Zero(dim);
    zero.x_prev = Vec::Zero(dim);
    zero.lambda = Vec::Zero(dim);
    zero.g = Vec::Zero(dim);
    zero.g_prev = Vec::Zero(dim);
    zero.B = rho * Mat::Identity(dim, dim);
    return std::vector<AgentState>(num_agents, zero);
}

Vec recover_gradient(const ProxMetric& prox, const Vec& z, const Vec& x_plus, const Vec& lambda)
{
    return apply_metric(prox, z - x_plus) - lambda;
}

BfgsUpdate damped_bfgs_update(const Mat& B, const Vec& s, const Vec& y, double x_norm)
{
    BfgsUpdate out{B, y, false, false};
    if (s.size() != B.rows() || y.size() != B.rows()) {
        throw LinalgError("damped_bfgs_update: dimension mismatch");
    }
    if (s.norm() <= kSkipStepTol * (1.0 + x_norm)) {
        out.skipped = true;
        return out;
    }

    const Vec bs = B * s;
    const double sbs = s.dot(bs);
    const double sy = s.dot(y);
    if (sy <= kDampingRatio * sbs) {
        const double denom = sbs - sy;
        if (std::abs(denom) <= kDampingDenominatorTol) {
            out.skipped = true;
            return out;
        }
        const double theta = (kDampingRatio * sbs - sy) / denom;
        out.y = y + theta * (bs - y);
        out.damped = true;
    }

    const double sy_used = s.dot(out.y);
    Mat next = B - (bs * bs.transpose()) / sbs + (out.y * out.y.transpose()) / sy_used;
    out.B = 0.5 * (next + next.transpose());
    return out;
}

bool hessian_update_due(int round, const std::optional<int>& base)
{
    if (!base) {
        return true;
    }
    if (*base < 2) {
        throw std::invalid_argument("hessian schedule base must be >= 2");
    }
    long long power = *base;
    while (power < round) {
        power *= *base;
    }
    return power == round;
}

Vec update_global_bfgs(const std::vector<Mat>& B, const std::vector<Vec>& x_plus, const std::vector<Vec>& g)
{
    require_same_count(B.size(), x_plus.size(), "update_global_bfgs");
    require_same_count(B.size(), g.size(), "update_global_bfgs");

    const Eigen::Index n = x_plus.front().size();
    Mat b_sum = Mat::Zero(n, n);
    Vec rhs = Vec::Zero(n);
    for (std::size_t i = 0; i < B.size(); ++i) {
        b_sum += B[i];
        rhs += B[i] * x_plus[i] - g[i];
    }
    const auto factor = cholesky(b_sum);
    if (!factor) {
        throw LinalgError("update_global_bfgs: sum of metrics is not SPD");
    }
    return spd_solve(*factor, rhs);
}

Vec update_global_bfgs(const std::vector<AgentState>& agents)
{
    std::vector<Mat> b;
    std::vector<Vec> x;
    std::vector<Vec> g;
    for (const auto& a : agents) {
        b.push_back(a.B);
        x.push_back(a.x);
        g.push_back(a.g);
    }
    return update_global_bfgs(b, x, g);
}

Vec update_global_reduced(double rho, const std::vector<Vec>& x_plus, const std::vector<Vec>& g)
{
    if (!(rho > 0.0)) {
        throw std::invalid_argument("update_global_reduced: rho must be positive");
    }
    require_same_count(x_plus.size(), g.size(), "update_global_reduced");
    Vec z = Vec::Zero(x_plus.front().size());
    for (std::size_t i = 0; i < x_plus.size(); ++i) {
        z += x_plus[i] - g[i] / rho;
    }
    return z / static_cast<double>(x_plus.size());
}

Vec recover_dual(const ProxMetric& prox, const Vec& x_plus, const Vec& z_plus, const Vec& g)
{
    return apply_metric(prox, x_plus - z_plus) - g;
}

KktSolution kkt_oracle(const std::vector<Mat>& B, const std::vector<Vec>& x_plus, const std::vector<Vec>& g)
{
    require_same_count(B.size(), x_plus.size(), "kkt_oracle");
    require_same_count(B.size(), g.size(), "kkt_oracle");

    const auto N = static_cast<Eigen::Index>(B.size());
    const Eigen::Index n = x_plus.front().size();
    const Eigen::Index dim = (2 * N + 1) * n;
    // Unknown layout: [dx_1 .. dx_N | z | lambda_1 .. lambda_N]
    const Eigen::Index z_off = N * n;
    const Eigen::Index l_off = z_off + n;

    Mat kkt = Mat::Zero(dim, dim);
    Vec rhs = Vec::Zero(dim);
    const Mat eye = Mat::Identity(n, n);
    for (Eigen::Index i = 0; i < N; ++i) {
        const Eigen::Index dx = i * n;
        const Eigen::Index lam = l_off + i * n;
        // stationarity in dx_i: B_i dx_i + g_i + lambda_i = 0
        kkt.block(dx, dx, n, n) = B[i];
        kkt.block(dx, lam, n, n) = eye;
        rhs.segment(dx, n) = -g[i];
        // stationarity in z: -sum_i lambda_i = 0
        kkt.block(z_off, lam, n, n) = -eye;
        // primal feasibility: dx_i - z = -x_i
        kkt.block(lam, dx, n, n) = eye;
        kkt.block(lam, z_off, n, n) = -eye;
        rhs.segment(lam, n) = -x_plus[i];
    }

    const Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible()) {
        throw LinalgError("kkt_oracle: singular KKT system");
    }
    const Vec sol = lu.solve(rhs);

    KktSolution out;
    out.z = sol.segment(z_off, n);
    for (Eigen::Index i = 0; i < N; ++i) {
        out.dx.push_back(sol.segment(i * n, n));
        out.lambda.push_back(sol.segment(l_off + i * n, n));
    }
    return out;
}

IterationRecord run_round(const Variant& variant, const ConsensusProblem& problem, std::vector<AgentState>& agents,
                          CoordinatorState& coord, const RoundOptions& options)
{
    if (!(options.rho > 0.0)) {
        throw std::invalid_argument("run_round: rho must be positive");
    }
    if (agents.size() != problem.num_agents()) {
        throw std::invalid_argument("run_round: agent state count does not match the problem");
    }
    const auto start = std::chrono::steady_clock::now();
    const int round = coord.round + 1;
    const std::size_t N = agents.size();
    const bool matrix_prox = variant.kind == AladinKind::MatrixProx;

    auto local_metric = [&](const AgentState& a) -> ProxMetric {
        if (matrix_prox) {
            return a.B;
        }
        return options.rho;
    };

    // (i) local solves, warm-started from the previous x_i
    std::vector<Vec> solved(N);
    parallel_for_agents(N, options.threads, [&](std::size_t i) {
        SubproblemSpec spec{problem.agents[i].get(), agents[i].lambda, coord.z, local_metric(agents[i])};
        const auto report = solve_subproblem(spec, agents[i].x, options.subproblem);
        if (!report.converged) {
            throw SubproblemFailure(i, round,
                                    "gradient norm " + format_double(report.gradient_norm) + " after " +
                                        std::to_string(report.iterations) + " Newton iterations");
        }
        solved[i] = report.minimizer;
    });

    CommChannel channel;
    IterationRecord record;
    record.round = round;

    // (ii)-(iii) master: gradient recovery, damped BFGS
    for (std::size_t i = 0; i < N; ++i) {
        AgentState& a = agents[i];
        a.x = channel.upload(solved[i]);
        a.g = recover_gradient(local_metric(a), coord.z, a.x, a.lambda);

        if (variant.kind == AladinKind::Bfgs) {
            if (a.has_history && !options.disable_hessian_updates &&
                hessian_update_due(round, variant.hessian_update_base)) {
                const auto upd = damped_bfgs_update(a.B, a.x - a.x_prev, a.g - a.g_prev, a.x.norm());
                if (upd.skipped) {
                    ++record.bfgs_skipped;
                } else {
                    a.B = upd.B;
                    ++record.bfgs_updates;
                    record.bfgs_damped += upd.damped ? 1 : 0;
                }
            }
        }
        a.x_prev = a.x;
        a.g_prev = a.g;
        a.has_history = true;
    }

    // (iv) global update
    std::vector<Vec> xs(N);
    std::vector<Vec> gs(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = agents[i].x;
        gs[i] = agents[i].g;
    }
    const Vec z_plus = variant.kind == AladinKind::Reduced ? update_global_reduced(options.rho, xs, gs)
                                                           : update_global_bfgs(agents);

    // (v) dual recovery and download of (lambda_i, z)
    std::vector<Vec> lambdas(N);
    for (std::size_t i = 0; i < N; ++i) {
        AgentState& a = agents[i];
        const ProxMetric metric = variant.kind == AladinKind::Reduced ? ProxMetric{options.rho} : ProxMetric{a.B};
        a.lambda = channel.download(recover_dual(metric, a.x, z_plus, a.g));
        channel.download(z_plus);
        lambdas[i] = a.lambda;
    }
    coord.z = z_plus;
    coord.round = round;

    record.consensus_residual = consensus_residual(xs, coord.z);
    record.objective_at_z = problem.objective(coord.z);
    record.dual_sum_norm = dual_sum(lambdas).norm();
    record.max_dual_norm = max_norm(lambdas);
    record.floats_up = channel.floats_up();
    record.floats_down = channel.floats_down();
    if (options.reference != nullptr) {
        std::vector<Mat> metrics;
        for (const auto& a : agents) {
            metrics.push_back(a.B);
        }
        record.energy = energy(coord.z, lambdas, *options.reference, metrics);
    }
    if (options.measure_time) {
        record.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return record;
}

}  // namespace caladin

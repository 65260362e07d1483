#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "caladin/linalg.hpp"

namespace caladin {

/// A twice continuously differentiable local objective f_i : R^n -> R.
class ObjectiveOracle {
public:
    virtual ~ObjectiveOracle() = default;

    virtual Eigen::Index dimension() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;
};

using OraclePtr = std::shared_ptr<const ObjectiveOracle>;

/// Primal/dual optimum of a consensus problem: x_i = z* for all i, with
/// multipliers lambda*_i = -grad f_i(z*).
struct ReferenceSolution {
    Vec z;
    std::vector<Vec> lambda;
    double gradient_norm = 0.0;  ///< ||sum_i grad f_i(z*)||
    bool local = false;          ///< only a local minimizer (non-convex problem)
};

/// min sum_i f_i(x_i)  s.t.  x_i = z  for every agent i.
struct ConsensusProblem {
    std::string name;
    Eigen::Index dimension = 0;
    std::vector<OraclePtr> agents;
    std::optional<ReferenceSolution> known_solution;

    std::size_t num_agents() const { return agents.size(); }

    /// sum_i f_i(z), summed in agent order.
    double objective(const Vec& z) const;
};

/// f(x) = 1/2 (x - a)^T Q (x - a)
class QuadraticObjective final : public ObjectiveOracle {
public:
    QuadraticObjective(Mat q, Vec a);

    Eigen::Index dimension() const override { return a_.size(); }
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;

    const Mat& curvature() const { return q_; }
    const Vec& center() const { return a_; }

private:
    Mat q_;
    Vec a_;
};

/// f(x) = sum_j sqrt(1 + (x[j] - a[j])^2)
class PseudoHuberObjective final : public ObjectiveOracle {
public:
    explicit PseudoHuberObjective(Vec a);

    Eigen::Index dimension() const override { return a_.size(); }
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;

private:
    Vec a_;
};

/// Measured data of one sensor-allocation agent; every vector has length 5.
struct SensorData {
    Vec alpha;
    Vec beta;
    Vec sigma;
};

/// Non-convex sensor-allocation objective on x = [x_alpha; x_beta] in R^10:
///
///   f(x) = 1/2 (|x_alpha - zeta_alpha|^2 + |x_beta - zeta_beta|^2)
///        + 1/2 sum_{j<5} ((x_alpha[j] - x_beta[j])^2 - zeta_sigma[j])^2
class SensorAllocationObjective final : public ObjectiveOracle {
public:
    static constexpr Eigen::Index kBlock = 5;

    explicit SensorAllocationObjective(SensorData data);

    Eigen::Index dimension() const override { return 2 * kBlock; }
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    Mat hessian(const Vec& x) const override;

    const SensorData& data() const { return data_; }

private:
    SensorData data_;
};

/// Deterministic N(0, std^2) stream.
///
/// Uniforms come from a counter-based generator: the k-th 64-bit word is the
/// SplitMix64 finalizer applied to seed + (k + 1) * 0x9E3779B97F4A7C15, mapped
/// to (0, 1) as ((w >> 11) + 0.5) * 2^-53. Normals are produced by Box-Muller
/// from consecutive uniform pairs (u1, u2): sqrt(-2 ln u1) cos(2 pi u2) then
/// sqrt(-2 ln u1) sin(2 pi u2).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

    double next(double std = 1.0);
    Vec vector(Eigen::Index size, double std = 1.0);
    Mat matrix(Eigen::Index rows, Eigen::Index cols, double std = 1.0);

    static std::uint64_t word(std::uint64_t seed, std::uint64_t counter);
    static double uniform(std::uint64_t seed, std::uint64_t counter);

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::optional<double> spare_;
};

/// `count` draws from N(0, std^2); throws std::invalid_argument if std <= 0.
std::vector<double> gaussian_draw(std::uint64_t seed, std::size_t count, double std);

/// Strongly convex quadratic instance with Q_i = A_i^T A_i + I. The analytic
/// solution is stored in known_solution.
ConsensusProblem quadratic_problem(std::size_t num_agents, Eigen::Index dim, std::uint64_t seed);

/// Same as quadratic_problem but with caller-supplied curvature and centers.
ConsensusProblem quadratic_problem(const std::vector<Mat>& curvatures, const std::vector<Vec>& centers);

/// Strictly convex, non-quadratic instance. The reference solution is computed
/// by centralized Newton at construction.
ConsensusProblem pseudo_huber_problem(std::size_t num_agents, Eigen::Index dim, std::uint64_t seed);
ConsensusProblem pseudo_huber_problem(const std::vector<Vec>& centers);

/// Non-convex sensor-allocation instance (n = 10); data ~ N(0, data_std^2).
/// No reference solution is attached.
ConsensusProblem sensor_allocation_problem(std::size_t num_agents, std::uint64_t seed, double data_std = 5.0);

/// Builds a problem by CLI name: "quadratic", "pseudo-huber", "sensor-allocation".
/// `dim` is ignored for sensor-allocation. Throws std::invalid_argument on an
/// unknown name or invalid size.
ConsensusProblem make_problem(const std::string& name, std::size_t num_agents, Eigen::Index dim,
                              std::uint64_t seed);

}  // namespace caladin

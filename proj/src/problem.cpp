#include "caladin/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "caladin/diagnostics.hpp"

namespace caladin {

double ConsensusProblem::objective(const Vec& z) const
{
    double total = 0.0;
    for (const auto& f : agents) {
        total += f->value(z);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Mat q, Vec a) : q_(symmetrized(q)), a_(std::move(a))
{
    if (q_.rows() != a_.size()) {
        throw LinalgError("QuadraticObjective: dimension mismatch");
    }
}

double QuadraticObjective::value(const Vec& x) const
{
    const Vec d = x - a_;
    return 0.5 * d.dot(q_ * d);
}

Vec QuadraticObjective::gradient(const Vec& x) const { return q_ * (x - a_); }

Mat QuadraticObjective::hessian(const Vec& /*x*/) const { return q_; }

PseudoHuberObjective::PseudoHuberObjective(Vec a) : a_(std::move(a)) {}

double PseudoHuberObjective::value(const Vec& x) const
{
    return (1.0 + (x - a_).array().square()).sqrt().sum();
}

Vec PseudoHuberObjective::gradient(const Vec& x) const
{
    const Eigen::ArrayXd d = (x - a_).array();
    return (d / (1.0 + d.square()).sqrt()).matrix();
}

Mat PseudoHuberObjective::hessian(const Vec& x) const
{
    const Eigen::ArrayXd r = 1.0 + (x - a_).array().square();
    return (1.0 / (r * r.sqrt())).matrix().asDiagonal();
}

SensorAllocationObjective::SensorAllocationObjective(SensorData data) : data_(std::move(data))
{
    if (data_.alpha.size() != kBlock || data_.beta.size() != kBlock || data_.sigma.size() != kBlock) {
        throw LinalgError("SensorAllocationObjective: data vectors must have length 5");
    }
}

double SensorAllocationObjective::value(const Vec& x) const
{
    const auto xa = x.head(kBlock);
    const auto xb = x.tail(kBlock);
    const Eigen::ArrayXd coupling = (xa - xb).array().square() - data_.sigma.array();
    return 0.5 * ((xa - data_.alpha).squaredNorm() + (xb - data_.beta).squaredNorm()) +
           0.5 * coupling.square().sum();
}

Vec SensorAllocationObjective::gradient(const Vec& x) const
{
    const auto xa = x.head(kBlock);
    const auto xb = x.tail(kBlock);
    const Eigen::ArrayXd d = (xa - xb).array();
    const Eigen::ArrayXd coupling = 2.0 * (d.square() - data_.sigma.array()) * d;

    Vec g(2 * kBlock);
    g.head(kBlock) = xa - data_.alpha + coupling.matrix();
    g.tail(kBlock) = xb - data_.beta - coupling.matrix();
    return g;
}

Mat SensorAllocationObjective::hessian(const Vec& x) const
{
    const Eigen::ArrayXd d = (x.head(kBlock) - x.tail(kBlock)).array();
    const Eigen::ArrayXd curv = 6.0 * d.square() - 2.0 * data_.sigma.array();

    Mat h = Mat::Identity(2 * kBlock, 2 * kBlock);
    for (Eigen::Index j = 0; j < kBlock; ++j) {
        h(j, j) += curv(j);
        h(j + kBlock, j + kBlock) += curv(j);
        h(j, j + kBlock) -= curv(j);
        h(j + kBlock, j) -= curv(j);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

std::uint64_t GaussianStream::word(std::uint64_t seed, std::uint64_t counter)
{
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double GaussianStream::uniform(std::uint64_t seed, std::uint64_t counter)
{
    return (static_cast<double>(word(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next(double std)
{
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v * std;
    }
    const double u1 = uniform(seed_, counter_++);
    const double u2 = uniform(seed_, counter_++);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    return r * std::cos(angle) * std;
}

Vec GaussianStream::vector(Eigen::Index size, double std)
{
    Vec v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v(i) = next(std);
    }
    return v;
}

Mat GaussianStream::matrix(Eigen::Index rows, Eigen::Index cols, double std)
{
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = next(std);
        }
    }
    return m;
}

std::vector<double> gaussian_draw(std::uint64_t seed, std::size_t count, double std)
{
    if (!(std > 0.0)) {
        throw std::invalid_argument("gaussian_draw: std must be positive");
    }
    GaussianStream stream(seed);
    std::vector<double> out(count);
    for (auto& v : out) {
        v = stream.next(std);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problem factories
// ---------------------------------------------------------------------------

namespace {

void require_sizes(std::size_t num_agents, Eigen::Index dim)
{
    if (num_agents < 1) {
        throw std::invalid_argument("problem: need at least one agent");
    }
    if (dim < 1) {
        throw std::invalid_argument("problem: dimension must be positive");
    }
}

}  // namespace

ConsensusProblem quadratic_problem(const std::vector<Mat>& curvatures, const std::vector<Vec>& centers)
{
    if (curvatures.empty() || curvatures.size() != centers.size()) {
        throw std::invalid_argument("quadratic_problem: need matching, non-empty Q and a lists");
    }
    const Eigen::Index n = centers.front().size();

    ConsensusProblem problem;
    problem.name = "quadratic";
    problem.dimension = n;

    Mat q_sum = Mat::Zero(n, n);
    Vec rhs = Vec::Zero(n);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        auto f = std::make_shared<QuadraticObjective>(curvatures[i], centers[i]);
        if (f->dimension() != n) {
            throw LinalgError("quadratic_problem: agents disagree on dimension");
        }
        q_sum += f->curvature();
        rhs += f->curvature() * f->center();
        problem.agents.push_back(std::move(f));
    }

    const auto factor = cholesky(q_sum);
    if (!factor) {
        throw LinalgError("quadratic_problem: sum of curvatures is not SPD");
    }
    ReferenceSolution ref;
    ref.z = spd_solve(*factor, rhs);
    for (const auto& f : problem.agents) {
        ref.lambda.push_back(-f->gradient(ref.z));
    }
    Vec total_gradient = Vec::Zero(n);
    for (const auto& f : problem.agents) {
        total_gradient += f->gradient(ref.z);
    }
    ref.gradient_norm = total_gradient.norm();
    problem.known_solution = std::move(ref);
    return problem;
}

ConsensusProblem quadratic_problem(std::size_t num_agents, Eigen::Index dim, std::uint64_t seed)
{
    require_sizes(num_agents, dim);
    GaussianStream stream(seed);
    std::vector<Mat> curvatures;
    std::vector<Vec> centers;
    for (std::size_t i = 0; i < num_agents; ++i) {
        const Mat a = stream.matrix(dim, dim);
        curvatures.push_back(a.transpose() * a + Mat::Identity(dim, dim));
        centers.push_back(stream.vector(dim));
    }
    return quadratic_problem(curvatures, centers);
}

ConsensusProblem pseudo_huber_problem(const std::vector<Vec>& centers)
{
    if (centers.empty()) {
        throw std::invalid_argument("pseudo_huber_problem: need at least one agent");
    }
    ConsensusProblem problem;
    problem.name = "pseudo-huber";
    problem.dimension = centers.front().size();
    for (const auto& a : centers) {
        if (a.size() != problem.dimension) {
            throw LinalgError("pseudo_huber_problem: agents disagree on dimension");
        }
        problem.agents.push_back(std::make_shared<PseudoHuberObjective>(a));
    }
    problem.known_solution = centralized_solve(problem, 1e-12);
    return problem;
}

ConsensusProblem pseudo_huber_problem(std::size_t num_agents, Eigen::Index dim, std::uint64_t seed)
{
    require_sizes(num_agents, dim);
    GaussianStream stream(seed);
    std::vector<Vec> centers;
    for (std::size_t i = 0; i < num_agents; ++i) {
        centers.push_back(stream.vector(dim));
    }
    return pseudo_huber_problem(centers);
}

ConsensusProblem sensor_allocation_problem(std::size_t num_agents, std::uint64_t seed, double data_std)
{
    require_sizes(num_agents, 1);
    if (!(data_std > 0.0)) {
        throw std::invalid_argument("sensor_allocation_problem: data std must be positive");
    }
    constexpr auto block = SensorAllocationObjective::kBlock;

    GaussianStream stream(seed);
    ConsensusProblem problem;
    problem.name = "sensor-allocation";
    problem.dimension = 2 * block;
    for (std::size_t i = 0; i < num_agents; ++i) {
        SensorData data;
        data.alpha = stream.vector(block, data_std);
        data.beta = stream.vector(block, data_std);
        data.sigma = stream.vector(block, data_std);
        problem.agents.push_back(std::make_shared<SensorAllocationObjective>(std::move(data)));
    }
    return problem;
}

ConsensusProblem make_problem(const std::string& name, std::size_t num_agents, Eigen::Index dim,
                              std::uint64_t seed)
{
    if (name == "quadratic") {
        return quadratic_problem(num_agents, dim, seed);
    }
    if (name == "pseudo-huber") {
        return pseudo_huber_problem(num_agents, dim, seed);
    }
    if (name == "sensor-allocation") {
        return sensor_allocation_problem(num_agents, seed);
    }
    throw std::invalid_argument("unknown problem '" + name +
                                "' (expected quadratic, pseudo-huber or sensor-allocation)");
}

}  // namespace caladin

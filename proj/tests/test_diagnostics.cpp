#include <doctest.h>

#include <charconv>
#include <random>
#include <sstream>

#include "caladin/diagnostics.hpp"
#include "oracles.hpp"

using namespace caladin;

namespace {

ReferenceSolution sample_reference(std::mt19937_64& rng, std::size_t N, Eigen::Index n)
{
    ReferenceSolution ref;
    ref.z = testing::random_vec(rng, n);
    for (std::size_t i = 0; i < N; ++i) {
        ref.lambda.push_back(testing::random_vec(rng, n));
    }
    return ref;
}

}  // namespace

TEST_CASE("energy examples")
{
    std::mt19937_64 rng(1);
    const auto ref = sample_reference(rng, 3, 2);
    const std::vector<Mat> identity(3, Mat::Identity(2, 2));
    CHECK(energy(ref.z, ref.lambda, ref, identity) == 0.0);

    const Vec z = testing::random_vec(rng, 2);
    std::vector<Vec> lambda;
    double expected = 3.0 * (z - ref.z).squaredNorm();
    for (const auto& l : ref.lambda) {
        lambda.push_back(l + testing::random_vec(rng, 2));
        expected += (lambda.back() - l).squaredNorm();
    }
    CHECK(energy(z, lambda, ref, identity) == doctest::Approx(expected).epsilon(1e-14));

    ReferenceSolution zero{Vec::Zero(2), {Vec::Zero(2), Vec::Zero(2)}, 0.0, false};
    const std::vector<Mat> twos(2, 2.0 * Mat::Identity(2, 2));
    CHECK(energy(Vec::Unit(2, 0), {Vec::Zero(2), Vec::Zero(2)}, zero, twos) == doctest::Approx(4.0));
}

TEST_CASE("energy is positive away from the reference")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ref = sample_reference(rng, 3, 3);
        std::vector<Mat> B;
        for (int i = 0; i < 3; ++i) {
            B.push_back(testing::random_spd(rng, 3));
        }
        Vec z = ref.z;
        auto lambda = ref.lambda;
        if (trial % 2 == 0) {
            z(trial % 3) += 1e-6;
        } else {
            lambda[trial % 3](1) -= 1e-6;
        }
        CHECK(energy(z, lambda, ref, B) > 0.0);
        CHECK(energy(ref.z, ref.lambda, ref, B) == 0.0);
    }
}

TEST_CASE("communication counts")
{
    CHECK(comm_floats(Algorithm::BfgsAladin, 20, 10) == CommFloats{200, 400});
    CHECK(comm_floats(Algorithm::ReducedAladin, 20, 10) == CommFloats{200, 400});
    CHECK(comm_floats(Algorithm::DirectQpAladin, 20, 10).up == 2400);
    CHECK(comm_floats(Algorithm::AdmmAggregateFirst, 2, 3) == CommFloats{6, 6});
    CHECK(comm_floats(Algorithm::AdmmDualFirst, 4, 5) == CommFloats{20, 20});
}

TEST_CASE("centralized solve on quadratic problems")
{
    const auto p = quadratic_problem(4, 3, 12);
    Mat Q = Mat::Zero(3, 3);
    Vec rhs = Vec::Zero(3);
    for (const auto& f : p.agents) {
        const auto& q = dynamic_cast<const QuadraticObjective&>(*f);
        Q += q.curvature();
        rhs += q.curvature() * q.center();
    }
    const Vec expected = Q.fullPivLu().solve(rhs);
    const auto ref = centralized_solve(p);
    CHECK((ref.z - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
    CHECK(dual_sum(ref.lambda).norm() <= 1e-8);
    CHECK_FALSE(ref.local);
}

TEST_CASE("centralized solve on a symmetric pseudo-Huber problem")
{
    const auto p = pseudo_huber_problem(std::vector<Vec>{Vec::Constant(1, 0.0), Vec::Constant(1, 2.0)});
    const auto ref = centralized_solve(p);
    CHECK(ref.z(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("centralized solve reports exhaustion")
{
    const auto p = pseudo_huber_problem(3, 2, 1);
    CHECK_THROWS_AS(centralized_solve(p, 1e-14, 0, Vec::Constant(2, 40.0)), MaxIterExceeded);
}

TEST_CASE("multistart reference on sensor allocation")
{
    const auto p = sensor_allocation_problem(20, 42);
    const auto ref = multistart_reference(p, 42);
    CHECK(ref.local);
    CHECK(ref.gradient_norm <= 1e-9);
    CHECK(dual_sum(ref.lambda).norm() <= 1e-8);
    for (std::size_t i = 0; i < p.num_agents(); ++i) {
        CHECK((p.agents[i]->gradient(ref.z) + ref.lambda[i]).norm() <= 1e-6);
    }
    // Best of 20 starts cannot be beaten by the zero start's local minimizer.
    const auto zero_start = centralized_solve(p, 1e-10, 200, Vec::Zero(10));
    CHECK(p.objective(ref.z) <= p.objective(zero_start.z) + 1e-9);
}

TEST_CASE("shortest round-trip formatting")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(3.0) == "3");
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = testing::random_vec(rng, 1, 1e3)(0);
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
}

TEST_CASE("CSV rows follow the schema")
{
    IterationRecord rec;
    rec.round = 3;
    rec.consensus_residual = 0.5;
    rec.objective_at_z = -2.25;
    rec.dual_sum_norm = 1e-15;
    rec.floats_up = 200;
    rec.floats_down = 400;
    CHECK(csv_row(rec) == "3,0.5,-2.25,,1e-15,200,400,0");
    rec.energy = 0.125;
    CHECK(csv_row(rec) == "3,0.5,-2.25,0.125,1e-15,200,400,0");

    std::ostringstream out;
    write_csv(out, {rec});
    CHECK(out.str() == std::string(kCsvHeader) + "\n3,0.5,-2.25,0.125,1e-15,200,400,0\n");
}

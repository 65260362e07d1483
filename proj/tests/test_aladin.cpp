#include <doctest.h>

#include <random>

#include "caladin/aladin.hpp"
#include "oracles.hpp"

using namespace caladin;

namespace {

struct RandomUpdate {
    Mat B;
    Vec s;
    Vec y;
};

RandomUpdate random_update(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Index n = dim(rng);
    RandomUpdate u{testing::random_spd(rng, n, 0.1), testing::random_vec(rng, n), testing::random_vec(rng, n)};
    // Bias half the draws towards curvature-consistent pairs so both branches run.
    if (unit(rng) < 0.5) {
        u.y = testing::random_spd(rng, n, 0.5) * u.s;
    }
    return u;
}

}  // namespace

TEST_CASE("recover_gradient examples")
{
    const Vec x{{1.0, -2.0}};
    CHECK(recover_gradient(3.0, x, x, Vec::Zero(2)).norm() == 0.0);
    CHECK((recover_gradient(100.0, Vec::Zero(2), x, Vec::Zero(2)) + 100.0 * x).norm() == 0.0);
}

TEST_CASE("recovered gradient equals the analytic gradient after an exact solve")
{
    const auto p = sensor_allocation_problem(20, 42);
    std::mt19937_64 rng(9);
    for (const auto& f : p.agents) {
        const Vec lambda = testing::random_vec(rng, 10, 10.0);
        const Vec z = testing::random_vec(rng, 10, 2.0);
        const auto report = solve_subproblem({f.get(), lambda, z, 100.0}, z, {});
        REQUIRE(report.converged);
        const Vec g = recover_gradient(100.0, z, report.minimizer, lambda);
        CHECK((g - f->gradient(report.minimizer)).norm() <= 1e-8);
    }
}

TEST_CASE("damped BFGS examples")
{
    const Vec e1 = Vec::Unit(3, 0);
    SUBCASE("secant already satisfied")
    {
        const auto u = damped_bfgs_update(Mat::Identity(3, 3), e1, e1);
        CHECK_FALSE(u.skipped);
        CHECK_FALSE(u.damped);
        CHECK((u.B - Mat::Identity(3, 3)).norm() <= 1e-15);
    }
    SUBCASE("rank-one stretch")
    {
        const auto u = damped_bfgs_update(Mat::Identity(3, 3), e1, 2.0 * e1);
        Mat expected = Mat::Identity(3, 3);
        expected(0, 0) = 2.0;
        CHECK((u.B - expected).norm() <= 1e-15);
        CHECK((u.B * e1 - 2.0 * e1).norm() <= 1e-15);
    }
    SUBCASE("negative curvature triggers damping")
    {
        const Vec s = Vec::Unit(2, 0);
        const auto u = damped_bfgs_update(Mat::Identity(2, 2), s, -s);
        CHECK(u.damped);
        CHECK(u.y(0) == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(u.y(1) == 0.0);
        CHECK(u.y.dot(s) == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("tiny steps are skipped")
    {
        const auto u = damped_bfgs_update(Mat::Identity(2, 2), Vec::Constant(2, 1e-14), Vec::Ones(2));
        CHECK(u.skipped);
        CHECK(u.B == Mat::Identity(2, 2));
    }
}

TEST_CASE("damped BFGS properties on 1000 random pairs")
{
    std::mt19937_64 rng(31);
    int damped = 0;
    int plain = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto [B, s, y] = random_update(rng);
        const double sBs = s.dot(B * s);
        const auto u = damped_bfgs_update(B, s, y);
        REQUIRE_FALSE(u.skipped);
        CHECK(min_eig_lower_bound(u.B) > 0.0);
        if (u.damped) {
            ++damped;
            CHECK(std::abs(u.y.dot(s) - 0.2 * sBs) <= 1e-12 * 0.2 * sBs);
        } else {
            ++plain;
            CHECK((u.B * s - y).norm() <= 1e-10 * std::max(1.0, y.norm()));
        }
    }
    CHECK(damped > 100);
    CHECK(plain > 100);
}

TEST_CASE("hessian update schedule")
{
    for (int k = 1; k <= 100; ++k) {
        CHECK(hessian_update_due(k, std::nullopt));
    }
    std::vector<int> due;
    for (int k = 1; k <= 100; ++k) {
        if (hessian_update_due(k, 3)) {
            due.push_back(k);
        }
    }
    CHECK(due == std::vector<int>{3, 9, 27, 81});
    CHECK_FALSE(hessian_update_due(1, 2));
    CHECK(hessian_update_due(64, 2));
    CHECK_THROWS_AS(hessian_update_due(4, 1), std::invalid_argument);
}

TEST_CASE("update_global_reduced examples")
{
    const std::vector<Vec> x{Vec::Constant(1, 1.0), Vec::Constant(1, 3.0)};
    const std::vector<Vec> g{Vec::Constant(1, 2.0), Vec::Constant(1, -2.0)};
    CHECK(update_global_reduced(2.0, x, g)(0) == 2.0);
    CHECK(update_global_reduced(2.0, x, {Vec::Zero(1), Vec::Zero(1)})(0) == 2.0);
    CHECK(update_global_reduced(4.0, {x[0]}, {g[0]})(0) == 0.5);
}

TEST_CASE("update_global_bfgs examples")
{
    std::mt19937_64 rng(6);
    const Mat B = testing::random_spd(rng, 3);
    const Vec x = testing::random_vec(rng, 3);
    const Vec g = testing::random_vec(rng, 3);
    const Vec expected = x - B.ldlt().solve(g);
    CHECK((update_global_bfgs({B}, {x}, {g}) - expected).norm() <= 1e-12 * (1.0 + expected.norm()));

    std::vector<Mat> Bs(4, 7.0 * Mat::Identity(3, 3));
    std::vector<Vec> xs;
    std::vector<Vec> gs;
    for (int i = 0; i < 4; ++i) {
        xs.push_back(testing::random_vec(rng, 3));
        gs.push_back(testing::random_vec(rng, 3));
    }
    CHECK((update_global_bfgs(Bs, xs, gs) - update_global_reduced(7.0, xs, gs)).norm() <= 1e-14);
}

TEST_CASE("recover_dual examples")
{
    const Vec z = Vec::Constant(2, 1.5);
    CHECK(recover_dual(3.0, z, z, Vec::Zero(2)).norm() == 0.0);
    CHECK(std::abs(recover_dual(100.0, Vec::Constant(1, 0.01), Vec::Zero(1), Vec::Constant(1, 1.0))(0)) <= 1e-15);
}

TEST_CASE("KKT oracle examples")
{
    const Vec x{{2.0, -1.0}};
    const auto sol = kkt_oracle({Mat::Identity(2, 2)}, {x}, {Vec::Zero(2)});
    CHECK(sol.dx[0].norm() <= 1e-15);
    CHECK((sol.z - x).norm() <= 1e-15);
    CHECK(sol.lambda[0].norm() <= 1e-15);
}

TEST_CASE("closed-form global update agrees with the KKT oracle")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t N = static_cast<std::size_t>(size(rng));
        const Eigen::Index n = size(rng);
        std::vector<Mat> B;
        std::vector<Vec> x;
        std::vector<Vec> g;
        for (std::size_t i = 0; i < N; ++i) {
            B.push_back(testing::random_spd(rng, n));
            x.push_back(testing::random_vec(rng, n));
            g.push_back(testing::random_vec(rng, n));
        }
        const auto kkt = kkt_oracle(B, x, g);
        const Vec z = update_global_bfgs(B, x, g);
        CHECK((z - kkt.z).norm() <= 1e-10 * (1.0 + kkt.z.norm()));
        CHECK(dual_sum(kkt.lambda).norm() <= 1e-10 * (1.0 + max_norm(kkt.lambda)));
        for (std::size_t i = 0; i < N; ++i) {
            const Vec lambda = recover_dual(B[i], x[i], z, g[i]);
            CHECK((lambda - kkt.lambda[i]).norm() <= 1e-10 * (1.0 + kkt.lambda[i].norm()));
        }
    }
}

TEST_CASE("reduced variant equals BFGS with updates disabled")
{
    const auto p = quadratic_problem(4, 3, 5);
    auto reduced = initial_agents(4, 3, 100.0);
    auto frozen = initial_agents(4, 3, 100.0);
    CoordinatorState cr{Vec::Zero(3), 0};
    CoordinatorState cf{Vec::Zero(3), 0};
    RoundOptions plain;
    RoundOptions disabled;
    disabled.disable_hessian_updates = true;
    for (int k = 0; k < 50; ++k) {
        const auto rr = run_round({AladinKind::Reduced, {}}, p, reduced, cr, plain);
        const auto rf = run_round({AladinKind::Bfgs, {}}, p, frozen, cf, disabled);
        CHECK((cr.z - cf.z).norm() <= 1e-12 * (1.0 + cr.z.norm()));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK((reduced[i].lambda - frozen[i].lambda).norm() <= 1e-12 * (1.0 + reduced[i].lambda.norm()));
        }
        CHECK(rr.consensus_residual == doctest::Approx(rf.consensus_residual).epsilon(1e-9));
        CHECK(rf.bfgs_updates == 0);
    }
}

TEST_CASE("dual sum vanishes every round for every ALADIN variant")
{
    for (const auto kind : {AladinKind::Bfgs, AladinKind::Reduced, AladinKind::MatrixProx}) {
        for (const auto& p : {quadratic_problem(4, 3, 2), pseudo_huber_problem(4, 3, 2), sensor_allocation_problem(5, 2)}) {
            auto agents = initial_agents(p.num_agents(), p.dimension, 100.0);
            CoordinatorState coord{Vec::Zero(p.dimension), 0};
            for (int k = 0; k < 30; ++k) {
                const auto rec = run_round({kind, {}}, p, agents, coord, {});
                CHECK(rec.dual_sum_norm <= 1e-9 * (1.0 + rec.max_dual_norm));
            }
        }
    }
}

TEST_CASE("round payloads")
{
    const auto p = sensor_allocation_problem(20, 42);
    auto agents = initial_agents(20, 10, 100.0);
    CoordinatorState coord{Vec::Zero(10), 0};
    for (int k = 0; k < 3; ++k) {
        const auto rec = run_round({AladinKind::Bfgs, {}}, p, agents, coord, {});
        CHECK(rec.floats_up == 200);
        CHECK(rec.floats_down == 400);
        const auto expected = comm_floats(Algorithm::BfgsAladin, 20, 10, rec.round);
        CHECK(rec.floats_up == expected.up);
        CHECK(rec.floats_down == expected.down);
    }
}

TEST_CASE("first BFGS update happens at round 2")
{
    const auto p = pseudo_huber_problem(3, 2, 4);
    auto agents = initial_agents(3, 2, 100.0);
    CoordinatorState coord{Vec::Zero(2), 0};
    const auto first = run_round({AladinKind::Bfgs, {}}, p, agents, coord, {});
    CHECK(first.bfgs_updates + first.bfgs_skipped == 0);
    const auto second = run_round({AladinKind::Bfgs, {}}, p, agents, coord, {});
    CHECK(second.bfgs_updates + second.bfgs_skipped == 3);
}

TEST_CASE("BFGS variant converges on the quadratic problem")
{
    const auto p = quadratic_problem(3, 2, 7);
    auto agents = initial_agents(3, 2, 100.0);
    CoordinatorState coord{Vec::Zero(2), 0};
    IterationRecord rec;
    for (int k = 0; k < 200; ++k) {
        rec = run_round({AladinKind::Bfgs, {}}, p, agents, coord, {});
        for (const auto& a : agents) {
            CHECK(min_eig_lower_bound(a.B) > 0.0);
        }
    }
    CHECK(rec.consensus_residual <= 1e-8);
    CHECK((coord.z - p.known_solution->z).norm() <= 1e-8);
}

TEST_CASE("agent scheduling does not change results")
{
    const auto p = sensor_allocation_problem(8, 11);
    auto one = initial_agents(8, 10, 100.0);
    auto four = initial_agents(8, 10, 100.0);
    CoordinatorState c1{Vec::Zero(10), 0};
    CoordinatorState c4{Vec::Zero(10), 0};
    RoundOptions o1;
    RoundOptions o4;
    o4.threads = 4;
    for (int k = 0; k < 10; ++k) {
        run_round({AladinKind::Bfgs, {}}, p, one, c1, o1);
        run_round({AladinKind::Bfgs, {}}, p, four, c4, o4);
        CHECK(c1.z == c4.z);
    }
}

TEST_CASE("subproblem failures name the agent and round")
{
    const auto p = sensor_allocation_problem(3, 1);
    auto agents = initial_agents(3, 10, 100.0);
    CoordinatorState coord{Vec::Zero(10), 0};
    RoundOptions opts;
    opts.subproblem.max_iter = 0;
    try {
        run_round({AladinKind::Bfgs, {}}, p, agents, coord, opts);
        FAIL("expected SubproblemFailure");
    } catch (const SubproblemFailure& e) {
        CHECK(e.agent() == 0);
        CHECK(e.round() == 1);
    }
}

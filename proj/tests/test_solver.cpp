#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lpsketch/solver.hpp"

using namespace lpsketch;

namespace {

StandardFormLp random_instance(Index m, Index n, std::uint64_t seed,
                               bool signed_entries = false) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif(signed_entries ? -1.0 : 0.0, 1.0);
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) A(i, j) = unif(eng);
    Vector b(m), c(n);
    for (Index i = 0; i < m; ++i) b(i) = unif(eng);
    for (Index j = 0; j < n; ++j) c(j) = unif(eng);
    return make_lp(c, A, b);
}

StandardFormLp random_feasible(Index m, Index n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) A(i, j) = unif(eng);
    Vector x(n), c(n);
    for (Index j = 0; j < n; ++j) x(j) = unif(eng);
    for (Index j = 0; j < n; ++j) c(j) = unif(eng);
    return make_lp(c, A, A * x);
}

void check_optimal_invariants(const StandardFormLp& lp, const SolveResult& res) {
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK((res.x.array() >= -1e-9).all());
    CHECK((lp.A * res.x - lp.b).lpNorm<Eigen::Infinity>() <=
          1e-8 * (1.0 + lp.b.lpNorm<Eigen::Infinity>()));
    const double cx = lp.c.dot(res.x);
    CHECK(std::abs(cx - lp.b.dot(res.y)) <= 1e-7 * (1.0 + std::abs(cx)));
    CHECK(((lp.A.transpose() * res.y - lp.c).array() <= 1e-8).all());
    // complementary slackness
    Vector slack = lp.c - lp.A.transpose() * res.y;
    for (Index j = 0; j < lp.cols(); ++j)
        CHECK(std::abs(res.x(j) * slack(j)) <= 1e-7 * (1.0 + std::abs(lp.c(j))));
}

}  // namespace

TEST_CASE("trivial optimal instance") {
    Matrix A(1, 2);
    A << 1.0, 1.0;
    auto lp = make_lp(Vector::Ones(2), A, (Vector(1) << 1.0).finished());
    auto res = solve(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(1.0));
    check_optimal_invariants(lp, res);
    CHECK(res.basis.size() == 1);
}

TEST_CASE("trivial infeasible instance") {
    Matrix A(1, 1);
    A << 1.0;
    auto lp = make_lp(Vector::Ones(1), A, (Vector(1) << -1.0).finished());
    auto res = solve(lp);
    REQUIRE(res.status == SolveStatus::Infeasible);
    // farkas certificate: y'A >= 0, y'b < 0
    CHECK(((res.farkas.transpose() * lp.A).array() >= -1e-9).all());
    CHECK(res.farkas.dot(lp.b) < -1e-9);
}

TEST_CASE("trivial unbounded instance") {
    Matrix A(1, 2);
    A << 1.0, -1.0;
    auto lp = make_lp((Vector(2) << -1.0, 0.0).finished(), A,
                      (Vector(1) << 0.0).finished());
    CHECK(solve(lp).status == SolveStatus::Unbounded);
}

TEST_CASE("budget examples") {
    Matrix A(1, 1);
    A << 1.0;
    auto lp = make_lp(Vector::Ones(1), A, (Vector(1) << 1.0).finished());

    auto ok = solve_with_budget(lp, 10.0);
    REQUIRE(ok.status == SolveStatus::Optimal);
    CHECK(ok.objective == Catch::Approx(1.0));
    CHECK(ok.x.size() == 1);
    CHECK(ok.x(0) == Catch::Approx(1.0));

    CHECK(solve_with_budget(lp, 0.5).status == SolveStatus::Infeasible);
    CHECK(solve_with_budget(lp, std::numeric_limits<double>::infinity()).status ==
          SolveStatus::Optimal);
}

TEST_CASE("loose budget does not change the optimum") {
    for (std::uint64_t seed : {101u, 102u, 103u}) {
        std::mt19937_64 eng(seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Matrix A(4, 7);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 7; ++j) A(i, j) = unif(eng);
        Vector x(7);
        for (Index j = 0; j < 7; ++j) x(j) = unif(eng);
        auto lp = make_lp(Vector::Ones(7), A, A * x);
        auto plain = solve(lp);
        auto budgeted = solve_with_budget(lp, 2.0 * x.sum());
        REQUIRE(plain.status == SolveStatus::Optimal);
        REQUIRE(budgeted.status == SolveStatus::Optimal);
        CHECK(budgeted.objective == Catch::Approx(plain.objective).margin(1e-8));
    }
}

TEST_CASE("brute force oracle on tiny instances") {
    Matrix A(1, 2);
    A << 1.0, 1.0;
    auto lp = make_lp(Vector::Ones(2), A, (Vector(1) << 1.0).finished());
    auto res = brute_force_optimum(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == Catch::Approx(1.0));

    Matrix Ai(1, 1);
    Ai << 1.0;
    auto infeas = make_lp(Vector::Ones(1), Ai, (Vector(1) << -2.0).finished());
    CHECK(brute_force_optimum(infeas).status == SolveStatus::Infeasible);

    CHECK_THROWS_AS(brute_force_optimum(random_instance(6, 13, 7)), TooLarge);
}

TEST_CASE("solve agrees with brute force on random 4x8 instances") {
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto lp = random_instance(4, 8, 1000 + seed, /*signed_entries=*/true);
        auto fast = solve(lp);
        auto oracle = brute_force_optimum(lp);
        INFO("seed " << seed);
        REQUIRE(fast.status == oracle.status);
        if (fast.status == SolveStatus::Optimal) {
            ++optimal;
            CHECK(fast.objective == Catch::Approx(oracle.objective).margin(1e-8));
            check_optimal_invariants(lp, fast);
        } else if (fast.status == SolveStatus::Infeasible) {
            ++infeasible;
        } else {
            ++unbounded;
        }
    }
    // the signed ensemble must exercise more than one status
    CHECK(optimal > 0);
    CHECK(infeasible + unbounded > 0);
}

TEST_CASE("optimal invariants on nonnegative feasible ensembles") {
    for (std::uint64_t seed : {201u, 202u, 203u, 204u, 205u}) {
        auto lp = random_feasible(6, 10, seed);
        auto res = solve(lp);
        check_optimal_invariants(lp, res);
        REQUIRE(res.basis.size() == 6);
        Matrix B(6, 6);
        for (Index i = 0; i < 6; ++i) B.col(i) = lp.A.col(res.basis[static_cast<std::size_t>(i)]);
        CHECK(Eigen::FullPivLU<Matrix>(B).rank() == 6);
    }
}

TEST_CASE("solver is deterministic") {
    auto lp = random_feasible(8, 12, 303);
    auto a = solve(lp);
    auto b = solve(lp);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.basis == b.basis);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("redundant equality rows are dropped") {
    // duplicate a row: rank 2 system with 3 rows
    Matrix A(3, 4);
    A << 1.0, 2.0, 0.5, 1.0,
         0.0, 1.0, 1.0, 2.0,
         2.0, 4.0, 1.0, 2.0;  // 2x first row
    Vector x0(4);
    x0 << 1.0, 0.5, 0.25, 0.75;
    auto lp = make_lp(Vector::Ones(4), A, A * x0);
    auto res = solve(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.dropped_rows.size() == 1);
    CHECK((lp.A * res.x - lp.b).lpNorm<Eigen::Infinity>() < 1e-8);
    // dual entry for the dropped row is zero and the rest stay dual feasible
    CHECK(((lp.A.transpose() * res.y - lp.c).array() <= 1e-8).all());
    CHECK(std::abs(lp.c.dot(res.x) - lp.b.dot(res.y)) <= 1e-7);
}

TEST_CASE("farkas certificates verify on random infeasible instances") {
    for (std::uint64_t seed : {401u, 402u, 403u}) {
        std::mt19937_64 eng(seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Matrix A(5, 9);
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 9; ++j) A(i, j) = unif(eng);
        Vector y(5);
        for (Index i = 0; i < 5; ++i) y(i) = 0.1 + 0.9 * unif(eng);
        auto lp = make_lp(Vector::Ones(9), A, -y);
        auto res = solve(lp);
        REQUIRE(res.status == SolveStatus::Infeasible);
        CHECK(((res.farkas.transpose() * lp.A).array() >= -1e-9).all());
        CHECK(res.farkas.dot(lp.b) < -1e-9);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sitnikov/optim.hpp"

using namespace sitnikov;

TEST_CASE("lbfgs: quadratic bowl") {
    Objective f = [](std::span<const double> x, std::span<double> g) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = static_cast<double>(i + 1);
            v += 0.5 * w * x[i] * x[i];
            g[i] = w * x[i];
        }
        return v;
    };
    auto res = lbfgs_minimize(f, std::vector<double>(12, 3.0), LbfgsOptions{});
    CHECK(res.status == OptimStatus::converged);
    CHECK(res.grad_sup <= 1e-10);
    for (double v : res.x) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("lbfgs: rosenbrock in 2 and 10 dimensions") {
    auto rosen = [](std::span<const double> x, std::span<double> g) {
        double v = 0.0;
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            const double b = 1.0 - x[i];
            v += 100.0 * a * a + b * b;
            g[i] += -400.0 * a * x[i] - 2.0 * b;
            g[i + 1] += 200.0 * a;
        }
        return v;
    };
    for (std::size_t n : {2u, 10u}) {
        std::vector<double> x0(n, -1.2);
        for (std::size_t i = 1; i < n; i += 2) x0[i] = 1.0;
        LbfgsOptions opts;
        opts.max_iterations = 20000;
        auto res = lbfgs_minimize(rosen, x0, opts);
        CHECK(res.grad_sup <= 1e-8);
        for (double v : res.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("lbfgs: infinite values are stepped around") {
    // A barrier at x = 0 from the right: f = x - log(x) on x > 0.
    Objective f = [](std::span<const double> x, std::span<double> g) {
        if (x[0] <= 0.0) {
            g[0] = 0.0;
            return std::numeric_limits<double>::infinity();
        }
        g[0] = 1.0 - 1.0 / x[0];
        return x[0] - std::log(x[0]);
    };
    auto res = lbfgs_minimize(f, {5.0}, LbfgsOptions{});
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lbfgs: abort through the iterate callback") {
    Objective f = [](std::span<const double> x, std::span<double> g) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        g[0] = -400.0 * a * x[0] - 2.0 * b;
        g[1] = 200.0 * a;
        return 100.0 * a * a + b * b;
    };
    LbfgsOptions opts;
    int seen = 0;
    opts.on_iterate = [&](std::span<const double>, double, double) { return ++seen < 3; };
    auto res = lbfgs_minimize(f, {-1.2, 1.0}, opts);
    CHECK(res.status == OptimStatus::aborted);
    CHECK(seen == 3);
}

TEST_CASE("tridiagonal solve against a dense reference") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial);
        std::vector<double> diag(n), off(n - 1), rhs(n);
        for (auto& v : rhs) v = uni(rng);
        for (auto& v : off) v = uni(rng);
        for (std::size_t i = 0; i < n; ++i) diag[i] = 4.0 + uni(rng);
        auto got = solve_tridiag(diag, off, rhs);
        REQUIRE(got.has_value());
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) dense[i][i] = diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) dense[i][i + 1] = dense[i + 1][i] = off[i];
        const auto ref = testutil::dense_solve(dense, rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK((*got)[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    }
}

TEST_CASE("cyclic tridiagonal solve against a dense reference") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + static_cast<std::size_t>(trial);
        std::vector<double> diag(n), off(n - 1), rhs(n);
        const double corner = uni(rng);
        for (auto& v : rhs) v = uni(rng);
        for (auto& v : off) v = uni(rng);
        for (std::size_t i = 0; i < n; ++i) diag[i] = 4.0 + uni(rng);
        auto got = solve_cyclic_tridiag(diag, off, corner, rhs);
        REQUIRE(got.has_value());
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) dense[i][i] = diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) dense[i][i + 1] = dense[i + 1][i] = off[i];
        dense[0][n - 1] = dense[n - 1][0] = corner;
        const auto ref = testutil::dense_solve(dense, rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK((*got)[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
}

TEST_CASE("newton refinement drives the action gradient to the floor") {
    KeplerDrive drive;
    Grid g{16, 0, 2};
    const ActionEvaluator eval(drive, g);
    Trajectory traj{g, BoundaryKind::fixed_ends, std::vector<double>(g.node_count())};
    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        const double t = g.time_at(i);
        traj.values[i] = 1.0 + 0.3 * std::sin(std::numbers::pi * t) + 0.05 * std::cos(5.0 * t);
    }
    LbfgsOptions lopts;
    lopts.grad_sup_tol = 1e-8;
    Trajectory scratch = traj;
    Objective obj = [&](std::span<const double> x, std::span<double> grad) {
        std::copy(x.begin(), x.end(), scratch.values.begin() + 1);
        std::vector<double> full(scratch.values.size());
        eval.gradient(scratch, full);
        std::copy(full.begin() + 1, full.end() - 1, grad.begin());
        return eval.value(scratch);
    };
    auto res = lbfgs_minimize(obj, std::vector<double>(traj.values.begin() + 1, traj.values.end() - 1),
                              lopts);
    std::copy(res.x.begin(), res.x.end(), traj.values.begin() + 1);
    const double refined = newton_refine(eval, traj);
    CHECK(refined <= 1e-11);
}

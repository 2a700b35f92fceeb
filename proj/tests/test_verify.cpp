#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sitnikov/periodic.hpp"
#include "sitnikov/verify.hpp"

using namespace sitnikov;

namespace {

PeriodicOrbit solved_orbit(const KeplerDrive& drive, int nodes) {
    const auto b = PeriodicSymbols::parse("+++---++");
    PeriodicSolveOptions opts;
    opts.refine_levels = 0;
    return minimize_periodic(drive, b, Grid{nodes, 0, 8}, opts);
}

}  // namespace

TEST_CASE("zero crossings: counts, same-sign intervals, node-hit flag") {
    Grid g{8, 0, 3};
    auto symbols = [](long n) { return (n == 1 || n == 2) ? -1 : 1; };  // + - - +
    Trajectory traj{g, BoundaryKind::free_ends, std::vector<double>(g.node_count())};
    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        const double t = g.time_at(i);
        traj.values[i] = std::cos(std::numbers::pi * (t - 0.5) * (t < 1.5 ? 1.0 : -1.0));
    }
    // force exact nodal signs at integers
    traj.values[g.node_at(0)] = 1.0;
    traj.values[g.node_at(1)] = -1.0;
    traj.values[g.node_at(2)] = -1.0;
    traj.values[g.node_at(3)] = 1.0;
    auto check = zero_crossings(traj, symbols);
    CHECK(check.expected == std::vector<int>{1, 0, 1});
    CHECK(check.counts[0] == 1);
    CHECK(check.counts[1] == 0);
    CHECK(check.counts[2] == 1);
    CHECK(check.matches);
    CHECK_FALSE(check.node_hit_flagged);

    SUBCASE("a zero landing exactly on a node is flagged but counted once") {
        traj.values[4] = 0.0;  // mid-interval node inside (0,1)
        auto flagged = zero_crossings(traj, symbols);
        CHECK(flagged.node_hit_flagged);
        CHECK(flagged.counts[0] == 1);
    }
}

TEST_CASE("ordering comparison verdicts") {
    Grid g{8, 0, 1};
    Trajectory a{g, BoundaryKind::free_ends, std::vector<double>(g.node_count(), 1.0)};
    Trajectory b = a;
    CHECK(ordering_compare(a, b, 1e-9) == OrderingVerdict::identical);
    for (auto& v : b.values) v += 0.5;
    CHECK(ordering_compare(a, b, 1e-9) == OrderingVerdict::strictly_ordered);
    b.values[3] = 0.2;
    b.values[5] = 1.7;
    CHECK(ordering_compare(a, b, 1e-9) == OrderingVerdict::violated);
}

TEST_CASE("verification of a converged orbit passes; mutations fail") {
    KeplerDrive drive;
    auto orbit = solved_orbit(drive, 32);
    REQUIRE(orbit.converged);
    VerifyOptions vopts;
    vopts.lower_bound_samples = 200;
    const auto report = verify_periodic(drive, orbit, Tolerances{}, vopts);
    CHECK(report.all_pass());
    CHECK(report.ordering == OrderingVerdict::single_sample);

    SUBCASE("flipping one non-integer node breaks the crossing structure") {
        auto broken = orbit;
        const std::size_t i = broken.traj.grid.node_at(0) + 16;  // mid of (0,1)
        broken.traj.values[i] = -broken.traj.values[i];
        const auto bad = verify_periodic(drive, broken, Tolerances{}, vopts);
        CHECK_FALSE(bad.all_pass());
        CHECK_FALSE(bad.crossings.matches);
    }

    SUBCASE("flipping an integer node breaks admissibility") {
        auto broken = orbit;
        const std::size_t i = broken.traj.grid.node_at(4);
        broken.traj.values[i] = -broken.traj.values[i];
        const auto bad = verify_periodic(drive, broken, Tolerances{}, vopts);
        CHECK_FALSE(bad.all_pass());
    }
}

TEST_CASE("el residual: tiny on minimizers, large on random curves") {
    KeplerDrive drive;
    const auto orbit = solved_orbit(drive, 32);
    const ActionEvaluator eval(drive, orbit.traj.grid);
    CHECK(el_residual_sup(eval, orbit.traj) <= 1e-3);

    Trajectory random = orbit.traj;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-0.2, 0.2);
    for (auto& v : random.values) v += uni(rng);
    random.values.back() = random.values.front();
    CHECK(el_residual_sup(eval, random) > 1e2);
}

TEST_CASE("ode residual quarters under grid doubling (order >= 1 trend)") {
    KeplerDrive drive;
    const auto coarse = solved_orbit(drive, 32);
    const auto fine = solved_orbit(drive, 64);
    const double r_coarse = ode_residual_sup(ActionEvaluator(drive, coarse.traj.grid), coarse.traj);
    const double r_fine = ode_residual_sup(ActionEvaluator(drive, fine.traj.grid), fine.traj);
    const double order = std::log2(r_coarse / r_fine);
    CHECK(order >= 1.0);
    CHECK(order <= 3.0);
}

TEST_CASE("far-field regime: sampled analytic solution has second-order residual") {
    // At heights well above the drive, the equation of motion reduces to the
    // sign model y'' = -sign(y)/y^2, whose solutions are rectilinear Kepler
    // arcs. Sample one exactly and measure the centered-difference residual
    // against the model force: it must shrink at second order.
    const double ay = 3.0;                      // arc semi-amplitude, apex 6
    const double scale = std::sqrt(ay * ay * ay);
    auto y_exact = [&](double t) {
        const double mean = (t + 6.0) / scale;  // mid-swing window, away from the arc's collisions
        const double e = testutil::bisect([&](double ee) { return ee - std::sin(ee) - mean; }, 0.0,
                                          2.0 * std::numbers::pi, 1e-15);
        return ay * (1.0 - std::cos(e));
    };
    auto residual_at = [&](int m) {
        const double h = 1.0 / m;
        double sup = 0.0;
        for (int i = 1; i < 2 * m; ++i) {
            const double t = i * h;
            const double y = y_exact(t);
            const double second = (y_exact(t + h) - 2.0 * y + y_exact(t - h)) / (h * h);
            sup = std::max(sup, std::abs(second + 1.0 / (y * y)));
        }
        return sup;
    };
    const double r32 = residual_at(32);
    const double r64 = residual_at(64);
    CHECK(r32 / r64 == doctest::Approx(4.0).epsilon(0.2));

    // The full force differs from the sign model only through x^2/y^2.
    KeplerDrive drive;
    Grid g{32, 0, 2};
    Trajectory traj{g, BoundaryKind::free_ends, std::vector<double>(g.node_count())};
    for (std::size_t i = 0; i < traj.values.size(); ++i) traj.values[i] = y_exact(g.time_at(i));
    const double full = el_residual_sup(ActionEvaluator(drive, g), traj);
    // |1/y^2 - y/(x^2+y^2)^{3/2}| <= 1.5 x^2 / y^4, y increasing on the window
    const double x_max = 2.0 * drive.amplitude();
    const double gap = 1.5 * x_max * x_max / std::pow(y_exact(0.0), 4.0);
    CHECK(full <= r32 + gap);
}

TEST_CASE("symmetry defect: converged orbit symmetric, shifted orbit not") {
    KeplerDrive drive;
    auto orbit = solved_orbit(drive, 32);
    const auto defect = symmetry_defect(orbit);
    REQUIRE(defect.has_value());
    CHECK(*defect <= 1e-8);

    auto shifted = orbit;
    std::rotate(shifted.traj.values.begin(), shifted.traj.values.begin() + 16, shifted.traj.values.end());
    const auto broken = symmetry_defect(shifted);
    REQUIRE(broken.has_value());
    CHECK(*broken > 0.1);

    PeriodicSolveOptions opts;
    opts.refine_levels = 0;
    const auto asym = minimize_periodic(drive, PeriodicSymbols::parse("+++---"), Grid{32, 0, 6}, opts);
    CHECK_FALSE(symmetry_defect(asym).has_value());
}

TEST_CASE("lower bound sampling: zero violations, and a sharp negative control") {
    KeplerDrive drive;
    auto orbit = solved_orbit(drive, 32);
    CHECK(lower_bound_violations(drive, orbit, 400, 99, 1e-6) == 0);
    auto inflated = orbit;
    inflated.rho_hat += 0.5;  // pretend the minimum were higher: samples must undercut it
    CHECK(lower_bound_violations(drive, inflated, 400, 99, 1e-6) > 0);
}

TEST_CASE("two-point minimality: interior re-minimization returns to the orbit") {
    KeplerDrive drive;
    const auto orbit = solved_orbit(drive, 32);
    const std::size_t i0 = orbit.traj.grid.node_at(1) + 16;  // mid-interval anchors
    const std::size_t i1 = orbit.traj.grid.node_at(6) + 16;
    CHECK(two_point_recheck(drive, orbit, i0, i1, 7) <= 1e-6);
}

TEST_CASE("scaling: rho(kb) = k rho(b) and N-periodicity of the kb orbit") {
    KeplerDrive drive;
    const auto b = PeriodicSymbols::parse("+++---++");
    PeriodicSolveOptions opts;
    opts.refine_levels = 0;
    MultistartOptions multi;
    multi.seed_amplitudes = {0.5, 1.0};
    RhoCache cache;
    const auto k1 = scaling_check(drive, b, 1, Grid{32, 0, 8}, opts, multi, &cache);
    CHECK(k1.defect == 0.0);
    CHECK(k1.pass);
    const auto k2 = scaling_check(drive, b, 2, Grid{32, 0, 8}, opts, multi, &cache);
    CHECK(k2.defect <= 2e-8);
    CHECK(k2.periodicity_defect <= 1e-6);
    CHECK(k2.pass);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "helpers.hpp"
#include "sitnikov/action.hpp"
#include "sitnikov/kepler.hpp"

using namespace sitnikov;

namespace {
constexpr double kPi = std::numbers::pi;
const double kAmp = std::cbrt(1.0 / (32.0 * kPi * kPi));  // period equation, mu = 1/8
}  // namespace

TEST_CASE("construction satisfies the period equation") {
    KeplerDrive drive;
    CHECK(std::abs(2.0 * kPi * std::sqrt(8.0 * std::pow(drive.amplitude(), 3)) - 1.0) <= 1e-14);
    CHECK(drive.amplitude() == doctest::Approx(kAmp).epsilon(1e-14));
    CHECK(drive.mu() == 0.125);
}

TEST_CASE("radial Kepler equation: anchors and bisection oracle") {
    KeplerDrive drive;
    CHECK(drive.solve_radial_kepler(0.0) == 0.0);
    CHECK(drive.solve_radial_kepler(0.5) == doctest::Approx(kPi).epsilon(1e-14));

    // tau = 0.25: oracle root of E - sin E - pi/2 on [0, 2*pi]
    const double oracle =
        testutil::bisect([](double e) { return e - std::sin(e) - kPi / 2.0; }, 0.0, 2.0 * kPi, 1e-15);
    CHECK(oracle == doctest::Approx(2.3098814600100575).epsilon(1e-9));
    CHECK(drive.solve_radial_kepler(0.25) == doctest::Approx(oracle).epsilon(1e-12));

    SUBCASE("residual and monotonicity on a tau sweep") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<double> taus(500);
        for (auto& t : taus) t = uni(rng);
        taus.push_back(1e-9);
        taus.push_back(0.999999);
        taus.push_back(0.049);
        taus.push_back(0.051);
        std::sort(taus.begin(), taus.end());
        double prev = -1.0;
        for (double tau : taus) {
            const double e = drive.solve_radial_kepler(tau);
            CHECK(std::abs(e - std::sin(e) - 2.0 * kPi * tau) <= 1e-13);
            CHECK(e >= prev);
            prev = e;
        }
    }

    CHECK_THROWS_AS(drive.solve_radial_kepler(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(drive.solve_radial_kepler(1.0), std::invalid_argument);
}

TEST_CASE("x(t): collisions, apex, symmetry, periodicity") {
    KeplerDrive drive;
    CHECK(drive.x_of_t(3.0) == 0.0);
    CHECK(drive.x_of_t(0.0) == 0.0);
    CHECK(drive.x_of_t(-17.0) == 0.0);
    CHECK(drive.x_of_t(0.5) == doctest::Approx(2.0 * kAmp).epsilon(1e-14));
    CHECK(drive.x_of_t(0.5) == doctest::Approx(0.2936838654966136).epsilon(1e-12));
    CHECK(std::abs(drive.x_of_t(0.3) - drive.x_of_t(0.7)) <= 1e-13);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-50.0, 50.0);
    for (int k = 0; k < 1000; ++k) {
        const double t = uni(rng);
        CHECK(std::abs(drive.x_of_t(t) - drive.x_of_t(t + 1.0)) <= 1e-12);
        CHECK(std::abs(drive.x_of_t(t) - drive.x_of_t(-t)) <= 1e-12);
        CHECK(drive.x_of_t(t) >= 0.0);
    }
}

TEST_CASE("xdot: apex zero, antisymmetry, energy first integral") {
    KeplerDrive drive;
    CHECK(std::abs(drive.xdot_of_t(0.5)) <= 1e-12);
    const double v25 = drive.xdot_of_t(0.25);
    const double v75 = drive.xdot_of_t(0.75);
    CHECK(v25 > 0.0);
    CHECK(std::abs(v25 + v75) <= 1e-12);
    CHECK_THROWS_AS(drive.xdot_of_t(2.0), CollisionTimeQuery);

    const double e_ref = -0.125 / (2.0 * kAmp);
    CHECK(e_ref == doctest::Approx(-0.42562774018459426).epsilon(1e-12));
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(0.01, 0.99);
    for (int k = 0; k < 200; ++k) {
        const double t = uni(rng);
        const double x = drive.x_of_t(t);
        const double v = drive.xdot_of_t(t);
        const double energy = 0.5 * v * v - 0.125 / x;
        CHECK(std::abs(energy - e_ref) <= 1e-10 * std::abs(e_ref));
    }
    const double x37 = drive.x_of_t(0.37);
    const double v37 = drive.xdot_of_t(0.37);
    CHECK(0.5 * v37 * v37 - 0.125 / x37 == doctest::Approx(e_ref).epsilon(1e-10));
}

TEST_CASE("ODE residual by central differences away from collisions") {
    KeplerDrive drive;
    const double h = 1e-5;
    for (int k = 0; k <= 200; ++k) {
        const double t = 1e-3 + (1.0 - 2e-3) * k / 200.0;
        const double x = drive.x_of_t(t);
        const double second = (drive.x_of_t(t + h) - 2.0 * x + drive.x_of_t(t - h)) / (h * h);
        const double rhs = -1.0 / (8.0 * x * x);
        CHECK(std::abs(second - rhs) <= 1e-4 * std::abs(rhs));
    }
}

TEST_CASE("collision exponent x(eps)/eps^(2/3) -> (9 mu / 2)^(1/3)") {
    KeplerDrive drive;
    const double target = std::cbrt(9.0 * 0.125 / 2.0);
    CHECK(target == doctest::Approx(0.8254818122236567).epsilon(1e-12));
    const double r4 = drive.x_of_t(1e-4) / std::pow(1e-4, 2.0 / 3.0);
    const double r6 = drive.x_of_t(1e-6) / std::pow(1e-6, 2.0 / 3.0);
    CHECK(std::abs(r6 - target) < std::abs(r4 - target) / 5.0);
    CHECK(std::abs(r6 - target) <= 2e-4 * target);
}

TEST_CASE("integration oracle: drive reproduced by stepping the equation of motion") {
    // From the apex (x = 2a, xdot = 0 at t = 1/2) integrate x'' = -1/(8 x^2)
    // forward; close the collision gap with the energy-integral time
    //   tau(X) = int_0^X sqrt(8 a x / (2a - x)) dx   (x = w^2 removes the root).
    KeplerDrive drive;
    const double a = drive.amplitude();
    auto accel = [](double, double x) { return -1.0 / (8.0 * x * x); };
    testutil::State2 s{2.0 * a, 0.0};
    double t = 0.5;
    const double h = 1e-5;
    double max_dev = 0.0;
    while (s.y > 1e-3) {
        s = testutil::rk4_step(accel, t, s, h);
        t += h;
        if (s.y > 0.01) max_dev = std::max(max_dev, std::abs(s.y - drive.x_of_t(t)));
    }
    CHECK(max_dev <= 1e-7);

    const double cut = s.y;
    const double tail = testutil::simpson(
        [&](double w) { return 2.0 * std::sqrt(8.0 * a) * w * w / std::sqrt(2.0 * a - w * w); }, 0.0,
        std::sqrt(cut), 2000);
    CHECK(std::abs(t + tail - 1.0) <= 1e-6);  // collision lands at t = 1, so the apex sits at 2a
}

TEST_CASE("lagrangian values and the total-collision guard") {
    KeplerDrive drive;
    CHECK(lagrangian(drive, 0.5, 0.0, 0.0) == doctest::Approx(1.0 / (2.0 * kAmp)).epsilon(1e-12));
    CHECK(lagrangian(drive, 0.0, 2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(lagrangian(drive, 0.42, 1e8, 3.0) - 4.5) <= 1.1e-8);
    CHECK_THROWS_AS(lagrangian(drive, 1.0, 0.0, 1.0), std::domain_error);
}

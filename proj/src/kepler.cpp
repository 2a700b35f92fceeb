#include "sitnikov/kepler.hpp"

#include <cmath>
#include <numbers>

namespace sitnikov {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

KeplerDrive::KeplerDrive() : KeplerDrive(Options{}) {}

KeplerDrive::KeplerDrive(Options opts) : opts_(opts) {
    amplitude_ = std::cbrt(kMu / (4.0 * std::numbers::pi * std::numbers::pi));
    const double period = kTwoPi * std::sqrt(amplitude_ * amplitude_ * amplitude_ / kMu);
    if (std::abs(period - 1.0) > 1e-14)
        throw std::logic_error("KeplerDrive: period equation violated at construction");
    if (opts_.newton_tol <= 0 || opts_.newton_max_iter < 1)
        throw std::invalid_argument("KeplerDrive: bad Newton options");
}

double KeplerDrive::solve_radial_kepler(double tau) const {
    if (!(tau >= 0.0 && tau < 1.0))
        throw std::invalid_argument("solve_radial_kepler: tau must be in [0,1)");
    if (tau == 0.0) return 0.0;

    const double target = kTwoPi * tau;
    // Newton's derivative 1 - cos E vanishes at the collision; cube-root
    // asymptotics E - sin E ~ E^3/6 gives a safe seed there.
    double e = tau < 0.05 ? std::cbrt(12.0 * std::numbers::pi * tau) : target;
    bool ok = false;
    for (int it = 0; it < opts_.newton_max_iter; ++it) {
        const double f = e - std::sin(e) - target;
        if (std::abs(f) <= opts_.newton_tol) {
            ok = true;
            break;
        }
        const double fp = 1.0 - std::cos(e);
        if (fp <= 0.0) break;
        const double next = e - f / fp;
        if (!(next > 0.0 && next < kTwoPi)) break;  // left the bracket; bisect instead
        e = next;
    }
    if (!ok) {
        double lo = 0.0, hi = kTwoPi;
        // f is monotone increasing on [0, 2*pi]
        for (int it = 0; it < 200; ++it) {
            e = 0.5 * (lo + hi);
            const double f = e - std::sin(e) - target;
            if (std::abs(f) <= opts_.newton_tol) {
                ok = true;
                break;
            }
            (f < 0.0 ? lo : hi) = e;
        }
        if (!ok) {
            const double f = e - std::sin(e) - target;
            if (std::abs(f) > 64.0 * opts_.newton_tol)
                throw std::runtime_error("solve_radial_kepler: no convergence");
        }
    }
    return e;
}

double KeplerDrive::x_of_t(double t) const {
    const double frac = t - std::floor(t);
    if (frac == 0.0) return 0.0;
    const double e = solve_radial_kepler(frac);
    return amplitude_ * (1.0 - std::cos(e));
}

double KeplerDrive::xdot_of_t(double t) const {
    const double frac = t - std::floor(t);
    if (frac == 0.0)
        throw CollisionTimeQuery("xdot_of_t: velocity undefined at collision time");
    const double e = solve_radial_kepler(frac);
    return std::sqrt(kMu / amplitude_) * std::sin(e) / (1.0 - std::cos(e));
}

}  // namespace sitnikov

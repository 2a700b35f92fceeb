#pragma once

#include <stdexcept>

namespace sitnikov {

/// Thrown when a velocity is requested at a binary-collision time (integer t).
class CollisionTimeQuery : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Period-1 rectilinear Kepler solution of  x'' = -mu/x^2  with mu = 1/8,
/// continued through the binary collisions at integer times (elastic bounce).
///
/// Parametrized by eccentric anomaly:  x = a (1 - cos E),  2*pi*t = E - sin E,
/// with the semi-amplitude a fixed by the period equation 2*pi*sqrt(a^3/mu) = 1.
/// x(t) is even, 1-periodic, zero exactly at integer t and positive elsewhere.
class KeplerDrive {
public:
    struct Options {
        double newton_tol = 1e-14;  // residual tolerance for E - sin E = 2*pi*tau
        int newton_max_iter = 50;
    };

    KeplerDrive();
    explicit KeplerDrive(Options opts);

    static constexpr double kMu = 0.125;

    double mu() const { return kMu; }
    double amplitude() const { return amplitude_; }  // a; apex height is 2a
    double newton_tol() const { return opts_.newton_tol; }

    /// Solve E - sin E = 2*pi*tau for E in [0, 2*pi), tau in [0, 1).
    /// Monotone in tau; residual bounded by newton_tol.
    double solve_radial_kepler(double tau) const;

    /// Height at time t (any real). Exactly 0 at integer t.
    double x_of_t(double t) const;

    /// Velocity at non-integer t; throws CollisionTimeQuery at integer t.
    double xdot_of_t(double t) const;

private:
    double amplitude_;
    Options opts_;
};

}  // namespace sitnikov

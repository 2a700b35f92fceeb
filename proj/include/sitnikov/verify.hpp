#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sitnikov/connection.hpp"
#include "sitnikov/periodic.hpp"

namespace sitnikov {

/// Single source of truth for every check tolerance.
struct Tolerances {
    double rho_tol = 1e-8;
    double sym_tol = 1e-6;
    double grad_tol = 1e-10;
    double el_residual_bound = 1e-3;
    double tail_tol = 1e-6;
    double tail_monotone_slack = 1e-7;
    double j_tol = 1e-8;
    double lower_bound_tol = 1e-6;
    double comparison_tol = 1e-8;
    double period_tol = 1e-6;
    double ordering_tol = 1e-7;
};

/// max_j |y(j h) - y(N - j h)| for a periodic orbit; nullopt when b is not
/// symmetric (check not applicable).
std::optional<double> symmetry_defect(const PeriodicOrbit& orbit);

struct ScalingCheck {
    double rho_b = 0.0;
    double rho_kb = 0.0;
    double defect = 0.0;          // |rho(kb) - k rho(b)|
    double periodicity_defect = 0.0;  // max |y(t+N) - y(t)| of the kb minimizer
    bool pass = false;
};

/// rho(kb) vs k rho(b) on matched grids, plus N-periodicity of the kb orbit.
ScalingCheck scaling_check(const KeplerDrive& drive, const PeriodicSymbols& b, int k, Grid grid,
                           const PeriodicSolveOptions& opts = {}, const MultistartOptions& multi = {},
                           RhoCache* cache = nullptr, const Tolerances& tol = {});

enum class OrderingVerdict { identical, strictly_ordered, violated, single_sample };

/// Discrete counterpart of the total ordering of the minimizer set: nodal
/// difference either below tol everywhere or of one strict sign everywhere.
OrderingVerdict ordering_compare(const Trajectory& a, const Trajectory& b, double tol);

/// Verdict across all converged pairs of a multistart run.
OrderingVerdict ordering_verdict(const std::vector<PeriodicOrbit>& orbits, double rho_tol, double tol);

/// Random admissible trajectories over [0, N] (free ends) whose action falls
/// below rho_hat - tol; returns the violation count. Half the samples are
/// independent smooth random curves, half are small admissible perturbations
/// of the orbit itself (the sharp side of the bound).
int lower_bound_violations(const KeplerDrive& drive, const PeriodicOrbit& orbit, int samples,
                           std::uint64_t rng_seed, double tol);

/// Freeze the orbit at nodes i0 and i1, re-minimize the strict interior from a
/// perturbed start, and return the sup distance to the original values there.
double two_point_recheck(const KeplerDrive& drive, const PeriodicOrbit& orbit, std::size_t i0,
                         std::size_t i1, std::uint64_t rng_seed);

struct TailComparison {
    // Signs at K± fix the extremal choice and the side on which the connecting
    // orbit must stay: above the maximal minimizer, below the minimal one.
    bool right_above = false;  // expected y* > gamma+ beyond K+ (else y* < gamma+)
    bool left_above = false;
    double right_margin = 0.0;  // worst signed separation, positive = strict
    double left_margin = 0.0;
    bool right_ok = false;
    bool left_ok = false;
};

TailComparison tail_comparison(const ConnectionProblem& problem, const ConnectingOrbit& orbit,
                               double tol);

struct VerificationReport {
    struct Check {
        std::string name;
        bool applicable = true;
        bool pass = false;
        double value = 0.0;
        std::string detail;
    };
    std::string kind;  // "periodic" or "connection"
    std::vector<Check> checks;
    CrossingCheck crossings;
    OrderingVerdict ordering = OrderingVerdict::single_sample;
    std::vector<double> tail_decay_left, tail_decay_right;

    bool all_pass() const;
    std::string summary() const;  // one line per check
};

struct VerifyOptions {
    int lower_bound_samples = 1000;
    std::uint64_t rng_seed = 20259;
    int scaling_k = 0;  // > 1 runs the rho(kb) = k rho(b) check (extra solves)
};

VerificationReport verify_periodic(const KeplerDrive& drive, const PeriodicOrbit& orbit,
                                   const Tolerances& tol = {}, const VerifyOptions& opts = {});

VerificationReport verify_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                                     const ConnectingOrbit& orbit, const Tolerances& tol = {});

const char* to_string(OrderingVerdict v);

}  // namespace sitnikov

#pragma once

#include <vector>

#include "sitnikov/periodic.hpp"

namespace sitnikov {

struct ConnectionOptions {
    int nodes_per_unit = 64;
    double tail_tol = 1e-6;  // per-interval L2 distance on the outermost two periods
    double j_tol = 1e-8;     // j change between window extensions
    int max_windows = 20;    // extension budget
    int initial_periods = 2; // initial window = [K- - 2 N-, K+ + 2 N+]
    double grad_tol = 1e-10;
    int max_iterations = 20000;
    double middle_amplitude_floor = 0.2;
    PeriodicSolveOptions periodic;   // for the gamma solves (kept at window density)
    MultistartOptions multistart;
};

/// A connection target: assembled symbols, the two periodic orbits at the
/// window's node density, their action values, and the extremal orientation
/// dictated by the signs at K± (maximal when a_K = +1 and b_K = -1).
struct ConnectionProblem {
    AssembledSymbols symbols;
    PeriodicOrbit gamma_minus;
    PeriodicOrbit gamma_plus;
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    Extremal orient_minus = Extremal::maximal;
    Extremal orient_plus = Extremal::maximal;
    int nodes_per_unit = 64;

    long k_minus() const { return symbols.spec().k_minus; }
    long k_plus() const { return symbols.spec().k_plus; }
};

/// Solve the periodic ends for the spec and assemble the problem.
ConnectionProblem build_connection_problem(const KeplerDrive& drive, const ConnectionSpec& spec,
                                           const ConnectionOptions& opts = {});

/// Value of the periodic orbit's extension at an absolute node index
/// (node count measured from time 0 in steps of 1/M).
double gamma_value(const PeriodicOrbit& gamma, long absolute_node);

/// Per-unit-interval defect a_p(u) = A_{p,p+1}(u) - rho/N of the tail side
/// selected by the sign of p (b+ for p >= 0, b- for p < 0).
double defect(const ActionEvaluator& eval, const Trajectory& u, long p, const ConnectionProblem& problem);

/// Sum of defects over every unit interval spanned by u.
double j_windowed(const ActionEvaluator& eval, const Trajectory& u, const ConnectionProblem& problem);

/// Lower bound on j_windowed over admissible trajectories: aligned whole-period
/// tail blocks contribute >= 0, the finite stub of intervals between the tail
/// tilings is bounded by its normalization constants.
double j_lower_bound(const ConnectionProblem& problem);

/// Glued seed on [t_minus, t_plus]: gamma samples outside [K- - 1, K+ + 1],
/// sign-respecting cubic blend across the defect region.
Trajectory seed_connection(const ConnectionProblem& problem, long t_minus, long t_plus,
                           double amplitude_floor = 0.2);

struct WindowLogEntry {
    long t_minus = 0;
    long t_plus = 0;
    double j_hat = 0.0;
    double outer_tail_max = 0.0;  // worst per-interval residual on the outermost two periods
    double grad_sup = 0.0;
};

struct ConnectingOrbit {
    explicit ConnectingOrbit(ConnectionSpec s) : spec(std::move(s)) {}

    ConnectionSpec spec;
    Trajectory traj;           // fixed ends clamped to gamma-/gamma+ values
    double j_hat = 0.0;
    double j_min_seen = 0.0;   // smallest windowed J over all iterates ever evaluated
    std::vector<double> defects;      // per unit interval, p from t_minus
    std::vector<double> tail_left;    // intervals [i, i+1], i in [t_minus, k_minus - 1]
    std::vector<double> tail_right;   // intervals [i, i+1], i in [k_plus + 1, t_plus - 1]
    double grad_sup = 0.0;
    double el_residual_sup = 0.0;
    long t_minus = 0;
    long t_plus = 0;
    bool converged = false;     // window loop settled and the crossing structure is right
    bool crossings_ok = false;  // one zero per sign-change interval of the assembled sequence
    int windows_used = 0;
    std::vector<WindowLogEntry> log;
};

/// Clamped-window minimization of the action (equivalently of J up to the
/// normalization constant), extending the window by one tail period per side
/// until the outer tail residuals and the j change are within tolerance.
ConnectingOrbit minimize_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                                    const ConnectionOptions& opts = {});

}  // namespace sitnikov

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sitnikov/action.hpp"
#include "sitnikov/optim.hpp"
#include "sitnikov/symbols.hpp"

namespace sitnikov {

struct PeriodicSolveOptions {
    double grad_tol = 1e-10;
    int max_iterations = 5000;
    double rho_tol = 1e-8;      // continuation stop on |rho change| between levels
    int refine_levels = 2;      // grid-doubling continuation budget: M, 2M, 4M
    double seed_amplitude = 0.5;
    std::optional<Trajectory> seed;  // overrides seed_periodic when set

    // Annealed sign-barrier penalty, engaged only after an admissibility
    // violation during iteration: mu * sum softplus(-b_n y_n / eps).
    double penalty_mu0 = 1.0;
    double penalty_eps = 0.05;
    int penalty_rounds = 8;
};

/// Converged minimizer of the discrete action over the N-periodic class of b.
struct PeriodicOrbit {
    PeriodicSymbols symbols;
    Trajectory traj;
    double rho_hat = 0.0;
    double grad_sup = 0.0;
    double el_residual_sup = 0.0;
    bool converged = false;       // gradient within tolerance, admissible, crossings right
    bool crossings_ok = false;    // exactly one zero per sign-change interval, none otherwise
    bool penalty_used = false;
    double seed_amplitude = 0.0;
};

/// Smooth admissible representative of the class: y(n) = b_n * amplitude at
/// integer nodes, constant on same-sign intervals, single monotone crossing
/// inside sign-change intervals.
Trajectory seed_periodic(const PeriodicSymbols& b, Grid grid, double amplitude);

/// Linear interpolation onto the grid with doubled node density.
Trajectory refine_double(const Trajectory& traj);

/// Minimize the discrete action over the periodic class of b on [0, N],
/// with grid-doubling continuation re-minimizing until the rho change is
/// within rho_tol or the refinement budget is spent.
PeriodicOrbit minimize_periodic(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid,
                                const PeriodicSolveOptions& opts = {});

struct MultistartOptions {
    std::vector<double> seed_amplitudes = {0.25, 0.5, 1.0, 1.5, 2.0};
    int jobs = 1;
};

struct MultistartResult {
    std::vector<PeriodicOrbit> orbits;  // one per seed amplitude, input order
    std::size_t best = 0;               // index of the smallest rho_hat
    double rho_hat = 0.0;
};

MultistartResult minimize_periodic_multistart(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid,
                                              const PeriodicSolveOptions& opts = {},
                                              const MultistartOptions& multi = {});

enum class Extremal { maximal, minimal };

/// Among converged multistart orbits with action within rho_tol of the best,
/// the one with the largest (maximal) or smallest (minimal) value at t = 0;
/// near-ties prefer the smallest defect under time reversal.
const PeriodicOrbit& select_extremal(const MultistartResult& result, Extremal which, double rho_tol);

/// Synchronized memo for rho values, keyed by (symbols, grid, options).
class RhoCache {
public:
    std::optional<double> lookup(const std::string& key) const;
    void store(const std::string& key, double value);
    static std::string key_for(const PeriodicSymbols& b, Grid grid, const PeriodicSolveOptions& opts);

private:
    mutable std::mutex mutex_;
    std::map<std::string, double> values_;
};

/// rho(b): multistart minimum of the discrete action over the periodic class.
double rho(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid,
           const PeriodicSolveOptions& opts = {}, const MultistartOptions& multi = {},
           RhoCache* cache = nullptr);

}  // namespace sitnikov

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sitnikov/action.hpp"
#include "sitnikov/trajectory.hpp"

namespace sitnikov {

/// Objective callback: writes the gradient into `grad` and returns the value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 5000;
    double grad_sup_tol = 1e-10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search = 50;
    /// Called after each accepted iterate with (x, f, grad_sup); return false to abort.
    std::function<bool(std::span<const double>, double, double)> on_iterate;
};

enum class OptimStatus { converged, max_iterations, line_search_failed, aborted };

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_sup = 0.0;
    int iterations = 0;
    OptimStatus status = OptimStatus::converged;
};

/// Limited-memory quasi-Newton descent with a strong-Wolfe line search.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& opts);

/// Solve the symmetric tridiagonal system (diag, off) s = rhs by the Thomas
/// algorithm; off[i] couples unknowns i and i+1. Empty result on pivot breakdown.
std::optional<std::vector<double>> solve_tridiag(std::span<const double> diag, std::span<const double> off,
                                                 std::vector<double> rhs);

/// Same with an additional cyclic coupling `corner` between the first and last
/// unknowns (Sherman-Morrison on top of Thomas).
std::optional<std::vector<double>> solve_cyclic_tridiag(std::span<const double> diag,
                                                        std::span<const double> off, double corner,
                                                        std::vector<double> rhs);

struct NewtonRefineOptions {
    int max_iterations = 12;
    double grad_sup_tol = 1e-12;
    /// Optional admissibility guard; a step violating it is backtracked.
    std::function<bool(const Trajectory&)> accept;
};

/// Damped Newton iteration on the exact tridiagonal action Hessian, used to
/// drive the gradient below what the line-searched descent can resolve in
/// double precision. Returns the final gradient sup-norm over free nodes.
double newton_refine(const ActionEvaluator& eval, Trajectory& traj, const NewtonRefineOptions& opts = {});

/// Gradient sup-norm over the trajectory's free nodes (excludes clamped ends).
double grad_sup_norm(const ActionEvaluator& eval, const Trajectory& traj);

}  // namespace sitnikov

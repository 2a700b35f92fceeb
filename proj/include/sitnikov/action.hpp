#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sitnikov/kepler.hpp"
#include "sitnikov/trajectory.hpp"

namespace sitnikov {

/// L(t, y, ydot) = ydot^2/2 + 1/sqrt(x(t)^2 + y^2).
/// Throws std::domain_error at a total collision (y = 0 at integer t).
double lagrangian(const KeplerDrive& drive, double t, double y, double ydot);

/// Evaluates the discrete action, its exact gradient, and its tridiagonal
/// Hessian on a fixed grid. Kinetic term is exact for piecewise-linear y,
/// sum (dy)^2/(2h); potential term is the nodal trapezoid rule. Drive heights
/// x(t_i) are cached once per grid, with exact zeros at integer nodes.
class ActionEvaluator {
public:
    ActionEvaluator(const KeplerDrive& drive, Grid grid);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& drive_heights() const { return x_; }

    /// Total action of the trajectory; +inf when an intermediate value is
    /// non-finite (total collision at an integer node).
    double value(const Trajectory& traj) const;

    /// Exact gradient of value() w.r.t. nodal values. Boundary entries are
    /// zero for fixed_ends; for periodic bc both end entries carry the full
    /// wrapped partial (they alias one node).
    std::vector<double> gradient(const Trajectory& traj) const;
    void gradient(const Trajectory& traj, std::span<double> out) const;

    /// Tridiagonal Hessian of value(): diag[i] = d2A/dy_i^2, off[i] = mixed
    /// partial between nodes i and i+1. Periodic bc wraps through off.back().
    void hessian(const Trajectory& traj, std::span<double> diag, std::span<double> off) const;

    /// Trapezoid action restricted to nodes [i0, i1] (half weights at both
    /// cut ends, so unit-interval pieces sum to the total).
    double segment_value(const Trajectory& traj, std::size_t i0, std::size_t i1) const;

private:
    const KeplerDrive* drive_;
    Grid grid_;
    std::vector<double> x_;
};

/// a_n * y(n) > 0 at every integer node of the trajectory span.
bool admissible(const Trajectory& traj, const std::function<int(long)>& symbol_at);

struct CrossingCheck {
    long first_interval = 0;          // counts[k] belongs to (first_interval + k, first_interval + k + 1)
    std::vector<int> counts;
    std::vector<int> expected;        // 1 where a_n a_{n+1} = -1, else 0
    bool node_hit_flagged = false;    // a zero landed exactly on a non-integer node
    bool matches = false;
};

/// Count nodal sign changes per open unit interval and compare against the
/// symbol sequence. A zero exactly on a node is counted via its neighbors and
/// flagged.
CrossingCheck zero_crossings(const Trajectory& traj, const std::function<int(long)>& symbol_at);

/// Sup over interior nodes of |(y_{i+1} - 2 y_i + y_{i-1})/h^2 + y_i/(x^2+y^2)^{3/2}|.
/// At a stationary point of the discrete action this equals |gradient|/h, so it
/// measures stationarity, not discretization error.
double el_residual_sup(const ActionEvaluator& eval, const Trajectory& traj);

/// Same residual with the second difference taken at stride 2h. Stationarity
/// cancels through the wider stencil, leaving the genuine O(h^2) defect of the
/// discrete orbit against the continuum equation of motion.
double ode_residual_sup(const ActionEvaluator& eval, const Trajectory& traj);

}  // namespace sitnikov

#include "sitnikov/action.hpp"

#include <cmath>
#include <limits>

namespace sitnikov {

double lagrangian(const KeplerDrive& drive, double t, double y, double ydot) {
    const double x = drive.x_of_t(t);
    if (x == 0.0 && y == 0.0)
        throw std::domain_error("lagrangian: total collision (y = 0 at integer t)");
    return 0.5 * ydot * ydot + 1.0 / std::sqrt(x * x + y * y);
}

ActionEvaluator::ActionEvaluator(const KeplerDrive& drive, Grid grid) : drive_(&drive), grid_(grid) {
    grid_.validate();
    const std::size_t n = grid_.node_count();
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        x_[i] = grid_.is_integer_node(i) ? 0.0 : drive.x_of_t(grid_.time_at(i));
}

double ActionEvaluator::value(const Trajectory& traj) const {
    const auto& y = traj.values;
    const std::size_t n = y.size();
    const double h = grid_.step();
    double kinetic = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dy = y[i + 1] - y[i];
        kinetic += dy * dy;
    }
    kinetic /= 2.0 * h;
    double potential = 0.5 / std::sqrt(x_[0] * x_[0] + y[0] * y[0]) +
                       0.5 / std::sqrt(x_[n - 1] * x_[n - 1] + y[n - 1] * y[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) potential += 1.0 / std::sqrt(x_[i] * x_[i] + y[i] * y[i]);
    potential *= h;
    const double total = kinetic + potential;
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

void ActionEvaluator::gradient(const Trajectory& traj, std::span<double> out) const {
    const auto& y = traj.values;
    const std::size_t n = y.size();
    const double h = grid_.step();
    auto dpot = [&](std::size_t i) {
        const double r2 = x_[i] * x_[i] + y[i] * y[i];
        return -y[i] / (r2 * std::sqrt(r2));
    };
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (2.0 * y[i] - y[i - 1] - y[i + 1]) / h + h * dpot(i);
    switch (traj.bc) {
        case BoundaryKind::periodic:
            // y[0] and y[n-1] alias one node; both halves of its trapezoid
            // weight and both incident segments contribute.
            out[0] = (2.0 * y[0] - y[1] - y[n - 2]) / h + h * dpot(0);
            out[n - 1] = out[0];
            break;
        case BoundaryKind::fixed_ends:
            out[0] = 0.0;
            out[n - 1] = 0.0;
            break;
        case BoundaryKind::free_ends:
            out[0] = (y[0] - y[1]) / h + 0.5 * h * dpot(0);
            out[n - 1] = (y[n - 1] - y[n - 2]) / h + 0.5 * h * dpot(n - 1);
            break;
    }
}

std::vector<double> ActionEvaluator::gradient(const Trajectory& traj) const {
    std::vector<double> g(traj.values.size());
    gradient(traj, g);
    return g;
}

void ActionEvaluator::hessian(const Trajectory& traj, std::span<double> diag, std::span<double> off) const {
    const auto& y = traj.values;
    const std::size_t n = y.size();
    const double h = grid_.step();
    auto d2pot = [&](std::size_t i) {
        const double r2 = x_[i] * x_[i] + y[i] * y[i];
        return (2.0 * y[i] * y[i] - x_[i] * x_[i]) / (r2 * r2 * std::sqrt(r2));
    };
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 / h + h * d2pot(i);
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = -1.0 / h;
    if (traj.bc == BoundaryKind::free_ends) {
        diag[0] = 1.0 / h + 0.5 * h * d2pot(0);
        diag[n - 1] = 1.0 / h + 0.5 * h * d2pot(n - 1);
    }
    // For periodic bc the caller treats indices modulo n-1; diag[0] already
    // carries the full weight and off[n-1] is the wrap coupling.
    if (traj.bc == BoundaryKind::periodic && off.size() >= n) off[n - 1] = -1.0 / h;
}

double ActionEvaluator::segment_value(const Trajectory& traj, std::size_t i0, std::size_t i1) const {
    const auto& y = traj.values;
    const double h = grid_.step();
    double kinetic = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        const double dy = y[i + 1] - y[i];
        kinetic += dy * dy;
    }
    kinetic /= 2.0 * h;
    double potential = 0.5 / std::sqrt(x_[i0] * x_[i0] + y[i0] * y[i0]) +
                       0.5 / std::sqrt(x_[i1] * x_[i1] + y[i1] * y[i1]);
    for (std::size_t i = i0 + 1; i < i1; ++i) potential += 1.0 / std::sqrt(x_[i] * x_[i] + y[i] * y[i]);
    potential *= h;
    return kinetic + potential;
}

namespace {

double residual_sup_with_stride(const ActionEvaluator& eval, const Trajectory& traj, std::size_t stride) {
    const auto& y = traj.values;
    const auto& x = eval.drive_heights();
    const std::size_t n = y.size();
    const double hh = stride * eval.grid().step() * stride * eval.grid().step();
    const bool wrap = traj.bc == BoundaryKind::periodic;
    const std::size_t period = n - 1;  // duplicate end node
    double sup = 0.0;
    const std::size_t first = wrap ? 0 : stride;
    const std::size_t last = wrap ? period : n - stride;  // exclusive
    for (std::size_t i = first; i < last; ++i) {
        const double ym = wrap ? y[(i + period - stride) % period] : y[i - stride];
        const double yp = wrap ? y[(i + stride) % period] : y[i + stride];
        const double second = (yp - 2.0 * y[i] + ym) / hh;
        const double r2 = x[i] * x[i] + y[i] * y[i];
        sup = std::max(sup, std::abs(second + y[i] / (r2 * std::sqrt(r2))));
    }
    return sup;
}

}  // namespace

double el_residual_sup(const ActionEvaluator& eval, const Trajectory& traj) {
    return residual_sup_with_stride(eval, traj, 1);
}

double ode_residual_sup(const ActionEvaluator& eval, const Trajectory& traj) {
    return residual_sup_with_stride(eval, traj, 2);
}

bool admissible(const Trajectory& traj, const std::function<int(long)>& symbol_at) {
    const Grid& g = traj.grid;
    for (long n = g.t_start; n <= g.t_end; ++n) {
        const double yn = traj.values[g.node_at(n)];
        if (!(symbol_at(n) * yn > 0.0)) return false;
    }
    return true;
}

CrossingCheck zero_crossings(const Trajectory& traj, const std::function<int(long)>& symbol_at) {
    const Grid& g = traj.grid;
    CrossingCheck out;
    out.first_interval = g.t_start;
    for (long n = g.t_start; n < g.t_end; ++n) {
        const std::size_t i0 = g.node_at(n);
        const std::size_t i1 = i0 + static_cast<std::size_t>(g.nodes_per_unit);
        int count = 0;
        double prev = traj.values[i0];
        for (std::size_t i = i0 + 1; i <= i1; ++i) {
            const double v = traj.values[i];
            if (v == 0.0) {
                if (i != i1) out.node_hit_flagged = true;  // zero exactly on a node: use neighbors
                continue;
            }
            if (prev != 0.0 && std::signbit(v) != std::signbit(prev)) ++count;
            prev = v;
        }
        out.counts.push_back(count);
        out.expected.push_back(symbol_at(n) * symbol_at(n + 1) == -1 ? 1 : 0);
    }
    out.matches = out.counts == out.expected;
    return out;
}

}  // namespace sitnikov

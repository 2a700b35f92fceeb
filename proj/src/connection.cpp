#include "sitnikov/connection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sitnikov/log.hpp"

namespace sitnikov {

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

Grid window_grid(const ConnectionProblem& problem, long t_minus, long t_plus) {
    return Grid{problem.nodes_per_unit, t_minus, t_plus};
}

// Sum of the per-interval normalizations over [t_minus, t_plus).
double normalization_sum(const ConnectionProblem& problem, long t_minus, long t_plus) {
    const double per_minus = problem.rho_minus / problem.gamma_minus.symbols.period();
    const double per_plus = problem.rho_plus / problem.gamma_plus.symbols.period();
    const long n_neg = std::max<long>(0, 0 - t_minus);
    const long n_pos = std::max<long>(0, t_plus - 0);
    return static_cast<double>(n_neg) * per_minus + static_cast<double>(n_pos) * per_plus;
}

// Discrete L2 distance between u and the periodic tail on interval [i, i+1].
double interval_distance(const Trajectory& u, const PeriodicOrbit& gamma, long i) {
    const Grid& g = u.grid;
    const int m = g.nodes_per_unit;
    const std::size_t i0 = g.node_at(i);
    const long base = g.t_start * m + static_cast<long>(i0);
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double d = u.values[i0 + j] - gamma_value(gamma, base + j);
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        acc += w * d * d;
    }
    return std::sqrt(acc * g.step());
}

struct FixedEndObjective {
    const ActionEvaluator* eval;
    const AssembledSymbols* symbols;
    Trajectory scratch;
    std::vector<double> grad_full;
    double mu = 0.0;
    double eps = 0.05;

    double operator()(std::span<const double> x, std::span<double> grad) {
        auto& y = scratch.values;
        std::copy(x.begin(), x.end(), y.begin() + 1);
        double value = eval->value(scratch);
        grad_full.resize(y.size());
        eval->gradient(scratch, grad_full);
        std::copy(grad_full.begin() + 1, grad_full.end() - 1, grad.begin());
        if (mu > 0.0) {
            const Grid& g = scratch.grid;
            for (long n = g.t_start + 1; n < g.t_end; ++n) {
                const std::size_t i = g.node_at(n);
                const double z = -symbols->at(n) * y[i] / eps;
                value += mu * softplus(z);
                grad[i - 1] += mu * sigmoid(z) * (-symbols->at(n) / eps);
            }
        }
        return value;
    }
};

struct WindowSolveOutcome {
    double grad_sup = 0.0;
    double min_value_seen = std::numeric_limits<double>::infinity();
    bool converged = false;
};

WindowSolveOutcome solve_window(const ActionEvaluator& eval, const ConnectionProblem& problem,
                                Trajectory& traj, const ConnectionOptions& opts) {
    auto symbol_at = [&](long n) { return problem.symbols.at(n); };
    auto is_admissible = [&](const Trajectory& t) { return admissible(t, symbol_at); };

    FixedEndObjective objective{&eval, &problem.symbols, traj, {}, 0.0, 0.05};
    Trajectory monitor = traj;
    bool violated = !is_admissible(traj);
    WindowSolveOutcome outcome;

    LbfgsOptions lopts;
    lopts.max_iterations = opts.max_iterations;
    lopts.grad_sup_tol = opts.grad_tol;
    lopts.on_iterate = [&](std::span<const double> x, double f, double) {
        outcome.min_value_seen = std::min(outcome.min_value_seen, f);
        std::copy(x.begin(), x.end(), monitor.values.begin() + 1);
        if (!is_admissible(monitor)) {
            violated = true;
            return false;
        }
        return true;
    };

    std::vector<double> x0(traj.values.begin() + 1, traj.values.end() - 1);
    LbfgsResult result;
    if (!violated) result = lbfgs_minimize(std::ref(objective), x0, lopts);

    if (violated) {
        SITNIKOV_LOG_INFO("connection solve: admissibility violated, restarting with annealed penalty");
        const Trajectory fresh =
            seed_connection(problem, traj.grid.t_start, traj.grid.t_end, opts.middle_amplitude_floor);
        std::vector<double> x(fresh.values.begin() + 1, fresh.values.end() - 1);
        double mu = opts.periodic.penalty_mu0;
        for (int round = 0; round <= opts.periodic.penalty_rounds; ++round) {
            objective.mu = round == opts.periodic.penalty_rounds ? 0.0 : mu;
            LbfgsOptions popts = lopts;
            if (objective.mu > 0.0) popts.on_iterate = nullptr;
            result = lbfgs_minimize(std::ref(objective), x, popts);
            x = result.x;
            mu *= 0.25;
        }
    }
    std::copy(result.x.begin(), result.x.end(), traj.values.begin() + 1);
    outcome.min_value_seen = std::min(outcome.min_value_seen, eval.value(traj));
    if (!is_admissible(traj)) {
        outcome.grad_sup = grad_sup_norm(eval, traj);
        outcome.converged = false;
        return outcome;
    }

    NewtonRefineOptions nopts;
    nopts.grad_sup_tol = std::min(opts.grad_tol * 1e-2, 1e-12);
    nopts.accept = is_admissible;
    outcome.grad_sup = newton_refine(eval, traj, nopts);
    outcome.min_value_seen = std::min(outcome.min_value_seen, eval.value(traj));
    outcome.converged = outcome.grad_sup <= opts.grad_tol;
    return outcome;
}

}  // namespace

double gamma_value(const PeriodicOrbit& gamma, long absolute_node) {
    const long nm = gamma.traj.grid.span() * gamma.traj.grid.nodes_per_unit;
    long j = absolute_node % nm;
    if (j < 0) j += nm;
    return gamma.traj.values[static_cast<std::size_t>(j)];
}

ConnectionProblem build_connection_problem(const KeplerDrive& drive, const ConnectionSpec& spec,
                                           const ConnectionOptions& opts) {
    PeriodicSolveOptions popts = opts.periodic;
    popts.refine_levels = 0;  // gammas must live at the window's node density
    popts.grad_tol = std::min(popts.grad_tol, opts.grad_tol);
    popts.seed.reset();

    const Grid grid_minus{opts.nodes_per_unit, 0, spec.b_minus.period()};
    const Grid grid_plus{opts.nodes_per_unit, 0, spec.b_plus.period()};
    const auto multi_minus = minimize_periodic_multistart(drive, spec.b_minus, grid_minus, popts, opts.multistart);
    const auto multi_plus = spec.b_plus == spec.b_minus
                                ? multi_minus
                                : minimize_periodic_multistart(drive, spec.b_plus, grid_plus, popts, opts.multistart);

    AssembledSymbols symbols(spec);
    const Extremal orient_plus =
        symbols.at(spec.k_plus) == 1 ? Extremal::maximal : Extremal::minimal;
    const Extremal orient_minus =
        symbols.at(spec.k_minus) == 1 ? Extremal::maximal : Extremal::minimal;

    ConnectionProblem problem{std::move(symbols),
                              select_extremal(multi_minus, orient_minus, popts.rho_tol),
                              select_extremal(multi_plus, orient_plus, popts.rho_tol),
                              multi_minus.rho_hat,
                              multi_plus.rho_hat,
                              orient_minus,
                              orient_plus,
                              opts.nodes_per_unit};
    return problem;
}

double defect(const ActionEvaluator& eval, const Trajectory& u, long p, const ConnectionProblem& problem) {
    const Grid& g = u.grid;
    if (p < g.t_start || p + 1 > g.t_end) throw std::out_of_range("defect: interval outside window");
    const std::size_t i0 = g.node_at(p);
    const double a_seg = eval.segment_value(u, i0, i0 + g.nodes_per_unit);
    const double norm = p >= 0 ? problem.rho_plus / problem.gamma_plus.symbols.period()
                               : problem.rho_minus / problem.gamma_minus.symbols.period();
    return a_seg - norm;
}

double j_windowed(const ActionEvaluator& eval, const Trajectory& u, const ConnectionProblem& problem) {
    return eval.value(u) - normalization_sum(problem, u.grid.t_start, u.grid.t_end);
}

double j_lower_bound(const ConnectionProblem& problem) {
    const long n_minus = problem.gamma_minus.symbols.period();
    const long n_plus = problem.gamma_plus.symbols.period();
    // Aligned whole-period tail blocks [l N, (l+1) N] lie fully in the matching
    // tail and in the matching normalization half-line; each contributes >= 0.
    // Every interval of the stub between the tilings, plus at most one partial
    // edge block per side of any window, is bounded by its normalization.
    const long tile_minus_end = n_minus * static_cast<long>(
        std::floor(static_cast<double>(std::min<long>(0, problem.k_minus() - 1)) / n_minus));
    const long tile_plus_begin = n_plus * static_cast<long>(
        std::ceil(static_cast<double>(std::max<long>(0, problem.k_plus() + 1)) / n_plus));
    double bound = -(problem.rho_minus + problem.rho_plus);
    for (long p = tile_minus_end; p < tile_plus_begin; ++p)
        bound -= p >= 0 ? problem.rho_plus / n_plus : problem.rho_minus / n_minus;
    return bound;
}

Trajectory seed_connection(const ConnectionProblem& problem, long t_minus, long t_plus,
                           double amplitude_floor) {
    const long k_minus = problem.k_minus();
    const long k_plus = problem.k_plus();
    if (t_minus > k_minus - problem.gamma_minus.symbols.period() ||
        t_plus < k_plus + problem.gamma_plus.symbols.period())
        throw std::invalid_argument("seed_connection: window must cover at least one tail period per side");

    const Grid grid = window_grid(problem, t_minus, t_plus);
    const int m = grid.nodes_per_unit;
    Trajectory traj{grid, BoundaryKind::fixed_ends, std::vector<double>(grid.node_count())};

    auto nodal = [&](long n) -> double {
        if (n <= k_minus - 1) return gamma_value(problem.gamma_minus, n * m);
        if (n >= k_plus + 1) return gamma_value(problem.gamma_plus, n * m);
        const double amp_minus = std::abs(gamma_value(problem.gamma_minus, n * m));
        const double amp_plus = std::abs(gamma_value(problem.gamma_plus, n * m));
        const double amp = std::max(0.5 * (amp_minus + amp_plus), amplitude_floor);
        return problem.symbols.at(n) * amp;
    };

    for (long k = t_minus; k < t_plus; ++k) {
        const std::size_t i0 = grid.node_at(k);
        if (k + 1 <= k_minus - 1) {
            const long base = k * m;
            for (int j = 0; j <= m; ++j) traj.values[i0 + j] = gamma_value(problem.gamma_minus, base + j);
        } else if (k >= k_plus + 1) {
            const long base = k * m;
            for (int j = 0; j <= m; ++j) traj.values[i0 + j] = gamma_value(problem.gamma_plus, base + j);
        } else {
            const double v0 = nodal(k), v1 = nodal(k + 1);
            for (int j = 0; j <= m; ++j) {
                const double s = static_cast<double>(j) / m;
                traj.values[i0 + j] = v0 + (v1 - v0) * s * s * (3.0 - 2.0 * s);
            }
        }
    }
    return traj;
}

ConnectingOrbit minimize_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                                    const ConnectionOptions& opts) {
    const long n_minus = problem.gamma_minus.symbols.period();
    const long n_plus = problem.gamma_plus.symbols.period();
    long t_minus = std::min(problem.k_minus() - opts.initial_periods * n_minus, -1L);
    long t_plus = std::max(problem.k_plus() + opts.initial_periods * n_plus, 1L);

    Trajectory traj = seed_connection(problem, t_minus, t_plus, opts.middle_amplitude_floor);

    ConnectingOrbit orbit(problem.symbols.spec());
    orbit.j_min_seen = std::numeric_limits<double>::infinity();

    double prev_j = std::numeric_limits<double>::quiet_NaN();
    for (int round = 0;; ++round) {
        const ActionEvaluator eval(drive, traj.grid);
        const auto outcome = solve_window(eval, problem, traj, opts);
        const double norm_const = normalization_sum(problem, t_minus, t_plus);
        const double j_hat = eval.value(traj) - norm_const;
        orbit.j_min_seen = std::min(orbit.j_min_seen, outcome.min_value_seen - norm_const);

        // Tail residual profile and the outermost-two-period maxima.
        std::vector<double> left, right;
        for (long i = t_minus; i <= problem.k_minus() - 1; ++i)
            left.push_back(interval_distance(traj, problem.gamma_minus, i));
        for (long i = problem.k_plus() + 1; i <= t_plus - 1; ++i)
            right.push_back(interval_distance(traj, problem.gamma_plus, i));
        double outer = 0.0;
        for (long k = 0; k < 2 * n_minus && k < static_cast<long>(left.size()); ++k)
            outer = std::max(outer, left[static_cast<std::size_t>(k)]);
        for (long k = 0; k < 2 * n_plus && k < static_cast<long>(right.size()); ++k)
            outer = std::max(outer, right[right.size() - 1 - static_cast<std::size_t>(k)]);

        orbit.log.push_back({t_minus, t_plus, j_hat, outer, outcome.grad_sup});
        SITNIKOV_LOG_INFO("connection window [%ld,%ld]: j=%.12g outer_tail=%.3e grad=%.3e", t_minus,
                          t_plus, j_hat, outer, outcome.grad_sup);

        const bool tails_ok = outer <= opts.tail_tol;
        const double dj = round > 0 && std::isfinite(prev_j) ? std::abs(j_hat - prev_j)
                                                             : std::numeric_limits<double>::infinity();
        const bool done = outcome.converged && tails_ok && dj <= opts.j_tol;
        prev_j = j_hat;

        if (done || round >= opts.max_windows) {
            orbit.traj = traj;
            orbit.j_hat = j_hat;
            orbit.defects.clear();
            for (long p = t_minus; p < t_plus; ++p) orbit.defects.push_back(defect(eval, traj, p, problem));
            orbit.tail_left = std::move(left);
            orbit.tail_right = std::move(right);
            orbit.grad_sup = outcome.grad_sup;
            orbit.el_residual_sup = el_residual_sup(eval, traj);
            orbit.t_minus = t_minus;
            orbit.t_plus = t_plus;
            orbit.crossings_ok =
                zero_crossings(traj, [&](long n) { return problem.symbols.at(n); }).matches;
            orbit.converged = done && orbit.crossings_ok;
            orbit.windows_used = round;
            if (!done)
                SITNIKOV_LOG_ERROR(
                    "connection: window loop hit the extension budget (outer_tail=%.3e, dj=%.3e)", outer, dj);
            return orbit;
        }

        // Extend one tail period per side, padding with gamma samples.
        const long new_minus = t_minus - n_minus;
        const long new_plus = t_plus + n_plus;
        const Grid fine = window_grid(problem, new_minus, new_plus);
        Trajectory extended{fine, BoundaryKind::fixed_ends, std::vector<double>(fine.node_count())};
        const int m = fine.nodes_per_unit;
        const std::size_t pad = static_cast<std::size_t>(n_minus) * m;
        for (std::size_t j = 0; j < pad; ++j)
            extended.values[j] = gamma_value(problem.gamma_minus, new_minus * m + static_cast<long>(j));
        std::copy(traj.values.begin(), traj.values.end(), extended.values.begin() + static_cast<long>(pad));
        for (std::size_t j = pad + traj.values.size(); j < extended.values.size(); ++j)
            extended.values[j] = gamma_value(problem.gamma_plus, new_minus * m + static_cast<long>(j));
        traj = std::move(extended);
        t_minus = new_minus;
        t_plus = new_plus;
    }
}

}  // namespace sitnikov

#include "sitnikov/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "sitnikov/log.hpp"

namespace sitnikov {

namespace {

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::optional<double> symmetry_defect(const PeriodicOrbit& orbit) {
    if (!orbit.symbols.symmetric()) return std::nullopt;
    const auto& y = orbit.traj.values;
    const std::size_t n = y.size();
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(y[j] - y[n - 1 - j]));
    return d;
}

ScalingCheck scaling_check(const KeplerDrive& drive, const PeriodicSymbols& b, int k, Grid grid,
                           const PeriodicSolveOptions& opts, const MultistartOptions& multi,
                           RhoCache* cache, const Tolerances& tol) {
    if (k < 1) throw std::invalid_argument("scaling_check: k must be >= 1");
    ScalingCheck out;
    out.rho_b = rho(drive, b, grid, opts, multi, cache);
    if (k == 1) {
        out.rho_kb = out.rho_b;
        out.defect = 0.0;
        out.periodicity_defect = 0.0;
        out.pass = true;
        return out;
    }
    std::vector<int> repeated;
    for (int rep = 0; rep < k; ++rep)
        repeated.insert(repeated.end(), b.word().symbols().begin(), b.word().symbols().end());
    const PeriodicSymbols kb{SymbolWord(std::move(repeated))};
    const Grid kgrid{grid.nodes_per_unit, grid.t_start, grid.t_start + kb.period()};

    const auto multi_res = minimize_periodic_multistart(drive, kb, kgrid, opts, multi);
    out.rho_kb = multi_res.rho_hat;
    if (cache) cache->store(RhoCache::key_for(kb, kgrid, opts), out.rho_kb);
    out.defect = std::abs(out.rho_kb - k * out.rho_b);

    const auto& y = multi_res.orbits[multi_res.best].traj.values;
    const std::size_t shift =
        static_cast<std::size_t>(b.period()) * multi_res.orbits[multi_res.best].traj.grid.nodes_per_unit;
    double pd = 0.0;
    for (std::size_t i = 0; i + shift < y.size(); ++i) pd = std::max(pd, std::abs(y[i] - y[i + shift]));
    out.periodicity_defect = pd;
    out.pass = out.defect <= k * tol.rho_tol && pd <= tol.period_tol;
    return out;
}

OrderingVerdict ordering_compare(const Trajectory& a, const Trajectory& b, double tol) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("ordering_compare: mismatched grids");
    double sup = 0.0;
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sup = std::max(sup, std::abs(d));
        if (d > 0.0) any_pos = true;
        if (d < 0.0) any_neg = true;
    }
    if (sup <= tol) return OrderingVerdict::identical;
    if (any_pos && !any_neg) return OrderingVerdict::strictly_ordered;
    if (any_neg && !any_pos) return OrderingVerdict::strictly_ordered;
    return OrderingVerdict::violated;
}

OrderingVerdict ordering_verdict(const std::vector<PeriodicOrbit>& orbits, double rho_tol, double tol) {
    std::vector<const PeriodicOrbit*> keep;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : orbits)
        if (o.converged) best = std::min(best, o.rho_hat);
    for (const auto& o : orbits)
        if (o.converged && o.rho_hat <= best + rho_tol) keep.push_back(&o);
    if (keep.size() < 2) return OrderingVerdict::single_sample;
    bool any_ordered = false;
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = i + 1; j < keep.size(); ++j) {
            const auto v = ordering_compare(keep[i]->traj, keep[j]->traj, tol);
            if (v == OrderingVerdict::violated) return OrderingVerdict::violated;
            if (v == OrderingVerdict::strictly_ordered) any_ordered = true;
        }
    return any_ordered ? OrderingVerdict::strictly_ordered : OrderingVerdict::identical;
}

namespace {

// Smooth strictly positive modulation over [0, span]; low-order Fourier series
// through exp keeps it bounded away from zero.
std::vector<double> smooth_positive(std::mt19937_64& rng, const Grid& grid) {
    std::normal_distribution<double> normal(0.0, 0.35);
    const int modes = 4;
    std::vector<double> a(modes), b(modes);
    for (int k = 0; k < modes; ++k) {
        a[k] = normal(rng) / (k + 1);
        b[k] = normal(rng) / (k + 1);
    }
    const double span = static_cast<double>(grid.span());
    std::vector<double> out(grid.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = grid.time_at(i) - static_cast<double>(grid.t_start);
        double s = 0.0;
        for (int k = 0; k < modes; ++k) {
            const double w = 2.0 * std::numbers::pi * (k + 1) * t / span;
            s += a[k] * std::cos(w) + b[k] * std::sin(w);
        }
        out[i] = std::exp(s);
    }
    return out;
}

Trajectory random_admissible(std::mt19937_64& rng, const PeriodicSymbols& b, const Grid& grid) {
    std::uniform_real_distribution<double> amp(0.3, 2.2);
    Trajectory traj{grid, BoundaryKind::free_ends, std::vector<double>(grid.node_count())};
    const int m = grid.nodes_per_unit;
    std::vector<double> nodal(static_cast<std::size_t>(grid.span()) + 1);
    for (std::size_t k = 0; k < nodal.size(); ++k)
        nodal[k] = b.at(grid.t_start + static_cast<long>(k)) * amp(rng);
    for (long k = 0; k < grid.span(); ++k) {
        const double v0 = nodal[static_cast<std::size_t>(k)];
        const double v1 = nodal[static_cast<std::size_t>(k) + 1];
        for (int j = 0; j < m; ++j) {
            const double s = static_cast<double>(j) / m;
            traj.values[static_cast<std::size_t>(k) * m + j] = v0 + (v1 - v0) * s * s * (3.0 - 2.0 * s);
        }
    }
    traj.values.back() = nodal.back();
    const auto mod = smooth_positive(rng, grid);
    for (std::size_t i = 0; i < traj.values.size(); ++i) traj.values[i] *= mod[i];
    return traj;
}

Trajectory perturbed_orbit(std::mt19937_64& rng, const PeriodicOrbit& orbit) {
    const Grid& grid = orbit.traj.grid;
    std::normal_distribution<double> normal(0.0, 1.0);
    const int modes = 6;
    std::vector<double> a(modes), b(modes), phase(modes);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < modes; ++k) {
        a[k] = normal(rng) / (k + 1);
        phase[k] = uni(rng);
    }
    const double span = static_cast<double>(grid.span());
    std::vector<double> bump(grid.node_count());
    double bump_sup = 0.0;
    for (std::size_t i = 0; i < bump.size(); ++i) {
        const double t = grid.time_at(i) - static_cast<double>(grid.t_start);
        double s = 0.0;
        for (int k = 0; k < modes; ++k) s += a[k] * std::sin(std::numbers::pi * (k + 1) * t / span + phase[k]);
        bump[i] = s;
        bump_sup = std::max(bump_sup, std::abs(s));
    }
    double min_nodal = std::numeric_limits<double>::infinity();
    for (long n = grid.t_start; n <= grid.t_end; ++n)
        min_nodal = std::min(min_nodal, std::abs(orbit.traj.values[grid.node_at(n)]));
    const double scale = bump_sup > 0.0 ? 0.5 * min_nodal / bump_sup : 0.0;
    Trajectory traj = orbit.traj;
    traj.bc = BoundaryKind::free_ends;
    for (std::size_t i = 0; i < traj.values.size(); ++i) traj.values[i] += scale * bump[i];
    return traj;
}

}  // namespace

int lower_bound_violations(const KeplerDrive& drive, const PeriodicOrbit& orbit, int samples,
                           std::uint64_t rng_seed, double tol) {
    std::mt19937_64 rng(rng_seed);
    const ActionEvaluator eval(drive, orbit.traj.grid);
    auto symbol_at = [&](long n) { return orbit.symbols.at(n); };
    int violations = 0;
    for (int s = 0; s < samples; ++s) {
        Trajectory candidate =
            s % 2 == 0 ? random_admissible(rng, orbit.symbols, orbit.traj.grid) : perturbed_orbit(rng, orbit);
        if (!admissible(candidate, symbol_at)) continue;  // generator guarantees this; belt and braces
        if (eval.value(candidate) < orbit.rho_hat - tol) ++violations;
    }
    return violations;
}

double two_point_recheck(const KeplerDrive& drive, const PeriodicOrbit& orbit, std::size_t i0,
                         std::size_t i1, std::uint64_t rng_seed) {
    if (i0 + 2 >= i1 || i1 >= orbit.traj.values.size())
        throw std::invalid_argument("two_point_recheck: need at least one interior node");
    const ActionEvaluator eval(drive, orbit.traj.grid);
    const Grid& grid = orbit.traj.grid;
    auto symbol_at = [&](long n) { return orbit.symbols.at(n); };

    Trajectory work = orbit.traj;
    // Perturb the interior smoothly, keeping integer-node signs.
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a1 = normal(rng), a2 = normal(rng);
    double min_nodal = std::numeric_limits<double>::infinity();
    for (long n = grid.t_start; n <= grid.t_end; ++n)
        min_nodal = std::min(min_nodal, std::abs(orbit.traj.values[grid.node_at(n)]));
    const double span = static_cast<double>(i1 - i0);
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        const double s = static_cast<double>(i - i0) / span;
        const double bump = std::sin(std::numbers::pi * s) * (a1 + a2 * std::cos(2.0 * std::numbers::pi * s));
        work.values[i] += 0.2 * min_nodal * bump / (1.0 + std::abs(a1) + std::abs(a2));
    }

    // Minimize the arc action over the strict interior (everything else frozen).
    const std::size_t ndof = i1 - i0 - 1;
    const double h = grid.step();
    const auto& x = eval.drive_heights();
    auto objective = [&](std::span<const double> v, std::span<double> g) {
        for (std::size_t k = 0; k < ndof; ++k) work.values[i0 + 1 + k] = v[k];
        double val = eval.segment_value(work, i0, i1);
        for (std::size_t k = 0; k < ndof; ++k) {
            const std::size_t i = i0 + 1 + k;
            const double r2 = x[i] * x[i] + work.values[i] * work.values[i];
            g[k] = (2.0 * work.values[i] - work.values[i - 1] - work.values[i + 1]) / h -
                   h * work.values[i] / (r2 * std::sqrt(r2));
        }
        return val;
    };
    LbfgsOptions lopts;
    lopts.grad_sup_tol = 1e-11;
    lopts.max_iterations = 5000;
    std::vector<double> v0(work.values.begin() + static_cast<long>(i0) + 1,
                           work.values.begin() + static_cast<long>(i1));
    auto res = lbfgs_minimize(objective, v0, lopts);
    for (std::size_t k = 0; k < ndof; ++k) work.values[i0 + 1 + k] = res.x[k];

    // Newton on the arc's tridiagonal block for the last digits.
    std::vector<double> diag(ndof), off(ndof > 1 ? ndof - 1 : 0), rhs(ndof), g(ndof);
    for (int it = 0; it < 8; ++it) {
        double gs = 0.0;
        for (std::size_t k = 0; k < ndof; ++k) {
            const std::size_t i = i0 + 1 + k;
            const double yi = work.values[i];
            const double r2 = x[i] * x[i] + yi * yi;
            g[k] = (2.0 * yi - work.values[i - 1] - work.values[i + 1]) / h - h * yi / (r2 * std::sqrt(r2));
            diag[k] = 2.0 / h + h * (2.0 * yi * yi - x[i] * x[i]) / (r2 * r2 * std::sqrt(r2));
            rhs[k] = -g[k];
            gs = std::max(gs, std::abs(g[k]));
        }
        if (gs <= 1e-12) break;
        for (std::size_t k = 0; k + 1 < ndof; ++k) off[k] = -1.0 / h;
        auto step = solve_tridiag(diag, off, rhs);
        if (!step) break;
        const std::vector<double> saved(work.values.begin() + static_cast<long>(i0) + 1,
                                        work.values.begin() + static_cast<long>(i1));
        for (std::size_t k = 0; k < ndof; ++k) work.values[i0 + 1 + k] += (*step)[k];
        if (!admissible(work, symbol_at)) {
            std::copy(saved.begin(), saved.end(), work.values.begin() + static_cast<long>(i0) + 1);
            break;
        }
    }

    double dev = 0.0;
    for (std::size_t i = i0 + 1; i < i1; ++i)
        dev = std::max(dev, std::abs(work.values[i] - orbit.traj.values[i]));
    return dev;
}

TailComparison tail_comparison(const ConnectionProblem& problem, const ConnectingOrbit& orbit,
                               double tol) {
    TailComparison out;
    // a_K and b_K disagree by construction; a_K = +1 puts the connecting orbit
    // above the (then maximal) periodic orbit on that side, a_K = -1 below.
    out.right_above = problem.symbols.at(problem.k_plus()) == 1;
    out.left_above = problem.symbols.at(problem.k_minus()) == 1;

    const Grid& g = orbit.traj.grid;
    const int m = g.nodes_per_unit;

    // Right: nodes with t in [K+, T+ - 1]; the last period is pinned by the clamp.
    double right_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = g.node_at(problem.k_plus()); i <= g.node_at(g.t_end - 1); ++i) {
        const double diff =
            orbit.traj.values[i] - gamma_value(problem.gamma_plus, g.t_start * m + static_cast<long>(i));
        right_margin = std::min(right_margin, out.right_above ? diff : -diff);
    }
    out.right_margin = right_margin;
    out.right_ok = right_margin > -tol;

    double left_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = g.node_at(g.t_start + 1); i <= g.node_at(problem.k_minus()); ++i) {
        const double diff =
            orbit.traj.values[i] - gamma_value(problem.gamma_minus, g.t_start * m + static_cast<long>(i));
        left_margin = std::min(left_margin, out.left_above ? diff : -diff);
    }
    out.left_margin = left_margin;
    out.left_ok = left_margin > -tol;
    return out;
}

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.applicable || c.pass; });
}

std::string VerificationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        if (!c.applicable)
            os << "  n/a   " << c.name << "\n";
        else
            os << (c.pass ? "  pass  " : "  FAIL  ") << c.name << " = " << c.value
               << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    }
    return os.str();
}

const char* to_string(OrderingVerdict v) {
    switch (v) {
        case OrderingVerdict::identical: return "identical";
        case OrderingVerdict::strictly_ordered: return "strictly_ordered";
        case OrderingVerdict::violated: return "violated";
        case OrderingVerdict::single_sample: return "single_sample";
    }
    return "?";
}

VerificationReport verify_periodic(const KeplerDrive& drive, const PeriodicOrbit& orbit,
                                   const Tolerances& tol, const VerifyOptions& opts) {
    VerificationReport rep;
    rep.kind = "periodic";
    const ActionEvaluator eval(drive, orbit.traj.grid);
    auto symbol_at = [&](long n) { return orbit.symbols.at(n); };

    const bool adm = admissible(orbit.traj, symbol_at);
    rep.checks.push_back({"admissible", true, adm, adm ? 1.0 : 0.0, orbit.symbols.word().str()});

    const double gs = grad_sup_norm(eval, orbit.traj);
    rep.checks.push_back({"grad_sup", true, gs <= tol.grad_tol, gs, "tol " + short_num(tol.grad_tol)});

    const double el = el_residual_sup(eval, orbit.traj);
    rep.checks.push_back({"el_residual_sup", true, el <= tol.el_residual_bound, el, ""});

    rep.crossings = zero_crossings(orbit.traj, symbol_at);
    rep.checks.push_back({"zero_crossings", true, rep.crossings.matches,
                          static_cast<double>(rep.crossings.counts.size()),
                          rep.crossings.node_hit_flagged ? "node hit flagged" : ""});

    const auto sym = symmetry_defect(orbit);
    rep.checks.push_back({"symmetry_defect", sym.has_value(), sym.has_value() && *sym <= tol.sym_tol,
                          sym.value_or(0.0), sym ? "" : "b not symmetric"});

    if (adm) {
        const int viol = lower_bound_violations(drive, orbit, opts.lower_bound_samples, opts.rng_seed,
                                                 tol.lower_bound_tol);
        rep.checks.push_back({"lower_bound_violations", true, viol == 0, static_cast<double>(viol),
                              std::to_string(opts.lower_bound_samples) + " samples"});
    } else {
        rep.checks.push_back({"lower_bound_violations", false, false, 0.0, "skipped: inadmissible"});
    }

    if (opts.scaling_k > 1 && adm) {
        PeriodicSolveOptions sopts;
        sopts.refine_levels = 0;
        const Grid grid{orbit.traj.grid.nodes_per_unit, 0, orbit.symbols.period()};
        const auto scaling = scaling_check(drive, orbit.symbols, opts.scaling_k, grid, sopts,
                                           MultistartOptions{}, nullptr, tol);
        rep.checks.push_back({"scaling_defect", true, scaling.pass, scaling.defect,
                              "k = " + std::to_string(opts.scaling_k)});
    } else {
        rep.checks.push_back({"scaling_defect", false, false, 0.0, "run with scaling_k > 1"});
    }

    rep.ordering = OrderingVerdict::single_sample;
    rep.checks.push_back({"ordering", true, true, 0.0, to_string(rep.ordering)});
    return rep;
}

VerificationReport verify_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                                     const ConnectingOrbit& orbit, const Tolerances& tol) {
    VerificationReport rep;
    rep.kind = "connection";
    const ActionEvaluator eval(drive, orbit.traj.grid);
    auto symbol_at = [&](long n) { return problem.symbols.at(n); };

    const bool adm = admissible(orbit.traj, symbol_at);
    rep.checks.push_back({"admissible", true, adm, adm ? 1.0 : 0.0, ""});

    const double gs = grad_sup_norm(eval, orbit.traj);
    rep.checks.push_back({"grad_sup", true, gs <= tol.grad_tol, gs, ""});

    const double el = el_residual_sup(eval, orbit.traj);
    rep.checks.push_back({"el_residual_sup", true, el <= tol.el_residual_bound, el, ""});

    rep.crossings = zero_crossings(orbit.traj, symbol_at);
    rep.checks.push_back({"zero_crossings", true, rep.crossings.matches,
                          static_cast<double>(rep.crossings.counts.size()),
                          rep.crossings.node_hit_flagged ? "node hit flagged" : ""});

    rep.tail_decay_left = orbit.tail_left;
    rep.tail_decay_right = orbit.tail_right;
    const long n_minus = problem.gamma_minus.symbols.period();
    const long n_plus = problem.gamma_plus.symbols.period();
    double outer = 0.0;
    for (long k = 0; k < 2 * n_minus && k < static_cast<long>(orbit.tail_left.size()); ++k)
        outer = std::max(outer, orbit.tail_left[static_cast<std::size_t>(k)]);
    for (long k = 0; k < 2 * n_plus && k < static_cast<long>(orbit.tail_right.size()); ++k)
        outer = std::max(outer, orbit.tail_right[orbit.tail_right.size() - 1 - static_cast<std::size_t>(k)]);
    rep.checks.push_back({"outer_tail_residual", true, outer <= tol.tail_tol, outer,
                          "outermost two periods each side"});

    bool monotone = true;
    for (std::size_t k = 0; k + 1 < orbit.tail_right.size(); ++k)
        if (orbit.tail_right[k + 1] > orbit.tail_right[k] + tol.tail_monotone_slack) monotone = false;
    for (std::size_t k = 0; k + 1 < orbit.tail_left.size(); ++k)
        if (orbit.tail_left[k] > orbit.tail_left[k + 1] + tol.tail_monotone_slack) monotone = false;
    rep.checks.push_back({"tail_monotone", true, monotone, monotone ? 1.0 : 0.0,
                          "residuals decrease toward the window ends"});

    const auto cmp = tail_comparison(problem, orbit, tol.comparison_tol);
    {
        std::ostringstream os;
        os << "y* " << (cmp.right_above ? ">" : "<") << " gamma+ beyond K+ ("
           << (cmp.right_above ? "maximal" : "minimal") << ")";
        rep.checks.push_back({"comparison_right", true, cmp.right_ok, cmp.right_margin, os.str()});
    }
    {
        std::ostringstream os;
        os << "y* " << (cmp.left_above ? ">" : "<") << " gamma- before K- ("
           << (cmp.left_above ? "maximal" : "minimal") << ")";
        rep.checks.push_back({"comparison_left", true, cmp.left_ok, cmp.left_margin, os.str()});
    }

    const double bound = j_lower_bound(problem);
    rep.checks.push_back({"j_bounded_below", true, orbit.j_min_seen >= bound - tol.lower_bound_tol,
                          orbit.j_min_seen, "lower bound " + short_num(bound)});

    bool window_stable = true;
    for (std::size_t k = 0; k + 1 < orbit.log.size(); ++k)
        if (orbit.log[k].outer_tail_max <= tol.tail_tol &&
            orbit.log[k + 1].j_hat > orbit.log[k].j_hat + tol.j_tol)
            window_stable = false;
    rep.checks.push_back({"window_stability", true, window_stable, static_cast<double>(orbit.log.size()),
                          "j non-increasing across extensions once tails settle"});

    rep.checks.push_back({"window_converged", true, orbit.converged,
                          static_cast<double>(orbit.windows_used), "extensions used"});
    return rep;
}

}  // namespace sitnikov

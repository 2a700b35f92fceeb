#include "sitnikov/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "sitnikov/log.hpp"

namespace sitnikov {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sup_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

struct LinePoint {
    double alpha, phi, dphi;
};

// Cubic minimizer of the Hermite data at two line points, clipped to the
// interior of [lo.alpha, hi.alpha]; bisection when the cubic degenerates.
double interp_step(const LinePoint& lo, const LinePoint& hi) {
    const double a0 = lo.alpha, a1 = hi.alpha;
    const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.phi - hi.phi) / (a0 - a1);
    const double disc = d1 * d1 - lo.dphi * hi.dphi;
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), a1 - a0);
        double alpha = a1 - (a1 - a0) * (hi.dphi + d2 - d1) / (hi.dphi - lo.dphi + 2.0 * d2);
        const double span = std::abs(a1 - a0);
        const double lo_a = std::min(a0, a1) + 0.1 * span;
        const double hi_a = std::max(a0, a1) - 0.1 * span;
        if (std::isfinite(alpha) && alpha >= lo_a && alpha <= hi_a) return alpha;
    }
    return 0.5 * (a0 + a1);
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& opts) {
    const std::size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);
    std::vector<double> g(n);
    res.value = objective(res.x, g);
    res.grad_sup = sup_norm(g);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> d(n), x_trial(n), g_trial(n), alpha_buf;

    auto two_loop = [&]() {
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        const std::size_t m = s_hist.size();
        alpha_buf.assign(m, 0.0);
        for (std::size_t k = m; k-- > 0;) {
            alpha_buf[k] = rho_hist[k] * dot(s_hist[k], d);
            for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * y_hist[k][i];
        }
        if (m > 0) {
            const double gamma = 1.0 / (rho_hist[m - 1] * dot(y_hist[m - 1], y_hist[m - 1]));
            for (std::size_t i = 0; i < n; ++i) d[i] *= gamma;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], d);
            for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * s_hist[k][i];
        }
    };

    auto eval_line = [&](double alpha) {
        for (std::size_t i = 0; i < n; ++i) x_trial[i] = res.x[i] + alpha * d[i];
        const double phi = objective(x_trial, g_trial);
        return LinePoint{alpha, phi, dot(g_trial, d)};
    };

    // Strong Wolfe search along d. Returns the accepted point or nullopt.
    auto wolfe_search = [&](double phi0, double dphi0) -> std::optional<LinePoint> {
        const double slack = 1e-14 * (1.0 + std::abs(phi0));
        auto armijo = [&](const LinePoint& p) {
            return p.phi <= phi0 + opts.wolfe_c1 * p.alpha * dphi0 + slack;
        };
        auto curvature = [&](const LinePoint& p) { return std::abs(p.dphi) <= -opts.wolfe_c2 * dphi0; };

        int evals = 0;
        auto zoom = [&](LinePoint lo, LinePoint hi) -> std::optional<LinePoint> {
            while (evals < opts.max_line_search) {
                LinePoint mid = eval_line(interp_step(lo, hi));
                ++evals;
                if (!std::isfinite(mid.phi) || !armijo(mid) || mid.phi >= lo.phi) {
                    hi = mid;
                } else {
                    if (curvature(mid)) return mid;
                    if (mid.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                    lo = mid;
                }
                if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, lo.alpha)) break;
            }
            // Interval collapsed without meeting the curvature condition;
            // a plain decrease is still a usable step.
            if (lo.alpha > 0.0 && lo.phi < phi0) return lo;
            return std::nullopt;
        };

        LinePoint prev{0.0, phi0, dphi0};
        double alpha = 1.0;
        while (evals < opts.max_line_search) {
            LinePoint cur = eval_line(alpha);
            ++evals;
            if (!std::isfinite(cur.phi)) {
                // Stepped over the collision barrier; pull back.
                LinePoint hi = cur;
                while (evals < opts.max_line_search && !std::isfinite(hi.phi)) {
                    hi = eval_line(0.5 * (prev.alpha + hi.alpha));
                    ++evals;
                }
                if (!std::isfinite(hi.phi)) return std::nullopt;
                cur = hi;
            }
            if (!armijo(cur) || (prev.alpha > 0.0 && cur.phi >= prev.phi)) return zoom(prev, cur);
            if (curvature(cur)) return cur;
            if (cur.dphi >= 0.0) return zoom(cur, prev);
            prev = cur;
            alpha = std::min(2.0 * alpha, 1e8);
        }
        return std::nullopt;
    };

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (res.grad_sup <= opts.grad_sup_tol) {
            res.status = OptimStatus::converged;
            return res;
        }
        two_loop();
        double dphi0 = dot(g, d);
        if (!(dphi0 < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            dphi0 = dot(g, d);
            if (!(dphi0 < 0.0)) {
                res.status = OptimStatus::converged;  // gradient numerically zero
                return res;
            }
        }

        auto accepted = wolfe_search(res.value, dphi0);
        if (!accepted && !s_hist.empty()) {
            // Retry once along steepest descent with fresh curvature.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            accepted = wolfe_search(res.value, dot(g, d));
        }
        if (!accepted) {
            res.status = OptimStatus::line_search_failed;
            return res;
        }

        // x_trial/g_trial hold the last evaluated point, which may not be the
        // accepted one; re-evaluate if they differ.
        if (x_trial.empty() || accepted->alpha == 0.0) {
            res.status = OptimStatus::line_search_failed;
            return res;
        }
        bool stale = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double want = res.x[i] + accepted->alpha * d[i];
            if (x_trial[i] != want) {
                stale = true;
                break;
            }
        }
        if (stale) {
            for (std::size_t i = 0; i < n; ++i) x_trial[i] = res.x[i] + accepted->alpha * d[i];
            accepted->phi = objective(x_trial, g_trial);
        }

        std::vector<double> s(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_trial[i] - res.x[i];
            yv[i] = g_trial[i] - g[i];
        }
        const double sy = dot(s, yv);
        res.x = x_trial;
        res.value = accepted->phi;
        g = g_trial;
        res.grad_sup = sup_norm(g);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        if (opts.on_iterate && !opts.on_iterate(res.x, res.value, res.grad_sup)) {
            res.status = OptimStatus::aborted;
            return res;
        }
    }
    res.status = res.grad_sup <= opts.grad_sup_tol ? OptimStatus::converged : OptimStatus::max_iterations;
    return res;
}

std::optional<std::vector<double>> solve_tridiag(std::span<const double> diag, std::span<const double> off,
                                                 std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    double piv = diag[0];
    if (piv == 0.0 || !std::isfinite(piv)) return std::nullopt;
    c[0] = n > 1 ? off[0] / piv : 0.0;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - off[i - 1] * c[i - 1];
        if (piv == 0.0 || !std::isfinite(piv)) return std::nullopt;
        if (i + 1 < n) c[i] = off[i] / piv;
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

std::optional<std::vector<double>> solve_cyclic_tridiag(std::span<const double> diag,
                                                        std::span<const double> off, double corner,
                                                        std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3) return std::nullopt;
    const double gamma = -diag[0];
    std::vector<double> dmod(diag.begin(), diag.end());
    dmod[0] -= gamma;
    dmod[n - 1] -= corner * corner / gamma;
    auto z = solve_tridiag(dmod, off, rhs);
    if (!z) return std::nullopt;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner;
    auto w = solve_tridiag(dmod, off, u);
    if (!w) return std::nullopt;
    // v = (1, 0, ..., 0, corner/gamma)
    const double vz = (*z)[0] + corner / gamma * (*z)[n - 1];
    const double vw = (*w)[0] + corner / gamma * (*w)[n - 1];
    const double denom = 1.0 + vw;
    if (denom == 0.0 || !std::isfinite(denom)) return std::nullopt;
    const double factor = vz / denom;
    for (std::size_t i = 0; i < n; ++i) (*z)[i] -= factor * (*w)[i];
    return z;
}

double grad_sup_norm(const ActionEvaluator& eval, const Trajectory& traj) {
    const auto g = eval.gradient(traj);
    double s = 0.0;
    for (double v : g) s = std::max(s, std::abs(v));
    return s;
}

double newton_refine(const ActionEvaluator& eval, Trajectory& traj, const NewtonRefineOptions& opts) {
    const std::size_t n = traj.values.size();
    std::vector<double> g(n), diag(n), off(n);
    double lambda = 0.0;

    auto grad_sup = [&]() {
        eval.gradient(traj, g);
        return sup_norm(g);
    };

    double gs = grad_sup();
    for (int it = 0; it < opts.max_iterations && gs > opts.grad_sup_tol; ++it) {
        eval.hessian(traj, diag, off);

        std::optional<std::vector<double>> step;
        std::size_t ndof = 0;
        std::size_t offset = 0;
        if (traj.bc == BoundaryKind::periodic) {
            ndof = n - 1;
            std::vector<double> d(diag.begin(), diag.begin() + static_cast<long>(ndof));
            std::vector<double> e(off.begin(), off.begin() + static_cast<long>(ndof) - 1);
            std::vector<double> rhs(ndof);
            for (std::size_t i = 0; i < ndof; ++i) {
                d[i] += lambda;
                rhs[i] = -g[i];
            }
            step = solve_cyclic_tridiag(d, e, off[n - 1], std::move(rhs));
        } else if (traj.bc == BoundaryKind::fixed_ends) {
            ndof = n - 2;
            offset = 1;
            std::vector<double> d(diag.begin() + 1, diag.begin() + 1 + static_cast<long>(ndof));
            std::vector<double> e(off.begin() + 1, off.begin() + static_cast<long>(ndof));
            std::vector<double> rhs(ndof);
            for (std::size_t i = 0; i < ndof; ++i) {
                d[i] += lambda;
                rhs[i] = -g[i + 1];
            }
            step = solve_tridiag(d, e, std::move(rhs));
        } else {
            ndof = n;
            std::vector<double> d(diag.begin(), diag.end());
            std::vector<double> e(off.begin(), off.end() - 1);
            std::vector<double> rhs(ndof);
            for (std::size_t i = 0; i < ndof; ++i) {
                d[i] += lambda;
                rhs[i] = -g[i];
            }
            step = solve_tridiag(d, e, std::move(rhs));
        }

        if (!step) {
            lambda = lambda == 0.0 ? 1e-6 : lambda * 100.0;
            if (lambda > 1e12) break;
            continue;
        }

        const Trajectory saved = traj;
        bool improved = false;
        double scale = 1.0;
        for (int bt = 0; bt < 6; ++bt) {
            for (std::size_t i = 0; i < ndof; ++i) traj.values[i + offset] = saved.values[i + offset] + scale * (*step)[i];
            if (traj.bc == BoundaryKind::periodic) traj.values[n - 1] = traj.values[0];
            const double gs_new = grad_sup();
            const bool ok = std::isfinite(gs_new) && gs_new < gs && (!opts.accept || opts.accept(traj));
            if (ok) {
                gs = gs_new;
                improved = true;
                lambda *= 0.25;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            traj = saved;
            gs = grad_sup();
            lambda = lambda == 0.0 ? 1e-6 : lambda * 100.0;
            if (lambda > 1e12) break;
        }
    }
    SITNIKOV_LOG_DEBUG("newton_refine: final grad sup %.3e", gs);
    return gs;
}

}  // namespace sitnikov

#include "sitnikov/periodic.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "sitnikov/log.hpp"

namespace sitnikov {

namespace {

// A zero landing exactly on a non-integer node makes nodal crossing counts
// ambiguous; the solver answers by refining once more.
bool has_exact_interior_zero(const Trajectory& traj) {
    for (std::size_t i = 1; i + 1 < traj.values.size(); ++i)
        if (traj.values[i] == 0.0 && !traj.grid.is_integer_node(i)) return true;
    return false;
}

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// DOF <-> trajectory adapters for the periodic problem: the duplicate end
// node is not a degree of freedom.
void unpack(std::span<const double> x, Trajectory& traj) {
    std::copy(x.begin(), x.end(), traj.values.begin());
    traj.values.back() = traj.values.front();
}

struct PeriodicObjective {
    const ActionEvaluator* eval;
    const PeriodicSymbols* b;
    Trajectory scratch;
    std::vector<double> grad_full;
    double mu = 0.0;
    double eps = 0.05;

    double operator()(std::span<const double> x, std::span<double> grad) {
        unpack(x, scratch);
        double value = eval->value(scratch);
        grad_full.resize(scratch.values.size());
        eval->gradient(scratch, grad_full);
        std::copy(grad_full.begin(), grad_full.end() - 1, grad.begin());
        if (mu > 0.0) {
            const int m = scratch.grid.nodes_per_unit;
            for (int k = 0; k < b->period(); ++k) {
                const std::size_t i = static_cast<std::size_t>(k) * m;
                const long n = scratch.grid.t_start + k;
                const double z = -b->at(n) * scratch.values[i] / eps;
                value += mu * softplus(z);
                grad[i] += mu * sigmoid(z) * (-b->at(n) / eps);
            }
        }
        return value;
    }
};

struct GridSolveOutcome {
    double grad_sup = 0.0;
    bool converged = false;
    bool penalty_used = false;
};

// One grid level: unconstrained descent with sign monitoring, annealed
// penalty restart on violation, then Newton refinement of the last digits.
GridSolveOutcome solve_on_grid(const KeplerDrive& drive, const PeriodicSymbols& b, Trajectory& traj,
                               const PeriodicSolveOptions& opts) {
    const ActionEvaluator eval(drive, traj.grid);
    auto symbol_at = [&b](long n) { return b.at(n); };
    auto is_admissible = [&](const Trajectory& t) { return admissible(t, symbol_at); };

    PeriodicObjective objective{&eval, &b, traj, {}, 0.0, opts.penalty_eps};
    Trajectory monitor = traj;
    bool violated = !is_admissible(traj);

    LbfgsOptions lopts;
    lopts.max_iterations = opts.max_iterations;
    lopts.grad_sup_tol = opts.grad_tol;
    lopts.on_iterate = [&](std::span<const double> x, double, double) {
        unpack(x, monitor);
        if (!is_admissible(monitor)) {
            violated = true;
            return false;
        }
        return true;
    };

    std::vector<double> x0(traj.values.begin(), traj.values.end() - 1);
    LbfgsResult result;
    if (!violated) result = lbfgs_minimize(std::ref(objective), x0, lopts);

    GridSolveOutcome outcome;
    if (violated) {
        outcome.penalty_used = true;
        SITNIKOV_LOG_INFO("periodic solve: admissibility violated, restarting with annealed penalty");
        // Restart from the canonical interior representative of the class;
        // the hinge penalty keeps the iterates from hopping back out.
        const Trajectory fresh = seed_periodic(b, traj.grid, opts.seed_amplitude);
        std::vector<double> x(fresh.values.begin(), fresh.values.end() - 1);
        double mu = opts.penalty_mu0;
        for (int round = 0; round <= opts.penalty_rounds; ++round) {
            objective.mu = round == opts.penalty_rounds ? 0.0 : mu;
            violated = false;
            LbfgsOptions popts = lopts;
            if (objective.mu > 0.0) popts.on_iterate = nullptr;  // barrier active; let it run
            result = lbfgs_minimize(std::ref(objective), x, popts);
            x = result.x;
            mu *= 0.25;
        }
        unpack(result.x, traj);
        if (!is_admissible(traj)) {
            SITNIKOV_LOG_ERROR("periodic solve: penalty annealing failed to restore admissibility");
            outcome.grad_sup = grad_sup_norm(eval, traj);
            outcome.converged = false;
            return outcome;
        }
    } else {
        unpack(result.x, traj);
    }

    NewtonRefineOptions nopts;
    nopts.grad_sup_tol = std::min(opts.grad_tol * 1e-2, 1e-12);
    nopts.accept = is_admissible;
    outcome.grad_sup = newton_refine(eval, traj, nopts);
    outcome.converged = outcome.grad_sup <= opts.grad_tol && is_admissible(traj);
    return outcome;
}

}  // namespace

Trajectory seed_periodic(const PeriodicSymbols& b, Grid grid, double amplitude) {
    grid.validate();
    if (grid.span() != b.period())
        throw std::invalid_argument("seed_periodic: grid span must equal the symbol period");
    if (!(amplitude > 0.0)) throw std::invalid_argument("seed_periodic: amplitude must be positive");
    const int m = grid.nodes_per_unit;
    Trajectory traj{grid, BoundaryKind::periodic, std::vector<double>(grid.node_count())};
    for (long k = 0; k < grid.span(); ++k) {
        const double v0 = b.at(grid.t_start + k) * amplitude;
        const double v1 = b.at(grid.t_start + k + 1) * amplitude;
        for (int j = 0; j < m; ++j) {
            const double s = static_cast<double>(j) / m;
            const double blend = s * s * (3.0 - 2.0 * s);  // single crossing at s = 1/2 when signs flip
            traj.values[static_cast<std::size_t>(k) * m + j] = v0 + (v1 - v0) * blend;
        }
    }
    traj.values.back() = traj.values.front();
    return traj;
}

Trajectory refine_double(const Trajectory& traj) {
    Grid fine = traj.grid;
    fine.nodes_per_unit *= 2;
    Trajectory out{fine, traj.bc, std::vector<double>(fine.node_count())};
    const std::size_t n = traj.values.size();
    for (std::size_t i = 0; i < n; ++i) out.values[2 * i] = traj.values[i];
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.values[2 * i + 1] = 0.5 * (traj.values[i] + traj.values[i + 1]);
    return out;
}

PeriodicOrbit minimize_periodic(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid,
                                const PeriodicSolveOptions& opts) {
    grid.validate();
    if (grid.span() != b.period())
        throw std::invalid_argument("minimize_periodic: grid span must equal the symbol period");

    Trajectory traj = opts.seed ? *opts.seed : seed_periodic(b, grid, opts.seed_amplitude);
    traj.validate();
    if (traj.bc != BoundaryKind::periodic)
        throw std::invalid_argument("minimize_periodic: seed must carry periodic bc");

    PeriodicOrbit orbit{b, traj, 0.0, 0.0, 0.0, false, false, false, opts.seed_amplitude};
    double prev_rho = 0.0;
    for (int level = 0; level <= opts.refine_levels; ++level) {
        if (level > 0) orbit.traj = refine_double(orbit.traj);
        const auto outcome = solve_on_grid(drive, b, orbit.traj, opts);
        const ActionEvaluator eval(drive, orbit.traj.grid);
        orbit.rho_hat = eval.value(orbit.traj);
        orbit.grad_sup = outcome.grad_sup;
        orbit.converged = outcome.converged;
        orbit.penalty_used = orbit.penalty_used || outcome.penalty_used;
        SITNIKOV_LOG_INFO("periodic %s level %d (M=%d): rho=%.12g grad=%.3e", b.word().str().c_str(), level,
                          orbit.traj.grid.nodes_per_unit, orbit.rho_hat, orbit.grad_sup);
        if (level > 0 && std::abs(orbit.rho_hat - prev_rho) <= opts.rho_tol) break;
        prev_rho = orbit.rho_hat;
    }
    if (has_exact_interior_zero(orbit.traj)) {
        SITNIKOV_LOG_INFO("periodic %s: node-hit zero flagged, re-running at doubled density",
                          b.word().str().c_str());
        orbit.traj = refine_double(orbit.traj);
        const auto outcome = solve_on_grid(drive, b, orbit.traj, opts);
        orbit.rho_hat = ActionEvaluator(drive, orbit.traj.grid).value(orbit.traj);
        orbit.grad_sup = outcome.grad_sup;
        orbit.converged = outcome.converged;
    }
    orbit.crossings_ok = zero_crossings(orbit.traj, [&b](long n) { return b.at(n); }).matches;
    orbit.converged = orbit.converged && orbit.crossings_ok;
    const ActionEvaluator eval(drive, orbit.traj.grid);
    orbit.el_residual_sup = el_residual_sup(eval, orbit.traj);
    return orbit;
}

MultistartResult minimize_periodic_multistart(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid,
                                              const PeriodicSolveOptions& opts,
                                              const MultistartOptions& multi) {
    if (multi.seed_amplitudes.empty())
        throw std::invalid_argument("minimize_periodic_multistart: no seed amplitudes");
    MultistartResult out;
    out.orbits.resize(multi.seed_amplitudes.size(),
                      PeriodicOrbit{b, Trajectory{}, 0.0, 0.0, 0.0, false, false, false, 0.0});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= multi.seed_amplitudes.size()) return;
            PeriodicSolveOptions o = opts;
            o.seed_amplitude = multi.seed_amplitudes[k];
            o.seed.reset();
            out.orbits[k] = minimize_periodic(drive, b, grid, o);
        }
    };
    const int jobs = std::max(1, std::min<int>(multi.jobs, static_cast<int>(multi.seed_amplitudes.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    out.best = 0;
    bool any = false;
    for (std::size_t k = 0; k < out.orbits.size(); ++k) {
        if (!out.orbits[k].converged) continue;
        if (!any || out.orbits[k].rho_hat < out.orbits[out.best].rho_hat) {
            out.best = k;
            any = true;
        }
    }
    if (!any) {
        SITNIKOV_LOG_ERROR("multistart: no start converged for %s", b.word().str().c_str());
        for (std::size_t k = 1; k < out.orbits.size(); ++k)
            if (out.orbits[k].rho_hat < out.orbits[out.best].rho_hat) out.best = k;
    }
    out.rho_hat = out.orbits[out.best].rho_hat;
    return out;
}

namespace {

double reversal_defect(const Trajectory& traj) {
    const std::size_t n = traj.values.size();
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(traj.values[j] - traj.values[n - 1 - j]));
    return d;
}

}  // namespace

const PeriodicOrbit& select_extremal(const MultistartResult& result, Extremal which, double rho_tol) {
    const PeriodicOrbit* pick = nullptr;
    for (const auto& orbit : result.orbits) {
        if (!orbit.converged || orbit.rho_hat > result.rho_hat + rho_tol) continue;
        if (pick == nullptr) {
            pick = &orbit;
            continue;
        }
        const double cur = orbit.traj.values[0];
        const double ref = pick->traj.values[0];
        const bool better = which == Extremal::maximal ? cur > ref + 1e-9 : cur < ref - 1e-9;
        if (better) {
            pick = &orbit;
        } else if (std::abs(cur - ref) <= 1e-9 &&
                   reversal_defect(orbit.traj) < reversal_defect(pick->traj)) {
            pick = &orbit;
        }
    }
    if (pick == nullptr) throw std::runtime_error("select_extremal: no converged orbit within tolerance");
    return *pick;
}

std::optional<double> RhoCache::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void RhoCache::store(const std::string& key, double value) {
    std::lock_guard<std::mutex> lock(mutex_);
    values_[key] = value;
}

std::string RhoCache::key_for(const PeriodicSymbols& b, Grid grid, const PeriodicSolveOptions& opts) {
    std::ostringstream os;
    os << b.word().str() << '|' << grid.nodes_per_unit << '|' << grid.t_start << '|' << grid.t_end << '|'
       << opts.refine_levels << '|' << opts.grad_tol << '|' << opts.rho_tol;
    return os.str();
}

double rho(const KeplerDrive& drive, const PeriodicSymbols& b, Grid grid, const PeriodicSolveOptions& opts,
           const MultistartOptions& multi, RhoCache* cache) {
    const std::string key = cache ? RhoCache::key_for(b, grid, opts) : std::string{};
    if (cache) {
        if (auto hit = cache->lookup(key)) return *hit;
    }
    const auto result = minimize_periodic_multistart(drive, b, grid, opts, multi);
    if (!result.orbits[result.best].converged)
        throw std::runtime_error("rho: no multistart run converged for " + b.word().str());
    if (cache) cache->store(key, result.rho_hat);
    return result.rho_hat;
}

}  // namespace sitnikov

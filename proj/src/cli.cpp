#include "sitnikov/cli.hpp"

#include <algorithm>
#include <cstdio>

#include <CLI11.hpp>

#include "sitnikov/io.hpp"
#include "sitnikov/log.hpp"
#include "sitnikov/verify.hpp"

namespace sitnikov::cli {

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kNotConverged = 3;

void require_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw std::invalid_argument(std::string("tolerance misconfiguration: ") + name +
                                    " must be positive");
}

struct PeriodicArgs {
    std::string symbols;
    int nodes = 64;
    int refine = 2;
    double grad_tol = 1e-10;
    double rho_tol = 1e-8;
    std::vector<double> seeds = {0.25, 0.5, 1.0, 1.5, 2.0};
    int jobs = 1;
    std::string out, csv, svg;
};

int run_periodic(const PeriodicArgs& a) {
    require_positive(a.grad_tol, "--grad-tol");
    require_positive(a.rho_tol, "--rho-tol");
    const KeplerDrive drive;
    const auto b = PeriodicSymbols::parse(a.symbols);
    const Grid grid{a.nodes, 0, b.period()};
    PeriodicSolveOptions opts;
    opts.grad_tol = a.grad_tol;
    opts.rho_tol = a.rho_tol;
    opts.refine_levels = a.refine;
    MultistartOptions multi;
    multi.seed_amplitudes = a.seeds;
    multi.jobs = a.jobs;

    const auto result = minimize_periodic_multistart(drive, b, grid, opts, multi);
    const auto& best = result.orbits[result.best];
    std::printf("rho_hat = %.17g  (grad_sup %.3e, M %d, ordering %s)\n", best.rho_hat, best.grad_sup,
                best.traj.grid.nodes_per_unit,
                to_string(ordering_verdict(result.orbits, a.rho_tol, 1e-7)));

    if (!a.out.empty()) io::write_atomic(a.out, io::to_json(best).dump(2) + "\n");
    if (!a.csv.empty()) io::write_atomic(a.csv, io::trajectory_csv(best.traj));
    if (!a.svg.empty()) io::write_atomic(a.svg, io::svg_periodic(drive, best));
    if (!best.converged) {
        SITNIKOV_LOG_ERROR("periodic: best start did not converge (grad_sup %.3e)", best.grad_sup);
        return kNotConverged;
    }
    return kOk;
}

struct ConnectArgs {
    std::string spec_path;
    int nodes = 64;
    double tail_tol = 1e-6;
    double j_tol = 1e-8;
    int max_windows = 20;
    double grad_tol = 1e-10;
    int jobs = 1;
    std::string out, csv, svg;
};

int run_connect(const ConnectArgs& a) {
    require_positive(a.tail_tol, "--tail-tol");
    require_positive(a.j_tol, "--j-tol");
    require_positive(a.grad_tol, "--grad-tol");
    const KeplerDrive drive;
    const auto doc = io::json::parse(io::read_file(a.spec_path));
    const auto spec = io::connection_spec_from_json(doc);

    ConnectionOptions opts;
    opts.nodes_per_unit = a.nodes;
    opts.tail_tol = a.tail_tol;
    opts.j_tol = a.j_tol;
    opts.max_windows = a.max_windows;
    opts.grad_tol = a.grad_tol;
    opts.multistart.jobs = a.jobs;

    const auto problem = build_connection_problem(drive, spec, opts);
    const auto orbit = minimize_connection(drive, problem, opts);
    std::printf("j_hat = %.17g  window [%ld, %ld]  extensions %d  %s\n", orbit.j_hat, orbit.t_minus,
                orbit.t_plus, orbit.windows_used, orbit.converged ? "converged" : "NOT CONVERGED");

    if (!a.out.empty()) io::write_atomic(a.out, io::to_json(problem, orbit).dump(2) + "\n");
    if (!a.csv.empty()) io::write_atomic(a.csv, io::trajectory_csv(orbit.traj));
    if (!a.svg.empty()) io::write_atomic(a.svg, io::svg_connection(drive, problem, orbit));
    return orbit.converged ? kOk : kNotConverged;
}

struct VerifyArgs {
    std::string in_path;
    std::string against_path;
    std::string json_out;
    int samples = 1000;
    int scaling_k = 0;
};

int run_verify(const VerifyArgs& a) {
    const KeplerDrive drive;
    const auto doc = io::json::parse(io::read_file(a.in_path));
    const std::string kind = doc.value("kind", "");

    VerificationReport report;
    if (kind == "periodic_orbit") {
        const auto orbit = io::periodic_orbit_from_json(doc);
        VerifyOptions vopts;
        vopts.lower_bound_samples = a.samples;
        vopts.scaling_k = a.scaling_k;
        report = verify_periodic(drive, orbit, Tolerances{}, vopts);
    } else if (kind == "connecting_orbit") {
        auto [problem, orbit] = io::connection_from_json(doc);
        if (!a.against_path.empty()) {
            const auto expected =
                io::connection_spec_from_json(io::json::parse(io::read_file(a.against_path)));
            if (!(expected == orbit.spec)) {
                std::printf("FAIL  spec mismatch against %s\n", a.against_path.c_str());
                return kNotConverged;
            }
        }
        report = verify_connection(drive, problem, orbit);
    } else {
        throw std::invalid_argument("verify: unrecognized document kind '" + kind + "'");
    }

    std::fputs(report.summary().c_str(), stdout);
    std::printf("%s\n", report.all_pass() ? "all checks passed" : "verification FAILED");
    if (!a.json_out.empty()) io::write_atomic(a.json_out, io::to_json(report).dump(2) + "\n");
    return report.all_pass() ? kOk : kNotConverged;
}

struct RhoArgs {
    std::string symbols;
    int nodes = 64;
    int refine = 2;
    int jobs = 1;
    std::string out;
};

int run_rho(const RhoArgs& a) {
    const KeplerDrive drive;
    const auto b = PeriodicSymbols::parse(a.symbols);
    const Grid grid{a.nodes, 0, b.period()};
    PeriodicSolveOptions opts;
    opts.refine_levels = a.refine;
    MultistartOptions multi;
    multi.jobs = a.jobs;
    RhoCache cache;
    const double value = rho(drive, b, grid, opts, multi, &cache);
    std::printf("rho(%s) = %.17g\n", b.word().str().c_str(), value);
    if (!a.out.empty()) {
        io::json j{{"symbols", b.word().str()}, {"grid", io::to_json(grid)}, {"rho_hat", value}};
        io::write_atomic(a.out, j.dump(2) + "\n");
    }
    return kOk;
}

struct SampleArgs {
    double step = 0.01;
    double from = 0.0;
    double to = 2.0;
    std::string out;
};

int run_sample(const SampleArgs& a) {
    const KeplerDrive drive;
    const std::string csv = io::sample_x_csv(drive, a.from, a.to, a.step);
    if (a.out.empty())
        std::fputs(csv.c_str(), stdout);
    else
        io::write_atomic(a.out, csv);
    return kOk;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"variational orbits of the planar Sitnikov problem"};
    app.require_subcommand(1);

    PeriodicArgs pa;
    auto* periodic_cmd = app.add_subcommand("periodic", "minimize the action over an N-periodic class");
    periodic_cmd->add_option("--symbols", pa.symbols, "word over {+,-}, e.g. \"+++---++\"")->required();
    periodic_cmd->add_option("--nodes", pa.nodes, "grid nodes per unit interval");
    periodic_cmd->add_option("--refine", pa.refine, "grid-doubling continuation levels");
    periodic_cmd->add_option("--grad-tol", pa.grad_tol, "gradient sup-norm tolerance");
    periodic_cmd->add_option("--rho-tol", pa.rho_tol, "continuation rho tolerance");
    periodic_cmd->add_option("--seeds", pa.seeds, "multistart seed amplitudes");
    periodic_cmd->add_option("--jobs", pa.jobs, "parallel multistart workers");
    periodic_cmd->add_option("--out", pa.out, "orbit JSON output path");
    periodic_cmd->add_option("--csv", pa.csv, "trajectory CSV output path");
    periodic_cmd->add_option("--svg", pa.svg, "plot output path");

    ConnectArgs ca;
    auto* connect_cmd = app.add_subcommand("connect", "minimize the renormalized action over a window");
    connect_cmd->add_option("--spec", ca.spec_path, "connection spec JSON")->required();
    connect_cmd->add_option("--nodes", ca.nodes, "grid nodes per unit interval");
    connect_cmd->add_option("--tail-tol", ca.tail_tol, "outer tail residual tolerance");
    connect_cmd->add_option("--j-tol", ca.j_tol, "j change tolerance between extensions");
    connect_cmd->add_option("--max-windows", ca.max_windows, "window extension budget");
    connect_cmd->add_option("--grad-tol", ca.grad_tol, "gradient sup-norm tolerance");
    connect_cmd->add_option("--jobs", ca.jobs, "parallel multistart workers for the gamma solves");
    connect_cmd->add_option("--out", ca.out, "orbit JSON output path");
    connect_cmd->add_option("--csv", ca.csv, "trajectory CSV output path");
    connect_cmd->add_option("--svg", ca.svg, "plot output path");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "run the property checks on a produced orbit");
    verify_cmd->add_option("--in", va.in_path, "orbit JSON to verify")->required();
    verify_cmd->add_option("--against", va.against_path, "connection spec JSON to cross-check");
    verify_cmd->add_option("--json", va.json_out, "report JSON output path");
    verify_cmd->add_option("--samples", va.samples, "lower-bound sample count");
    verify_cmd->add_option("--scaling-k", va.scaling_k,
                           "also run the action-scaling check with this multiple (periodic orbits)");

    RhoArgs ra;
    auto* rho_cmd = app.add_subcommand("rho", "multistart minimum of the action over a periodic class");
    rho_cmd->add_option("--symbols", ra.symbols, "word over {+,-}")->required();
    rho_cmd->add_option("--nodes", ra.nodes, "grid nodes per unit interval");
    rho_cmd->add_option("--refine", ra.refine, "grid-doubling continuation levels");
    rho_cmd->add_option("--jobs", ra.jobs, "parallel multistart workers");
    rho_cmd->add_option("--out", ra.out, "JSON output path");

    SampleArgs sa;
    auto* sample_cmd = app.add_subcommand("sample-x", "emit CSV samples of the Kepler drive");
    sample_cmd->add_option("--step", sa.step, "sample step");
    sample_cmd->add_option("--from", sa.from, "start time");
    sample_cmd->add_option("--to", sa.to, "end time");
    sample_cmd->add_option("--out", sa.out, "CSV output path (stdout when omitted)");

    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidationError;
    }

    try {
        if (periodic_cmd->parsed()) return run_periodic(pa);
        if (connect_cmd->parsed()) return run_connect(ca);
        if (verify_cmd->parsed()) return run_verify(va);
        if (rho_cmd->parsed()) return run_rho(ra);
        if (sample_cmd->parsed()) return run_sample(sa);
    } catch (const std::invalid_argument& e) {
        SITNIKOV_LOG_ERROR("%s", e.what());
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const nlohmann::json::exception& e) {
        SITNIKOV_LOG_ERROR("%s", e.what());
        std::fprintf(stderr, "error: malformed document: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        SITNIKOV_LOG_ERROR("%s", e.what());
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNotConverged;
    }
    return kValidationError;
}

}  // namespace sitnikov::cli

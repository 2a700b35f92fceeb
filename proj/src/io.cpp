#include "sitnikov/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sitnikov::io {

namespace {

const char* bc_name(BoundaryKind bc) {
    switch (bc) {
        case BoundaryKind::periodic: return "periodic";
        case BoundaryKind::fixed_ends: return "fixed_ends";
        case BoundaryKind::free_ends: return "free";
    }
    return "?";
}

BoundaryKind bc_from_name(const std::string& s) {
    if (s == "periodic") return BoundaryKind::periodic;
    if (s == "fixed_ends") return BoundaryKind::fixed_ends;
    if (s == "free") return BoundaryKind::free_ends;
    throw std::invalid_argument("unknown boundary kind: " + s);
}

const char* extremal_name(Extremal e) { return e == Extremal::maximal ? "maximal" : "minimal"; }

Extremal extremal_from_name(const std::string& s) {
    if (s == "maximal") return Extremal::maximal;
    if (s == "minimal") return Extremal::minimal;
    throw std::invalid_argument("unknown extremal orientation: " + s);
}

}  // namespace

json to_json(const Grid& grid) {
    return json{{"nodes_per_unit", grid.nodes_per_unit}, {"t_start", grid.t_start}, {"t_end", grid.t_end}};
}

Grid grid_from_json(const json& j) {
    Grid g{j.at("nodes_per_unit").get<int>(), j.at("t_start").get<long>(), j.at("t_end").get<long>()};
    g.validate();
    return g;
}

json to_json(const Trajectory& traj) {
    return json{{"grid", to_json(traj.grid)}, {"bc", bc_name(traj.bc)}, {"values", traj.values}};
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory traj{grid_from_json(j.at("grid")), bc_from_name(j.at("bc").get<std::string>()),
                    j.at("values").get<std::vector<double>>()};
    traj.validate();
    return traj;
}

json to_json(const ConnectionSpec& spec) {
    return json{{"b_minus", spec.b_minus.word().str()},
                {"b_plus", spec.b_plus.word().str()},
                {"middle", spec.middle.str()},
                {"k_minus", spec.k_minus},
                {"k_plus", spec.k_plus}};
}

ConnectionSpec connection_spec_from_json(const json& j) {
    auto b_minus = PeriodicSymbols::parse(j.at("b_minus").get<std::string>());
    auto b_plus = PeriodicSymbols::parse(j.at("b_plus").get<std::string>());
    auto middle = SymbolWord::parse(j.at("middle").get<std::string>());
    const long k_minus = j.contains("k_minus") ? j.at("k_minus").get<long>() : 0;
    auto spec = ConnectionSpec::make(std::move(b_minus), std::move(b_plus), std::move(middle), k_minus);
    if (j.contains("k_plus") && j.at("k_plus").get<long>() != spec.k_plus)
        throw std::invalid_argument("connection spec: stored k_plus disagrees with the canonical offset " +
                                    std::to_string(spec.k_plus));
    if (j.contains("k_minus") && j.at("k_minus").get<long>() != spec.k_minus)
        throw std::invalid_argument("connection spec: stored k_minus disagrees with the canonical offset " +
                                    std::to_string(spec.k_minus));
    return spec;
}

json to_json(const PeriodicOrbit& orbit) {
    json j{{"kind", "periodic_orbit"}, {"symbols", orbit.symbols.word().str()}};
    j["trajectory"] = to_json(orbit.traj);
    j["rho_hat"] = orbit.rho_hat;
    j["grad_sup"] = orbit.grad_sup;
    j["el_residual_sup"] = orbit.el_residual_sup;
    j["converged"] = orbit.converged;
    j["crossings_ok"] = orbit.crossings_ok;
    j["penalty_used"] = orbit.penalty_used;
    j["seed_amplitude"] = orbit.seed_amplitude;
    return j;
}

PeriodicOrbit periodic_orbit_from_json(const json& j) {
    if (j.value("kind", "") != "periodic_orbit")
        throw std::invalid_argument("expected a periodic_orbit document");
    PeriodicOrbit orbit{PeriodicSymbols::parse(j.at("symbols").get<std::string>()),
                        trajectory_from_json(j.at("trajectory")),
                        j.at("rho_hat").get<double>(),
                        j.at("grad_sup").get<double>(),
                        j.at("el_residual_sup").get<double>(),
                        j.at("converged").get<bool>(),
                        j.value("crossings_ok", true),
                        j.value("penalty_used", false),
                        j.value("seed_amplitude", 0.0)};
    return orbit;
}

json to_json(const ConnectionProblem& problem, const ConnectingOrbit& orbit) {
    json j{{"kind", "connecting_orbit"}};
    j["spec"] = to_json(orbit.spec);
    j["window"] = json{{"t_minus", orbit.t_minus}, {"t_plus", orbit.t_plus}};
    j["trajectory"] = to_json(orbit.traj);
    j["j_hat"] = orbit.j_hat;
    j["j_min_seen"] = orbit.j_min_seen;
    j["defects"] = orbit.defects;
    j["tail_left"] = orbit.tail_left;
    j["tail_right"] = orbit.tail_right;
    j["grad_sup"] = orbit.grad_sup;
    j["el_residual_sup"] = orbit.el_residual_sup;
    j["converged"] = orbit.converged;
    j["crossings_ok"] = orbit.crossings_ok;
    j["windows_used"] = orbit.windows_used;
    json log = json::array();
    for (const auto& e : orbit.log)
        log.push_back(json{{"t_minus", e.t_minus},
                           {"t_plus", e.t_plus},
                           {"j_hat", e.j_hat},
                           {"outer_tail_max", e.outer_tail_max},
                           {"grad_sup", e.grad_sup}});
    j["log"] = log;
    j["rho_minus"] = problem.rho_minus;
    j["rho_plus"] = problem.rho_plus;
    j["orient_minus"] = extremal_name(problem.orient_minus);
    j["orient_plus"] = extremal_name(problem.orient_plus);
    j["nodes_per_unit"] = problem.nodes_per_unit;
    j["gamma_minus"] = to_json(problem.gamma_minus);
    j["gamma_plus"] = to_json(problem.gamma_plus);
    return j;
}

std::pair<ConnectionProblem, ConnectingOrbit> connection_from_json(const json& j) {
    if (j.value("kind", "") != "connecting_orbit")
        throw std::invalid_argument("expected a connecting_orbit document");
    auto spec = connection_spec_from_json(j.at("spec"));
    ConnectionProblem problem{AssembledSymbols(spec),
                              periodic_orbit_from_json(j.at("gamma_minus")),
                              periodic_orbit_from_json(j.at("gamma_plus")),
                              j.at("rho_minus").get<double>(),
                              j.at("rho_plus").get<double>(),
                              extremal_from_name(j.at("orient_minus").get<std::string>()),
                              extremal_from_name(j.at("orient_plus").get<std::string>()),
                              j.at("nodes_per_unit").get<int>()};
    ConnectingOrbit orbit(std::move(spec));
    orbit.traj = trajectory_from_json(j.at("trajectory"));
    orbit.j_hat = j.at("j_hat").get<double>();
    orbit.j_min_seen = j.at("j_min_seen").get<double>();
    orbit.defects = j.at("defects").get<std::vector<double>>();
    orbit.tail_left = j.at("tail_left").get<std::vector<double>>();
    orbit.tail_right = j.at("tail_right").get<std::vector<double>>();
    orbit.grad_sup = j.at("grad_sup").get<double>();
    orbit.el_residual_sup = j.at("el_residual_sup").get<double>();
    orbit.t_minus = j.at("window").at("t_minus").get<long>();
    orbit.t_plus = j.at("window").at("t_plus").get<long>();
    orbit.converged = j.at("converged").get<bool>();
    orbit.crossings_ok = j.value("crossings_ok", true);
    orbit.windows_used = j.at("windows_used").get<int>();
    for (const auto& e : j.at("log"))
        orbit.log.push_back({e.at("t_minus").get<long>(), e.at("t_plus").get<long>(),
                             e.at("j_hat").get<double>(), e.at("outer_tail_max").get<double>(),
                             e.at("grad_sup").get<double>()});
    return {std::move(problem), std::move(orbit)};
}

json to_json(const VerificationReport& report) {
    json j{{"kind", "verification_report"}, {"orbit_kind", report.kind}};
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back(json{{"name", c.name},
                              {"applicable", c.applicable},
                              {"pass", c.pass},
                              {"value", c.value},
                              {"detail", c.detail}});
    j["checks"] = checks;
    j["crossing_counts"] = report.crossings.counts;
    j["crossing_expected"] = report.crossings.expected;
    j["crossing_first_interval"] = report.crossings.first_interval;
    j["crossing_node_hit_flagged"] = report.crossings.node_hit_flagged;
    j["ordering_verdict"] = to_string(report.ordering);
    j["tail_decay_left"] = report.tail_decay_left;
    j["tail_decay_right"] = report.tail_decay_right;
    j["all_pass"] = report.all_pass();
    return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,y\n";
    char buf[80];
    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", traj.grid.time_at(i), traj.values[i]);
        out += buf;
    }
    return out;
}

std::string sample_x_csv(const KeplerDrive& drive, double t_from, double t_to, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sample_x_csv: step must be positive");
    if (!(t_to >= t_from)) throw std::invalid_argument("sample_x_csv: empty range");
    std::string out = "t,x,xdot\n";
    char buf[120];
    const long count = static_cast<long>(std::floor((t_to - t_from) / step + 1e-9));
    for (long k = 0; k <= count; ++k) {
        const double t = t_from + static_cast<double>(k) * step;
        const double x = drive.x_of_t(t);
        if (t == std::floor(t)) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,\n", t, x);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, x, drive.xdot_of_t(t));
        }
        out += buf;
    }
    return out;
}

namespace {

struct SvgCanvas {
    double width = 960.0, height = 400.0, margin = 42.0;
    double t0 = 0.0, t1 = 1.0, ymax = 1.0;

    double px(double t) const { return margin + (t - t0) / (t1 - t0) * (width - 2 * margin); }
    double py(double y) const { return height / 2.0 - y / ymax * (height / 2.0 - margin); }

    std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* style) const {
        std::string s = "  <polyline fill=\"none\" " + std::string(style) + " points=\"";
        char buf[48];
        for (const auto& [t, y] : pts) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(t), py(y));
            s += buf;
        }
        s += "\"/>\n";
        return s;
    }
};

std::string svg_head(const SvgCanvas& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  c.width, c.height, c.width, c.height);
    std::string s = buf;
    s += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#999\"/>\n",
                  c.px(c.t0), c.py(0.0), c.px(c.t1), c.py(0.0));
    s += buf;
    return s;
}

std::vector<std::pair<double, double>> drive_curve(const KeplerDrive& drive, double t0, double t1,
                                                   double sign) {
    std::vector<std::pair<double, double>> pts;
    const int samples = 800;
    for (int k = 0; k <= samples; ++k) {
        const double t = t0 + (t1 - t0) * k / samples;
        pts.emplace_back(t, sign * drive.x_of_t(t));
    }
    return pts;
}

std::vector<std::pair<double, double>> traj_curve(const Trajectory& traj, std::size_t stride) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < traj.values.size(); i += stride)
        pts.emplace_back(traj.grid.time_at(i), traj.values[i]);
    if ((traj.values.size() - 1) % stride != 0)
        pts.emplace_back(traj.grid.time_at(traj.values.size() - 1), traj.values.back());
    return pts;
}

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

std::string svg_periodic(const KeplerDrive& drive, const PeriodicOrbit& orbit) {
    SvgCanvas c;
    c.t0 = static_cast<double>(orbit.traj.grid.t_start);
    c.t1 = static_cast<double>(orbit.traj.grid.t_end);
    c.ymax = 1.15 * std::max(sup_abs(orbit.traj.values), 2.0 * drive.amplitude());
    std::string s = svg_head(c);
    s += c.polyline(drive_curve(drive, c.t0, c.t1, +1.0), "stroke=\"#c44\" stroke-width=\"1\"");
    s += c.polyline(drive_curve(drive, c.t0, c.t1, -1.0), "stroke=\"#c44\" stroke-width=\"1\"");
    const std::size_t stride = std::max<std::size_t>(1, orbit.traj.values.size() / 2000);
    s += c.polyline(traj_curve(orbit.traj, stride), "stroke=\"#226\" stroke-width=\"1.5\"");
    s += "</svg>\n";
    return s;
}

std::string svg_connection(const KeplerDrive& drive, const ConnectionProblem& problem,
                           const ConnectingOrbit& orbit) {
    SvgCanvas c;
    c.t0 = static_cast<double>(orbit.t_minus);
    c.t1 = static_cast<double>(orbit.t_plus);
    c.ymax = 1.15 * std::max({sup_abs(orbit.traj.values), sup_abs(problem.gamma_minus.traj.values),
                              sup_abs(problem.gamma_plus.traj.values)});
    std::string s = svg_head(c);
    s += c.polyline(drive_curve(drive, c.t0, c.t1, +1.0), "stroke=\"#c44\" stroke-width=\"0.8\"");
    s += c.polyline(drive_curve(drive, c.t0, c.t1, -1.0), "stroke=\"#c44\" stroke-width=\"0.8\"");

    const int m = orbit.traj.grid.nodes_per_unit;
    const std::size_t n = orbit.traj.values.size();
    std::vector<std::pair<double, double>> gm, gp;
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
        const long abs_node = orbit.t_minus * m + static_cast<long>(i);
        const double t = orbit.traj.grid.time_at(i);
        gm.emplace_back(t, gamma_value(problem.gamma_minus, abs_node));
        gp.emplace_back(t, gamma_value(problem.gamma_plus, abs_node));
    }
    s += c.polyline(gm, "stroke=\"#2a2\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    s += c.polyline(gp, "stroke=\"#a2a\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    s += c.polyline(traj_curve(orbit.traj, stride), "stroke=\"#226\" stroke-width=\"1.5\"");
    s += "</svg>\n";
    return s;
}

}  // namespace sitnikov::io

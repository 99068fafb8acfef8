// commands.cpp — Orchestration of the reservoir, resonance and dynamics pipelines

#include "lambda_dyn/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "lambda_dyn/acceptance.hpp"
#include "lambda_dyn/dynamics.hpp"
#include "lambda_dyn/errors.hpp"
#include "lambda_dyn/resonance.hpp"

namespace lambda_dyn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTraceWarning = 1e-6;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json table_json(const io::Table& t) {
    return {{"columns", t.header}, {"rows", t.rows}};
}

json timescales_json(const TimescaleReport& r) {
    return {{"t1", r.t1}, {"t2", r.t2}, {"ratio", r.ratio}, {"fast_rate", r.fast_rate},
            {"slow_rate", r.slow_rate}, {"regime_ok", r.regime_ok}};
}

ReservoirConstants constants_for(const ScenarioConfig& c, RunReport& report) {
    Stopwatch sw;
    auto rc = reservoir_constants(c.reservoir, c.system.beta, c.system.gap());
    report.add_timing("reservoir_constants", sw.seconds());
    report.set_field("timescales", timescales_json(timescale_report(c.system, rc)));
    return rc;
}

} // namespace

void RunReport::warn(const std::string& message) {
    warnings_.push_back(message);
    err_ << "warning: " << message << '\n';
}

void RunReport::add_file(const fs::path& path, std::size_t rows) {
    files_.emplace_back(path.string(), rows);
}

void RunReport::add_timing(const std::string& stage, double seconds) { timings_[stage] = seconds; }

void RunReport::set_config(const ScenarioConfig& config) {
    config_ = config_to_json(config);
    extra_["regime_ok"] = config.system.regime_ok();
}

void RunReport::set_field(const std::string& key, json value) { extra_[key] = std::move(value); }

json RunReport::to_json() const {
    json files = json::array();
    for (const auto& [path, rows] : files_) files.push_back({{"path", path}, {"rows", rows}});
    json j = {{"command", command_}, {"config", config_}, {"timings", timings_},
              {"warnings", warnings_}, {"files", files}};
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    return j;
}

unsigned worker_count(unsigned configured) {
    unsigned n = configured ? configured : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LAMBDA_DYN_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) {
            throw ConfigError(std::string("LAMBDA_DYN_THREADS: expected a positive integer, got '") + env + "'");
        }
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void write_table(const fs::path& dir, const std::string& stem, const io::Table& table,
                 const std::string& format, RunReport& report) {
    const fs::path path = dir / (stem + (format == "json" ? ".json" : ".csv"));
    if (format == "json") {
        io::write_json(path, table_json(table));
    } else {
        io::write_csv(path, table);
    }
    report.add_file(path, table.rows.size());
}

std::pair<int, int> parse_term(const std::string& text) {
    const auto comma = text.find(',');
    int j = 0, s = 0;
    try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        std::size_t used = 0;
        j = std::stoi(text.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("junk");
        const std::string rest = text.substr(comma + 1);
        s = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
        throw ConfigError("--term: expected 'j,s', got '" + text + "'");
    }
    if (j < -1 || j > 1) throw ConfigError("--term: sector j must be -1, 0 or 1");
    if (s < 1 || s > sector_size(j)) {
        throw ConfigError("--term: index s must be in 1.." + std::to_string(sector_size(j)) + " for sector " +
                          std::to_string(j));
    }
    return {j, s};
}

void cmd_resonances(const ScenarioConfig& c, RunReport& report) {
    const fs::path dir = c.run.out;
    const auto rc = constants_for(c, report);
    Stopwatch sw;
    const auto set = resonance_set(c.system, rc);
    const auto pert = perturbative_energies<double>(c.system, rc);
    report.add_timing("resonances", sw.seconds());
    if (!set.labels_matched) report.warn("sector-0 labels fell back to ascending Im eps");

    if (c.run.format == "json") {
        const fs::path path = dir / "resonances.json";
        io::write_json(path, io::resonances_json(set, pert));
        report.add_file(path, set.data.size());
    } else {
        write_table(dir, "resonances", io::resonance_table(set), "csv", report);
    }
    write_table(dir, "resonance_comparison", io::comparison_table(set, pert), c.run.format, report);
    report.set_field("pairing_deviation", set.pairing_deviation);
    report.set_field("gamma_deg", gamma_deg_exact(set, c.system.lambda));
    report.set_field("gamma_nd", gamma_nd(rc).exact);
}

void cmd_evolve(const ScenarioConfig& c, const std::optional<std::pair<int, int>>& term,
                RunReport& report) {
    const fs::path dir = c.run.out;
    const auto rc = constants_for(c, report);
    const DensityMatrix rho0 = c.run.initial_state.resolve(c.system);
    const auto times = c.run.grid.resolve(c.system);

    Stopwatch sw;
    const Propagator u(resonance_set(c.system, rc));
    report.add_timing("resonances", sw.seconds());

    Stopwatch tw;
    const auto traj = trajectory(rho0, c.system, u, times, worker_count(c.run.threads));
    report.add_timing("trajectory", tw.seconds());

    if (traj.lowest_eigenvalue() < kPositivityWarning) {
        report.warn("positivity: lowest eigenvalue " + io::format_number(traj.lowest_eigenvalue()));
    }
    if (traj.max_trace_deviation() > kTraceWarning) {
        report.warn("trace drift: max |Tr rho_t - 1| = " + io::format_number(traj.max_trace_deviation()));
    }
    report.set_field("max_trace_deviation", traj.max_trace_deviation());
    report.set_field("max_hermiticity_deviation", traj.max_hermiticity_deviation());
    report.set_field("lowest_eigenvalue", traj.lowest_eigenvalue());

    if (c.run.format == "json") {
        const fs::path path = dir / "trajectory.json";
        io::write_json(path, io::trajectory_json(traj));
        report.add_file(path, traj.size());
    } else {
        write_table(dir, "trajectory", io::trajectory_table(traj), "csv", report);
    }

    if (term) {
        const auto [j, s] = *term;
        std::vector<Matrix3cd> terms;
        terms.reserve(times.size());
        for (double t : times) terms.push_back(evolve_term(rho0, c.system, t, u, j, s));
        write_table(dir, "term_" + std::to_string(j) + "_" + std::to_string(s), io::term_table(times, terms),
                    c.run.format, report);
    }
}

void cmd_reservoir(const ScenarioConfig& c, RunReport& report) {
    const fs::path dir = c.run.out;
    const FormFactor& ff = c.reservoir;
    const auto& tab = c.run.tables;
    const double beta = c.system.beta;
    const auto rc = constants_for(c, report);

    Stopwatch sw;
    io::Table spec;
    spec.header = {"omega", "J", "J_sphere"};
    for (int i = 0; i < tab.omega_points; ++i) {
        const double w = ff.cutoff * (tab.omega_min + (tab.omega_max - tab.omega_min) * i / (tab.omega_points - 1));
        spec.rows.push_back({w, spectral_density(ff, w), spectral_density_quadrature(ff, w)});
    }
    write_table(dir, "spectral_density", spec, c.run.format, report);

    const bool closed = ff.is_exponential_family();
    io::Table corr;
    corr.header = {"t", "C"};
    if (closed) {
        for (const char* h : {"C_closed", "T1", "T2", "T1_closed", "T2_closed"}) corr.header.push_back(h);
    }
    const double pref = 0.5 * ff.angular_weight * ff.amplitude * ff.amplitude / (beta * beta);
    for (int i = 0; i < tab.t_points; ++i) {
        const double t = (tab.t_min + (tab.t_max - tab.t_min) * i / (tab.t_points - 1)) / ff.cutoff;
        const double cq = correlation(ff, beta, t);
        std::vector<double> row{t, cq};
        if (closed) {
            const auto pc = correlation_closed(ff, beta, t);
            const auto pq = correlation_pieces_quadrature(ff, beta, t);
            row.insert(row.end(), {pref * (pc.t1 + pc.t2), pq.t1, pq.t2, pc.t1, pc.t2});
        }
        corr.rows.push_back(row);
    }
    write_table(dir, "correlation", corr, c.run.format, report);
    if (!closed) report.warn("form factor outside the p = -1/2, m = 1 family: no closed-form correlation columns");

    json constants = {{"J_gap", rc.j_gap},
                      {"J_tilde0", rc.j_tilde0},
                      {"delta", rc.delta},
                      {"vartheta", rc.vartheta},
                      {"eta", io::complex_to_json(rc.eta)},
                      {"gamma_deg", gamma_deg(rc).proposition},
                      {"gamma_nd", gamma_nd(rc).exact}};
    if (closed) {
        const auto fit = fit_correlation_time(ff, beta);
        constants["tau_c"] = fit.tau;
        constants["tau_c_residual"] = fit.residual;
    } else {
        constants["tau_c"] = nullptr;
    }
    report.add_timing("tables", sw.seconds());
    const fs::path path = dir / "constants.json";
    io::write_json(path, constants);
    report.add_file(path, 1);
}

bool cmd_validate(const ScenarioConfig& c, RunReport& report, std::ostream& out) {
    AcceptanceSetup setup;
    setup.params = c.system;
    setup.reservoir = c.reservoir;
    setup.threads = worker_count(c.run.threads);
    Stopwatch sw;
    const auto results = run_acceptance(setup);
    report.add_timing("validate", sw.seconds());

    json rows = json::array();
    for (const auto& r : results) {
        out << format_result(r) << '\n';
        rows.push_back({{"id", r.id}, {"name", r.name}, {"status", status_name(r.status)},
                        {"detail", r.detail}, {"seconds", r.seconds}});
        if (r.status == Status::Skip) report.warn("criterion " + std::to_string(r.id) + " skipped: " + r.detail);
    }
    const bool ok = all_passed(results);
    out << (ok ? "ALL PASS" : "FAILURES PRESENT") << '\n';
    report.set_field("criteria", rows);
    report.set_field("passed", ok);
    return ok;
}

int run_command(const std::string& command, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    RunReport report(command, err);
    ScenarioConfig config;
    std::optional<std::pair<int, int>> term;
    try {
        config = load_config(opt.config_path);
        if (opt.out) config.run.out = *opt.out;
        if (opt.format) {
            if (*opt.format != "csv" && *opt.format != "json") throw ConfigError("--format must be csv or json");
            config.run.format = *opt.format;
        }
        if (opt.term) {
            if (command != "evolve") throw ConfigError("--term applies to evolve only");
            term = opt.term;
        }
        worker_count(config.run.threads);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    report.set_config(config);
    for (const auto& w : config.warnings) report.warn(w);

    int code = kExitOk;
    try {
        if (command == "resonances") {
            cmd_resonances(config, report);
        } else if (command == "evolve") {
            cmd_evolve(config, term, report);
        } else if (command == "reservoir") {
            cmd_reservoir(config, report);
        } else if (command == "validate") {
            code = cmd_validate(config, report, out) ? kExitOk : kExitValidation;
        } else {
            err << "unknown command '" << command << "'\n";
            return kExitConfig;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        code = kExitNumeric;
        report.set_field("error", e.what());
    }

    try {
        io::write_json(fs::path(config.run.out) / "report.json", report.to_json());
    } catch (const std::exception& e) {
        err << "cannot write report: " << e.what() << '\n';
        if (code == kExitOk) code = kExitNumeric;
    }
    return code;
}

} // namespace lambda_dyn

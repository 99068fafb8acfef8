// config.cpp — Schema-1 loader with located diagnostics

#include "lambda_dyn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lambda_dyn/dynamics.hpp"
#include "lambda_dyn/errors.hpp"
#include "lambda_dyn/io.hpp"

namespace lambda_dyn {

using nlohmann::json;

namespace {

struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
};

Position position_of(const std::string& text, std::size_t offset) {
    Position p;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

std::string join(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& k : path) {
        if (!s.empty() && k.front() != '[') s += '.';
        s += k;
    }
    return s;
}

class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& reason) const {
        std::ostringstream msg;
        msg << source_;
        if (auto off = locate(path)) {
            const Position p = position_of(text_, *off);
            msg << ':' << p.line << ':' << p.column;
        }
        msg << ": " << (path.empty() ? std::string("<root>") : join(path)) << ": " << reason;
        throw ConfigError(msg.str());
    }

    void check_keys(const json& obj, const std::vector<std::string>& path,
                    const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(path, "must be an object");
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) {
                auto p = path;
                p.push_back(key);
                fail(p, "unknown key");
            }
        }
    }

    double number(const json& obj, const std::vector<std::string>& path, const std::string& key,
                  double fallback) const {
        if (!obj.contains(key)) return fallback;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number()) fail(p, "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(p, "must be finite");
        return x;
    }

    long integer(const json& obj, const std::vector<std::string>& path, const std::string& key,
                 long fallback) const {
        if (!obj.contains(key)) return fallback;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(p, "must be an integer");
        return v.get<long>();
    }

    std::string string(const json& obj, const std::vector<std::string>& path,
                       const std::string& key, const std::string& fallback) const {
        if (!obj.contains(key)) return fallback;
        auto p = path;
        p.push_back(key);
        if (!obj.at(key).is_string()) fail(p, "must be a string");
        return obj.at(key).get<std::string>();
    }

private:
    // Byte offset of the innermost named key, found by walking the path through the text.
    std::optional<std::size_t> locate(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        std::optional<std::size_t> found;
        for (const auto& key : path) {
            if (key.front() == '[') break;
            const std::string quoted = '"' + key + '"';
            std::size_t at = pos;
            bool hit = false;
            while ((at = text_.find(quoted, at)) != std::string::npos) {
                std::size_t after = at + quoted.size();
                while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
                if (after < text_.size() && text_[after] == ':') {
                    hit = true;
                    break;
                }
                at += quoted.size();
            }
            if (!hit) return found;
            found = at;
            pos = at + quoted.size();
        }
        return found;
    }

    const std::string& text_;
    std::string source_;
};

cd parse_gamma(const Reader& r, const json& sys) {
    if (!sys.contains("gamma_coupling")) return {1.0, 0.0};
    const std::vector<std::string> path{"system", "gamma_coupling"};
    try {
        const cd g = io::complex_from_json(sys.at("gamma_coupling"));
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) r.fail(path, "must be finite");
        if (g == cd(0.0, 0.0)) r.fail(path, "must be non-zero");
        return g;
    } catch (const DomainError& e) {
        r.fail(path, e.what());
    }
}

void parse_system(const Reader& r, const json& root, ScenarioConfig& c) {
    if (!root.contains("system")) return;
    const json& sys = root.at("system");
    const std::vector<std::string> path{"system"};
    r.check_keys(sys, path, {"E0", "E", "sigma", "beta", "lambda", "gamma_coupling"});
    SystemParams& p = c.system;
    p.E0 = r.number(sys, path, "E0", p.E0);
    p.E = r.number(sys, path, "E", p.E);
    p.sigma = r.number(sys, path, "sigma", p.sigma);
    p.beta = r.number(sys, path, "beta", p.beta);
    p.lambda = r.number(sys, path, "lambda", p.lambda);
    p.gamma_coupling = parse_gamma(r, sys);

    if (!(p.gap() > 0.0)) r.fail({"system", sys.contains("E") ? "E" : "E0"}, "E0 - E must be positive");
    if (p.sigma < 0.0) r.fail({"system", "sigma"}, "must be non-negative");
    if (!(p.beta > 0.0)) r.fail({"system", "beta"}, "must be positive");
    if (!(p.lambda > 0.0)) r.fail({"system", "lambda"}, "must be positive");
}

void parse_reservoir(const Reader& r, const json& root, ScenarioConfig& c) {
    if (!root.contains("reservoir")) return;
    const json& res = root.at("reservoir");
    const std::vector<std::string> path{"reservoir"};
    r.check_keys(res, path, {"A", "n", "m", "kappa0", "angular_weight"});
    FormFactor& f = c.reservoir;
    f.amplitude = r.number(res, path, "A", f.amplitude);
    const long n = r.integer(res, path, "n", f.n);
    const long m = r.integer(res, path, "m", f.cutoff_exponent);
    f.cutoff = r.number(res, path, "kappa0", f.cutoff);
    f.angular_weight = r.number(res, path, "angular_weight", f.angular_weight);

    if (!(f.amplitude > 0.0)) r.fail({"reservoir", "A"}, "must be positive");
    if (n < 0 || n > 16) r.fail({"reservoir", "n"}, "must be an integer in [0, 16]");
    if (m != 1 && m != 2) r.fail({"reservoir", "m"}, "must be 1 or 2");
    if (!(f.cutoff > 0.0)) r.fail({"reservoir", "kappa0"}, "must be positive");
    if (!(f.angular_weight > 0.0)) r.fail({"reservoir", "angular_weight"}, "must be positive");
    f.n = static_cast<int>(n);
    f.cutoff_exponent = static_cast<int>(m);
}

GridSpec parse_grid(const Reader& r, const json& g) {
    const std::vector<std::string> path{"run", "grid"};
    GridSpec spec;
    if (g.is_string()) {
        if (g.get<std::string>() != "default") r.fail(path, "string value must be \"default\"");
        return spec;
    }
    if (!g.is_object()) r.fail(path, "must be \"default\" or an object");
    if (g.contains("times")) {
        r.check_keys(g, path, {"times"});
        const json& t = g.at("times");
        if (!t.is_array()) r.fail({"run", "grid", "times"}, "must be an array");
        spec.kind = GridSpec::Kind::Explicit;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].is_number()) r.fail({"run", "grid", "times"}, "entry " + std::to_string(i) + " must be a number");
            spec.times.push_back(t[i].get<double>());
        }
        try {
            validate_time_grid(spec.times);
        } catch (const DomainError& e) {
            r.fail({"run", "grid", "times"}, e.what());
        }
        return spec;
    }
    r.check_keys(g, path, {"t_min", "t_max", "points", "spacing"});
    const std::string spacing = r.string(g, path, "spacing", "geometric");
    if (spacing == "geometric") {
        spec.kind = GridSpec::Kind::Geometric;
    } else if (spacing == "linear") {
        spec.kind = GridSpec::Kind::Linear;
    } else {
        r.fail({"run", "grid", "spacing"}, "must be \"geometric\" or \"linear\"");
    }
    if (!g.contains("t_min")) r.fail({"run", "grid"}, "missing t_min");
    if (!g.contains("t_max")) r.fail({"run", "grid"}, "missing t_max");
    spec.t_min = r.number(g, path, "t_min", 0.0);
    spec.t_max = r.number(g, path, "t_max", 0.0);
    const long pts = r.integer(g, path, "points", spec.points);
    if (pts < 2 || pts > 10'000'000) r.fail({"run", "grid", "points"}, "must be in [2, 1e7]");
    spec.points = static_cast<int>(pts);
    if (spec.t_min < 0.0) r.fail({"run", "grid", "t_min"}, "must be non-negative");
    if (spec.kind == GridSpec::Kind::Geometric && !(spec.t_min > 0.0)) {
        r.fail({"run", "grid", "t_min"}, "must be positive for geometric spacing");
    }
    if (!(spec.t_max > spec.t_min)) r.fail({"run", "grid", "t_max"}, "must exceed t_min");
    return spec;
}

InitialStateSpec parse_initial(const Reader& r, const json& v) {
    const std::vector<std::string> path{"run", "initial_state"};
    static const std::set<std::string> presets{"level1", "level2", "level3", "mixed", "gibbs0", "dark"};
    InitialStateSpec spec;
    if (v.is_string()) {
        spec.preset = v.get<std::string>();
        if (!presets.count(spec.preset)) {
            r.fail(path, "unknown preset '" + spec.preset +
                             "' (expected level1, level2, level3, mixed, gibbs0, dark or {\"matrix\": ...})");
        }
        return spec;
    }
    r.check_keys(v, path, {"matrix"});
    if (!v.contains("matrix")) r.fail(path, "missing matrix");
    const std::vector<std::string> mpath{"run", "initial_state", "matrix"};
    Matrix3cd m;
    try {
        m = io::density_from_json(v.at("matrix"));
        validate_density(m, {1e-10, 1e-10, 1e-10});
    } catch (const DomainError& e) {
        r.fail(mpath, e.what());
    }
    spec.preset.clear();
    spec.matrix = m;
    return spec;
}

void parse_tables(const Reader& r, const json& t, ReservoirTables& tab) {
    const std::vector<std::string> path{"run", "tables"};
    r.check_keys(t, path, {"omega_min", "omega_max", "omega_points", "t_min", "t_max", "t_points"});
    tab.omega_min = r.number(t, path, "omega_min", tab.omega_min);
    tab.omega_max = r.number(t, path, "omega_max", tab.omega_max);
    tab.t_min = r.number(t, path, "t_min", tab.t_min);
    tab.t_max = r.number(t, path, "t_max", tab.t_max);
    const long op = r.integer(t, path, "omega_points", tab.omega_points);
    const long tp = r.integer(t, path, "t_points", tab.t_points);
    if (tab.omega_min < 0.0) r.fail({"run", "tables", "omega_min"}, "must be non-negative");
    if (!(tab.omega_max > tab.omega_min)) r.fail({"run", "tables", "omega_max"}, "must exceed omega_min");
    if (tab.t_min < 0.0) r.fail({"run", "tables", "t_min"}, "must be non-negative");
    if (!(tab.t_max > tab.t_min)) r.fail({"run", "tables", "t_max"}, "must exceed t_min");
    if (op < 2 || op > 1'000'000) r.fail({"run", "tables", "omega_points"}, "must be in [2, 1e6]");
    if (tp < 2 || tp > 1'000'000) r.fail({"run", "tables", "t_points"}, "must be in [2, 1e6]");
    tab.omega_points = static_cast<int>(op);
    tab.t_points = static_cast<int>(tp);
}

void parse_run(const Reader& r, const json& root, ScenarioConfig& c) {
    if (!root.contains("run")) return;
    const json& run = root.at("run");
    const std::vector<std::string> path{"run"};
    r.check_keys(run, path, {"grid", "initial_state", "tables", "out", "format", "threads"});
    RunSettings& s = c.run;
    if (run.contains("grid")) s.grid = parse_grid(r, run.at("grid"));
    if (run.contains("initial_state")) s.initial_state = parse_initial(r, run.at("initial_state"));
    if (run.contains("tables")) parse_tables(r, run.at("tables"), s.tables);
    s.out = r.string(run, path, "out", s.out);
    if (s.out.empty()) r.fail({"run", "out"}, "must be non-empty");
    s.format = r.string(run, path, "format", s.format);
    if (s.format != "csv" && s.format != "json") r.fail({"run", "format"}, "must be \"csv\" or \"json\"");
    const long th = r.integer(run, path, "threads", 0);
    if (th < 0 || th > 4096) r.fail({"run", "threads"}, "must be in [0, 4096]");
    s.threads = static_cast<unsigned>(th);
}

} // namespace

std::vector<double> GridSpec::resolve(const SystemParams& p) const {
    switch (kind) {
    case Kind::Default:
        return default_time_grid(p, points);
    case Kind::Geometric:
        return geometric_grid(t_min, t_max, points);
    case Kind::Linear: {
        std::vector<double> t(points);
        for (int i = 0; i < points; ++i) t[i] = t_min + (t_max - t_min) * i / (points - 1);
        return t;
    }
    case Kind::Explicit:
        return times;
    }
    return {};
}

DensityMatrix InitialStateSpec::resolve(const SystemParams& p) const {
    if (matrix) return *matrix;
    DensityMatrix rho = DensityMatrix::Zero();
    if (preset == "level1") {
        rho(0, 0) = 1.0;
    } else if (preset == "level2") {
        rho(1, 1) = 1.0;
    } else if (preset == "level3") {
        rho(2, 2) = 1.0;
    } else if (preset == "mixed") {
        rho = DensityMatrix::Identity() / 3.0;
    } else if (preset == "gibbs0") {
        rho = gibbs(p.beta, p.gap(), 0.0);
    } else if (preset == "dark") {
        rho = dark_density(p.gamma_coupling);
    } else {
        throw ConfigError("unknown initial-state preset '" + preset + "'");
    }
    return rho;
}

ScenarioConfig standard_config() {
    ScenarioConfig c;
    c.system.E0 = 1.0;
    c.system.E = 0.0;
    c.system.sigma = 1e-5;
    c.system.beta = 1.0;
    c.system.lambda = 0.05;
    c.system.gamma_coupling = {1.0, 0.0};
    c.reservoir.amplitude = 0.3;
    c.reservoir.n = 0;
    c.reservoir.cutoff_exponent = 1;
    c.reservoir.cutoff = 1.0;
    c.reservoir.angular_weight = 4.0 * std::numbers::pi;
    return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const Position p = position_of(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << source << ':' << p.line << ':' << p.column << ": syntax error: " << e.what();
        throw ConfigError(msg.str());
    }
    const Reader r(text, source);
    r.check_keys(root, {}, {"schema", "system", "reservoir", "run"});
    if (!root.contains("schema")) r.fail({"schema"}, "missing (expected 1)");
    if (!root.at("schema").is_number_integer() || root.at("schema").get<long>() != 1) {
        r.fail({"schema"}, "unsupported schema version (expected 1)");
    }

    ScenarioConfig c = standard_config();
    parse_system(r, root, c);
    parse_reservoir(r, root, c);
    parse_run(r, root, c);

    if (c.system.gamma_coupling != cd(1.0, 0.0)) {
        c.warnings.push_back("gamma_coupling != 1: the level shift operators are built for gamma = 1; "
                             "gamma only enters the coupling operator and the dark preset");
    }
    if (!c.system.regime_ok()) {
        c.warnings.push_back("regime sigma < lambda^2 < Delta violated (sigma = " +
                             io::format_number(c.system.sigma) + ", lambda^2 = " +
                             io::format_number(c.system.lambda_sq()) + ", Delta = " +
                             io::format_number(c.system.gap()) + ")");
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

json config_to_json(const ScenarioConfig& c) {
    const auto& p = c.system;
    const auto& f = c.reservoir;
    const auto& s = c.run;
    json grid;
    switch (s.grid.kind) {
    case GridSpec::Kind::Default:
        grid = "default";
        break;
    case GridSpec::Kind::Geometric:
    case GridSpec::Kind::Linear:
        grid = {{"spacing", s.grid.kind == GridSpec::Kind::Geometric ? "geometric" : "linear"},
                {"t_min", s.grid.t_min},
                {"t_max", s.grid.t_max},
                {"points", s.grid.points}};
        break;
    case GridSpec::Kind::Explicit:
        grid = {{"times", s.grid.times}};
        break;
    }
    json initial = s.initial_state.matrix
                       ? json{{"matrix", io::density_to_json(*s.initial_state.matrix)}}
                       : json(s.initial_state.preset);
    return {{"schema", 1},
            {"system",
             {{"E0", p.E0},
              {"E", p.E},
              {"sigma", p.sigma},
              {"beta", p.beta},
              {"lambda", p.lambda},
              {"gamma_coupling", io::complex_to_json(p.gamma_coupling)}}},
            {"reservoir",
             {{"A", f.amplitude},
              {"n", f.n},
              {"m", f.cutoff_exponent},
              {"kappa0", f.cutoff},
              {"angular_weight", f.angular_weight}}},
            {"run",
             {{"grid", grid},
              {"initial_state", initial},
              {"tables",
               {{"omega_min", s.tables.omega_min},
                {"omega_max", s.tables.omega_max},
                {"omega_points", s.tables.omega_points},
                {"t_min", s.tables.t_min},
                {"t_max", s.tables.t_max},
                {"t_points", s.tables.t_points}}},
              {"out", s.out},
              {"format", s.format},
              {"threads", s.threads}}}};
}

bool equivalent(const ScenarioConfig& a, const ScenarioConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

} // namespace lambda_dyn

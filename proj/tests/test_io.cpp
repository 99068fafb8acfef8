// test_io.cpp — Serialisation round trips and config diagnostics

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lambda_dyn/config.hpp"
#include "lambda_dyn/errors.hpp"
#include "lambda_dyn/io.hpp"

using namespace lambda_dyn;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("17-digit number formatting round-trips") {
    CHECK(io::format_number(0.1) == "0.10000000000000001");
    CHECK(io::format_number(0.0) == "0");
    CHECK(io::format_number(-2.5) == "-2.5");
    CHECK(io::format_number(1.0 / 3.0) == "0.33333333333333331");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(io::format_number(x)) == x);
    }
}

TEST_CASE("density matrix JSON round trip is exact") {
    std::mt19937 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix3cd m;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) m(i, k) = cd(n(rng), n(rng));
    const auto j = io::density_to_json(m);
    CHECK(j[1][2][1].get<double>() == m(1, 2).imag());
    const Matrix3cd back = io::density_from_json(nlohmann::json::parse(j.dump()));
    CHECK((back - m).norm() == 0.0);
    CHECK_THROWS_AS(io::density_from_json(nlohmann::json::parse("[[1,0,0],[0,0,0]]")), DomainError);
    CHECK_THROWS_AS(io::density_from_json(nlohmann::json::parse("[[1,0,0],[0,0,0],[0,0,[1]]]")), DomainError);
    CHECK(io::complex_from_json(nlohmann::json(2.0)) == cd(2.0, 0.0));
}

TEST_CASE("CSV layout") {
    io::Table t{{"a", "b"}, {{1.0, 0.5}, {2.0, -1e-20}}};
    CHECK(io::to_csv(t) == "a,b\n1,0.5\n2,-9.9999999999999995e-21\n");
    CHECK(io::trajectory_columns().size() == 15);
    CHECK(io::trajectory_columns().front() == "t");
    CHECK(io::trajectory_columns()[10] == "dist_gibbs");
    CHECK(io::trajectory_columns().back() == "min_eig");
}

TEST_CASE("default config is the standard point") {
    const auto c = parse_config("{\"schema\": 1}");
    CHECK(c.system.lambda == 0.05);
    CHECK(c.system.sigma == 1e-5);
    CHECK(c.system.beta == 1.0);
    CHECK(c.system.gap() == 1.0);
    CHECK(c.reservoir.amplitude == 0.3);
    CHECK(c.reservoir.is_exponential_family());
    CHECK(c.run.initial_state.preset == "level1");
    CHECK(c.run.format == "csv");
    CHECK(c.warnings.empty());
}

TEST_CASE("config echo re-parses to an equivalent config") {
    const std::string text = R"({
      "schema": 1,
      "system": {"sigma": 2e-5, "lambda": 0.04, "beta": 0.7, "E0": 2.0, "E": 0.5,
                 "gamma_coupling": [0.5, 0.25]},
      "reservoir": {"A": 0.2, "n": 1, "m": 2, "kappa0": 1.5, "angular_weight": 3.0},
      "run": {"grid": {"t_min": 1, "t_max": 1e6, "points": 17, "spacing": "geometric"},
              "initial_state": {"matrix": [[0.5, 0, 0], [0, 0.25, [0.1, 0.05]], [0, [0.1, -0.05], 0.25]]},
              "tables": {"omega_max": 5, "t_points": 11},
              "out": "results", "format": "json", "threads": 3}
    })";
    const auto c = parse_config(text);
    CHECK(c.system.gamma_coupling == cd(0.5, 0.25));
    CHECK(c.run.grid.resolve(c.system).size() == 17);
    CHECK(c.run.initial_state.matrix.has_value());
    CHECK(c.warnings.size() == 1);
    const auto echo = config_to_json(c).dump(2);
    const auto again = parse_config(echo);
    CHECK(equivalent(c, again));
    CHECK(config_to_json(again).dump(2) == echo);

    for (const char* grid : {R"("default")", R"({"times": [0, 1, 2.5]})",
                             R"({"t_min": 0, "t_max": 3, "points": 4, "spacing": "linear"})"}) {
        const auto g = parse_config(std::string(R"({"schema": 1, "run": {"grid": )") + grid + "}}");
        CHECK(equivalent(g, parse_config(config_to_json(g).dump())));
    }
    const auto linear = parse_config(R"({"schema": 1, "run": {"grid": {"t_min": 0, "t_max": 3, "points": 4, "spacing": "linear"}}})");
    CHECK(linear.run.grid.resolve(linear.system) == std::vector<double>{0.0, 1.0, 2.0, 3.0});
}

TEST_CASE("presets") {
    for (const char* name : {"level1", "level2", "level3", "mixed", "gibbs0", "dark"}) {
        const auto c = parse_config(std::string(R"({"schema": 1, "run": {"initial_state": ")") + name + "\"}}");
        const DensityMatrix r = c.run.initial_state.resolve(c.system);
        CHECK_NOTHROW(validate_density(r));
    }
    const auto c = parse_config(R"({"schema": 1, "run": {"initial_state": "gibbs0"}})");
    CHECK((c.run.initial_state.resolve(c.system) - gibbs(1.0, 1.0, 0.0)).norm() == 0.0);
    const auto d = parse_config(R"({"schema": 1, "run": {"initial_state": "dark"}})");
    CHECK((coupling_matrix() * d.run.initial_state.resolve(d.system)).norm() < 1e-15);
}

TEST_CASE("config errors carry line, column and field") {
    CHECK(config_error("{\"schema\": 1,\n \"system\": {\n   \"sigma\": -1\n }}") ==
          "cfg.json:3:4: system.sigma: must be non-negative");
    CHECK(config_error("{\"schema\": 1,\n \"reservoir\": {\"A\": 0}}").find("cfg.json:2:16: reservoir.A: must be positive") == 0);
    CHECK(config_error("{\"schema\": 1, \"system\": {\"lamda\": 0.1}}").find("system.lamda: unknown key") != std::string::npos);
    CHECK(config_error("{\"schema\": 2}").find("schema: unsupported") != std::string::npos);
    CHECK(config_error("{}").find("schema: missing") != std::string::npos);

    const std::string syntax = config_error("{\"schema\": 1,\n  \"system\": {\"sigma\": 1e-5,,}}");
    CHECK(syntax.find("cfg.json:2:28: syntax error") == 0);

    CHECK(config_error(R"({"schema": 1, "system": {"beta": 0}})").find("system.beta") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "system": {"E0": 0, "E": 1}})").find("E0 - E must be positive") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "system": {"lambda": "x"}})").find("system.lambda: must be a number") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "system": {"gamma_coupling": [1]}})").find("system.gamma_coupling") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "reservoir": {"m": 3}})").find("reservoir.m: must be 1 or 2") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "reservoir": {"n": 0.5}})").find("reservoir.n: must be an integer") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "run": {"initial_state": "level4"}})").find("run.initial_state: unknown preset") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "run": {"initial_state": {"matrix": [[2,0,0],[0,0,0],[0,0,0]]}}})")
              .find("run.initial_state.matrix") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "run": {"grid": {"times": [1, 1]}}})").find("run.grid.times") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "run": {"grid": {"t_min": 0, "t_max": 1}}})").find("run.grid.t_min: must be positive") != std::string::npos);
    CHECK(config_error(R"({"schema": 1, "run": {"format": "xml"}})").find("run.format") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("warnings for gamma and regime") {
    const auto g = parse_config(R"({"schema": 1, "system": {"gamma_coupling": 2}})");
    REQUIRE(g.warnings.size() == 1);
    CHECK(g.warnings[0].find("gamma_coupling") != std::string::npos);
    const auto r = parse_config(R"({"schema": 1, "system": {"sigma": 0.01}})");
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("regime") != std::string::npos);
}

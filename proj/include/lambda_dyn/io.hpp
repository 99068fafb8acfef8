// io.hpp — JSON and CSV serialisation of states, resonances and trajectories

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "lambda_dyn/dynamics.hpp"
#include "lambda_dyn/resonance.hpp"

namespace lambda_dyn::io {

using json = nlohmann::json;

// 17 significant digits, fixed locale-independent formatting.
std::string format_number(double x);

// [[[re, im], ...], ...] in the energy basis.
json density_to_json(const Matrix3cd& m);
// Throws DomainError naming the offending entry.
Matrix3cd density_from_json(const json& j);

json complex_to_json(cd z);
cd complex_from_json(const json& j);
json vector_to_json(const Eigen::VectorXcd& v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const Table& table);
std::string to_csv(const Table& table);

// Column order of the evolve output.
const std::vector<std::string>& trajectory_columns();
Table trajectory_table(const Trajectory& traj);

Table resonance_table(const ResonanceSet& set);

// Numeric vs perturbative energies with absolute and relative errors.
Table comparison_table(const ResonanceSet& set, const PerturbativeEnergies<double>& pert);

json resonances_json(const ResonanceSet& set, const PerturbativeEnergies<double>& pert);
json trajectory_json(const Trajectory& traj);

// Entries of a single-term contribution: t, c11_re, c11_im, ..., c33_im.
Table term_table(const std::vector<double>& times, const std::vector<Matrix3cd>& terms);

void write_json(const std::filesystem::path& path, const json& j);

} // namespace lambda_dyn::io

// io.cpp — Deterministic text output

#include "lambda_dyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn::io {

namespace {

cd energy_of(const PerturbativeEnergies<double>& pert, int sector, int index) {
    if (sector == 0) return pert.zero[index - 1];
    if (sector == 1) return pert.plus[index - 1];
    return pert.minus[index - 1];
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw DomainError("complex number must be a number or [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const Eigen::VectorXcd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v[i]));
    return a;
}

json density_to_json(const Matrix3cd& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int k = 0; k < 3; ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

Matrix3cd density_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw DomainError("matrix must have 3 rows");
    Matrix3cd m;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_array() || j[i].size() != 3) {
            throw DomainError("matrix row " + std::to_string(i) + " must have 3 entries");
        }
        for (int k = 0; k < 3; ++k) {
            try {
                m(i, k) = complex_from_json(j[i][k]);
            } catch (const DomainError& e) {
                throw DomainError("entry [" + std::to_string(i) + "][" + std::to_string(k) + "]: " + e.what());
            }
        }
    }
    return m;
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out << (c ? "," : "") << table.header[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    auto out = open_for_write(path);
    out << to_csv(table);
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
}

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{
        "t",        "rho11_re", "rho12_re", "rho12_im",   "rho13_re",   "rho13_im",
        "rho22_re", "rho23_re", "rho23_im", "rho33_re",   "dist_gibbs", "dist_qstat",
        "dist_final", "p_donor", "min_eig"};
    return cols;
}

Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.header = trajectory_columns();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& r = traj.states[i];
        t.rows.push_back({traj.times[i], r(0, 0).real(), r(0, 1).real(), r(0, 1).imag(),
                          r(0, 2).real(), r(0, 2).imag(), r(1, 1).real(), r(1, 2).real(),
                          r(1, 2).imag(), r(2, 2).real(), traj.dist_gibbs[i], traj.dist_qstat[i],
                          traj.dist_final[i], traj.p_donor[i], traj.min_eig[i]});
    }
    return t;
}

Table resonance_table(const ResonanceSet& set) {
    Table t;
    t.header = {"sector", "index", "re_eps", "im_eps"};
    for (const auto& d : set.data) {
        t.rows.push_back({double(d.sector), double(d.index), d.energy.real(), d.energy.imag()});
    }
    return t;
}

Table comparison_table(const ResonanceSet& set, const PerturbativeEnergies<double>& pert) {
    Table t;
    t.header = {"sector", "index", "re_num", "im_num", "re_pert",
                "im_pert", "abs_err", "rel_err"};
    for (const auto& d : set.data) {
        const cd e = energy_of(pert, d.sector, d.index);
        const double abs_err = std::abs(d.energy - e);
        const double rel_err = std::abs(e) > 0.0 ? abs_err / std::abs(e) : (abs_err == 0.0 ? 0.0 : INFINITY);
        t.rows.push_back({double(d.sector), double(d.index), d.energy.real(), d.energy.imag(),
                          e.real(), e.imag(), abs_err, rel_err});
    }
    return t;
}

json resonances_json(const ResonanceSet& set, const PerturbativeEnergies<double>& pert) {
    json out = json::array();
    for (const auto& d : set.data) {
        const cd e = energy_of(pert, d.sector, d.index);
        out.push_back({{"sector", d.sector},
                       {"index", d.index},
                       {"energy", complex_to_json(d.energy)},
                       {"perturbative", complex_to_json(e)},
                       {"abs_error", std::abs(d.energy - e)},
                       {"right", vector_to_json(d.right)},
                       {"left", vector_to_json(d.left)}});
    }
    return {{"basis", {{"0", "Psi1..Psi5"}, {"+1", "phi12, phi13"}, {"-1", "phi21, phi31"}}},
            {"resonances", out}};
}

json trajectory_json(const Trajectory& traj) {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        rows.push_back({{"t", traj.times[i]},
                        {"rho", density_to_json(traj.states[i])},
                        {"dist_gibbs", traj.dist_gibbs[i]},
                        {"dist_qstat", traj.dist_qstat[i]},
                        {"dist_final", traj.dist_final[i]},
                        {"p_donor", traj.p_donor[i]},
                        {"min_eig", traj.min_eig[i]}});
    }
    return {{"trajectory", rows}};
}

Table term_table(const std::vector<double>& times, const std::vector<Matrix3cd>& terms) {
    Table t;
    t.header = {"t"};
    for (int i = 1; i <= 3; ++i)
        for (int k = 1; k <= 3; ++k) {
            const std::string base = "c" + std::to_string(i) + std::to_string(k);
            t.header.push_back(base + "_re");
            t.header.push_back(base + "_im");
        }
    for (std::size_t n = 0; n < times.size(); ++n) {
        std::vector<double> row{times[n]};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                row.push_back(terms[n](i, k).real());
                row.push_back(terms[n](i, k).imag());
            }
        t.rows.push_back(row);
    }
    return t;
}

} // namespace lambda_dyn::io

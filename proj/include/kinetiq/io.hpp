#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinetiq/calibration.hpp"
#include "kinetiq/circuit.hpp"
#include "kinetiq/errors.hpp"
#include "kinetiq/fit.hpp"
#include "kinetiq/gmm.hpp"
#include "kinetiq/readout.hpp"
#include "kinetiq/spectrum.hpp"

namespace kinetiq::io {

/// Fixed-format double for byte-stable outputs.
inline std::string fmt(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << content;
}

// ---------------------------------------------------------------- device JSON

inline CircuitSpec device_from_json(const nlohmann::json& j) {
    CircuitSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.readout_inductance_nH = j.at("L_r_nH").get<double>();
    spec.loop_inductance_nH = j.at("L_q_nH").get<double>();
    spec.kinetic_asymmetry_nH = j.at("Delta_k_nH").get<double>();
    spec.josephson_energy_GHz = j.at("E_J_GHz").get<double>();
    spec.junction_cap_fF = j.at("C_J_fF").get<double>();
    if (j.contains("diagonal_is_total"))
        spec.diagonal_is_total = j.at("diagonal_is_total").get<bool>();
    const auto& caps = j.at("capacitances_fF");
    for (auto it = caps.begin(); it != caps.end(); ++it) {
        const std::string& key = it.key();
        if (key.size() != 3 || key[0] != 'C' || !isdigit(key[1]) || !isdigit(key[2]))
            throw InvalidInput("unrecognized capacitance key '" + key + "'");
        spec.caps.set(key[1] - '0', key[2] - '0', it.value().get<double>());
    }
    spec.validate();
    return spec;
}

inline CircuitSpec load_device(const std::string& path) {
    return device_from_json(nlohmann::json::parse(read_file(path)));
}

inline nlohmann::json device_to_json(const CircuitSpec& spec) {
    nlohmann::json caps;
    for (int i = 1; i <= 4; ++i)
        for (int jn = i; jn <= 4; ++jn) {
            const std::string key = "C" + std::to_string(i) + std::to_string(jn);
            if (spec.caps.has(i, jn)) caps[key] = spec.caps.at(i, jn);
        }
    for (int i = 1; i <= 4; ++i) {
        const std::string key = "C" + std::to_string(i) + "0";
        if (spec.caps.has(i, 0)) caps[key] = spec.caps.at(i, 0);
    }
    return {{"name", spec.name},
            {"L_r_nH", spec.readout_inductance_nH},
            {"L_q_nH", spec.loop_inductance_nH},
            {"Delta_k_nH", spec.kinetic_asymmetry_nH},
            {"E_J_GHz", spec.josephson_energy_GHz},
            {"C_J_fF", spec.junction_cap_fF},
            {"diagonal_is_total", spec.diagonal_is_total},
            {"capacitances_fF", caps}};
}

// ----------------------------------------------------------------------- CSV

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    return out;
}

} // namespace detail

/// flux_phi0, freq_GHz, transition (R|Q01|Q02), weight. The weight column may
/// be omitted; missing weights default to 4 for R points and 1 for Q points.
inline std::vector<SpectroscopyPoint> read_spectroscopy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<SpectroscopyPoint> points;
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (!header_skipped) {
            header_skipped = true;
            if (!fields.empty() && fields[0] == "flux_phi0") continue;
        }
        if (fields.size() < 3)
            throw InvalidInput(path + ": expected flux_phi0,freq_GHz,transition[,weight]");
        SpectroscopyPoint p;
        p.flux_phi0 = std::stod(fields[0]);
        p.freq_GHz = std::stod(fields[1]);
        p.transition = transition_from_string(fields[2]);
        if (fields.size() >= 4 && !fields[3].empty())
            p.weight = std::stod(fields[3]);
        else
            p.weight = p.transition == Transition::R ? 4.0 : 1.0;
        if (p.freq_GHz <= 0.0) throw InvalidInput(path + ": freq_GHz must be positive");
        if (p.weight < 0.0) throw InvalidInput(path + ": weight must be non-negative");
        points.push_back(p);
    }
    return points;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "flux_phi0,fQ01_GHz,fQ02_GHz,fR0_GHz,fR1_GHz,chi_MHz,ambiguous\n";
    for (const auto& row : rows) {
        const auto& t = row.table;
        if (row.error) {
            out << fmt(t.flux_phi0) << ",nan,nan,nan,nan,nan,1\n";
            continue;
        }
        out << fmt(t.flux_phi0) << ',' << fmt(t.fq01_GHz) << ',' << fmt(t.fq02_GHz) << ','
            << fmt(t.fr0_GHz) << ',' << fmt(t.fr1_GHz) << ',' << fmt(t.chi_MHz) << ','
            << (t.ambiguous ? 1 : 0) << '\n';
    }
    return out.str();
}

/// t_index, I, Q
inline std::vector<IQSample> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<IQSample> samples;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (first) {
            first = false;
            if (!fields.empty() && (fields[0] == "t_index" || fields[0] == "t")) continue;
        }
        if (fields.size() < 3) throw InvalidInput(path + ": expected t_index,I,Q");
        IQSample s;
        s.t = std::stol(fields[0]);
        s.i = std::stod(fields[1]);
        s.q = std::stod(fields[2]);
        if (!std::isfinite(s.i) || !std::isfinite(s.q))
            throw InvalidInput(path + ": non-finite IQ sample");
        samples.push_back(s);
    }
    return samples;
}

/// n, population
inline std::vector<PiPulseRecord> read_pipulse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<PiPulseRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "n") continue;
        }
        if (fields.size() < 2) throw InvalidInput(path + ": expected n,population");
        records.push_back({std::stoi(fields[0]), std::stod(fields[1])});
    }
    return records;
}

/// power, deltaF_MHz
inline std::vector<StarkRecord> read_stark_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<StarkRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "power") continue;
        }
        if (fields.size() < 2) throw InvalidInput(path + ": expected power,deltaF_MHz");
        records.push_back({std::stod(fields[0]), std::stod(fields[1])});
    }
    return records;
}

// ---------------------------------------------------------------- JSON views

inline nlohmann::json modes_to_json(const ModeDecomposition& m) {
    nlohmann::json freqs = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.omegas.size(); ++j)
        freqs.push_back(m.omegas[j] / (2.0 * std::numbers::pi * Units::GHz));
    nlohmann::json S = nlohmann::json::array(), Sp = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.S.rows(); ++r) {
        nlohmann::json rowS = nlohmann::json::array(), rowP = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.S.cols(); ++c) {
            rowS.push_back(m.S(r, c));
            rowP.push_back(m.Sprime(r, c));
        }
        S.push_back(rowS);
        Sp.push_back(rowP);
    }
    return {{"mode_frequencies_GHz", freqs},
            {"qubit_index", m.qubit_index},
            {"readout_index", m.readout_index},
            {"zero_index", m.zero_index},
            {"high_index", m.high_index},
            {"f_readout_GHz", m.readout_frequency_GHz()},
            {"f_qubit_GHz", m.qubit_frequency_GHz()},
            {"lambda_readout", m.lambda_readout},
            {"lambda_qubit", m.lambda_qubit},
            {"delta_c_aF", m.delta_c_aF},
            {"S", S},
            {"S_prime", Sp}};
}

inline nlohmann::json transitions_to_json(const TransitionTable& t) {
    return {{"flux_phi0", t.flux_phi0},   {"fQ01_GHz", t.fq01_GHz},
            {"fQ02_GHz", t.fq02_GHz},     {"fR0_GHz", t.fr0_GHz},
            {"fR1_GHz", t.fr1_GHz},       {"chi_MHz", t.chi_MHz},
            {"ambiguous", t.ambiguous},   {"min_confidence", t.min_confidence}};
}

inline nlohmann::json fit_result_to_json(const FitResult& r) {
    nlohmann::json residuals = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.per_point_residuals.size(); ++i)
        residuals.push_back(r.per_point_residuals[i]);
    return {{"theta",
             {{"Lr_nH", r.theta.Lr_nH},
              {"Lq_nH", r.theta.Lq_nH},
              {"Dk_nH", r.theta.Dk_nH},
              {"EJ_GHz", r.theta.EJ_GHz},
              {"CJ_fF", r.theta.CJ_fF}}},
            {"rss", r.rss},
            {"converged", r.converged},
            {"evals", r.evals},
            {"residuals", residuals},
            {"warnings", r.warnings}};
}

inline nlohmann::json gmm_to_json(const GmmModel& m) {
    nlohmann::json comps = nlohmann::json::array();
    for (int k = 0; k < m.components(); ++k)
        comps.push_back({{"mean", {m.means[k][0], m.means[k][1]}},
                         {"covariance",
                          {{m.covariances[k](0, 0), m.covariances[k](0, 1)},
                           {m.covariances[k](1, 0), m.covariances[k](1, 1)}}},
                         {"weight", m.weights[k]},
                         {"state", to_string(m.state_map[k])}});
    return {{"components", comps},
            {"log_likelihood", m.log_likelihood},
            {"iterations", m.iterations}};
}

inline nlohmann::json readout_stats_to_json(const ReadoutStats& s, const GmmModel& model) {
    nlohmann::json j{{"populations",
                      {{"P0", s.p_ground}, {"P1", s.p_excited}, {"P2plus", s.p_other}}},
                     {"snr", s.snr},
                     {"count", s.count},
                     {"model", gmm_to_json(model)}};
    j["P00"] = s.p00 ? nlohmann::json(*s.p00) : nlohmann::json();
    j["P11"] = s.p11 ? nlohmann::json(*s.p11) : nlohmann::json();
    return j;
}

} // namespace kinetiq::io

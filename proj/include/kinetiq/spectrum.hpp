#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kinetiq/circuit.hpp"
#include "kinetiq/errors.hpp"
#include "kinetiq/fock.hpp"
#include "kinetiq/modes.hpp"

namespace kinetiq {

struct LabeledLevel {
    int n_res = 0;
    int n_qubit = 0;
    double energy_GHz = 0.0;
    double confidence = 0.0;  // readout-class marginal mass, in [0,1]
    bool ambiguous = false;   // confidence <= 0.5
};

/// Eigenlevels of the two-mode Hamiltonian labeled by photon numbers: each
/// eigenstate is classified by the peak of its readout-mode marginal photon
/// distribution, and the qubit label is the energy rank inside that readout
/// class. Levels within the truncation guard bands are kept.
struct LabeledSpectrum {
    double flux_phi0 = 0.0;
    std::vector<LabeledLevel> levels;  // ascending energy

    const LabeledLevel* find(int n_res, int n_qubit) const {
        for (const auto& l : levels)
            if (l.n_res == n_res && l.n_qubit == n_qubit) return &l;
        return nullptr;
    }

    const LabeledLevel& at(int n_res, int n_qubit) const {
        const LabeledLevel* l = find(n_res, n_qubit);
        if (!l)
            throw LabelingFailed("level (" + std::to_string(n_res) + "," +
                                 std::to_string(n_qubit) + ") was not assigned");
        return *l;
    }
};

/// The spectrum is periodic in the external flux and mirror-symmetric about
/// half flux (both exact symmetries of the Hamiltonian), so every flux maps
/// into [0, 1/2] before any matrix is built. This keeps the symmetries exact
/// in floating point as well.
inline double canonical_flux(double flux_phi0) {
    double f = flux_phi0 - std::floor(flux_phi0);
    if (f > 0.5) f = 1.0 - f;
    return f;
}

namespace detail {

struct LabeledEigensystem {
    Eigen::VectorXd energies;          // ascending
    Eigen::MatrixXd vectors;           // columns matching energies
    std::vector<int> readout_class;    // per level
    std::vector<int> qubit_rank;       // per level, energy rank within class
    std::vector<double> confidence;    // per level
};

inline LabeledEigensystem labeled_eigensystem(const Eigen::MatrixXd& H,
                                              const FockConfig& cfg) {
    const double hermiticity =
        (H - H.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff());
    if (hermiticity > 1e-12)
        throw InvalidInput("Hamiltonian is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    LabeledEigensystem sys;
    sys.energies = es.eigenvalues();
    sys.vectors = es.eigenvectors();

    const int d = cfg.dim();
    sys.readout_class.resize(d);
    sys.qubit_rank.assign(d, -1);
    sys.confidence.resize(d);
    std::vector<int> seen(cfg.n_res, 0);
    for (int k = 0; k < d; ++k) {
        int best = 0;
        double best_mass = -1.0;
        for (int r = 0; r < cfg.n_res; ++r) {
            const double mass =
                sys.vectors.col(k).segment(r * cfg.n_qubit, cfg.n_qubit).squaredNorm();
            if (mass > best_mass) {
                best_mass = mass;
                best = r;
            }
        }
        sys.readout_class[k] = best;
        sys.confidence[k] = best_mass;
        sys.qubit_rank[k] = seen[best]++;
    }
    return sys;
}

} // namespace detail

/// Guard bands against truncation-edge artifacts: the top 5 readout and top 10
/// qubit labels are dropped.
inline LabeledSpectrum diagonalize_and_label(const Eigen::MatrixXd& H, const FockConfig& cfg,
                                             double flux_phi0 = 0.0) {
    cfg.check();
    const auto sys = detail::labeled_eigensystem(H, cfg);
    const int keep_res = cfg.n_res - 5;
    const int keep_qubit = cfg.n_qubit - 10;

    LabeledSpectrum spec;
    spec.flux_phi0 = flux_phi0;
    for (int k = 0; k < cfg.dim(); ++k) {
        if (sys.readout_class[k] > keep_res || sys.qubit_rank[k] > keep_qubit) continue;
        LabeledLevel l;
        l.n_res = sys.readout_class[k];
        l.n_qubit = sys.qubit_rank[k];
        l.energy_GHz = sys.energies[k];
        l.confidence = sys.confidence[k];
        l.ambiguous = l.confidence <= 0.5;
        spec.levels.push_back(l);
    }
    bool corners_ok = true;
    for (auto [r, q] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
        const LabeledLevel* l = spec.find(r, q);
        if (!l || l->ambiguous) corners_ok = false;
    }
    if (!corners_ok)
        throw LabelingFailed("computational levels (0,0),(0,1),(1,0),(1,1) could not all "
                             "be assigned with confidence > 0.5");
    return spec;
}

/// Transition frequencies and dispersive shift at one flux point.
struct TransitionTable {
    double flux_phi0 = 0.0;
    double fq01_GHz = 0.0;  // qubit 0->1 at zero readout photons
    double fq02_GHz = 0.0;  // qubit 0->2
    double fr0_GHz = 0.0;   // readout with qubit in |0>
    double fr1_GHz = 0.0;   // readout with qubit in |1>
    double chi_MHz = 0.0;   // (fr1 - fr0) * 1000
    bool ambiguous = false;
    double min_confidence = 1.0;
};

namespace detail {

inline TransitionTable table_from(const LabeledEigensystem& sys, const FockConfig& cfg,
                                  double flux_phi0) {
    auto energy = [&](int r, int q) -> double {
        for (int k = 0; k < cfg.dim(); ++k)
            if (sys.readout_class[k] == r && sys.qubit_rank[k] == q) return sys.energies[k];
        throw LabelingFailed("missing level (" + std::to_string(r) + "," +
                             std::to_string(q) + ")");
    };
    auto conf = [&](int r, int q) -> double {
        for (int k = 0; k < cfg.dim(); ++k)
            if (sys.readout_class[k] == r && sys.qubit_rank[k] == q)
                return sys.confidence[k];
        return 0.0;
    };
    const double e00 = energy(0, 0), e01 = energy(0, 1), e02 = energy(0, 2);
    const double e10 = energy(1, 0), e11 = energy(1, 1);
    TransitionTable t;
    t.flux_phi0 = flux_phi0;
    t.fq01_GHz = e01 - e00;
    t.fq02_GHz = e02 - e00;
    t.fr0_GHz = e10 - e00;
    t.fr1_GHz = e11 - e01;
    t.chi_MHz = (t.fr1_GHz - t.fr0_GHz) * (Units::GHz / Units::MHz);
    t.min_confidence = std::min({conf(0, 0), conf(0, 1), conf(1, 0), conf(1, 1)});
    t.ambiguous = t.min_confidence <= 0.5;
    return t;
}

} // namespace detail

inline TransitionTable transitions_at(const ModeDecomposition& modes, double EJ_GHz,
                                      double flux_phi0, const FockConfig& cfg) {
    const Eigen::MatrixXd H =
        build_hamiltonian(modes, EJ_GHz, canonical_flux(flux_phi0), cfg);
    return detail::table_from(detail::labeled_eigensystem(H, cfg), cfg, flux_phi0);
}

inline TransitionTable transitions_at(const CircuitSpec& spec, double flux_phi0,
                                      const FockConfig& cfg) {
    return transitions_at(analyze_circuit(spec, cfg.zero_tol), spec.josephson_energy_GHz,
                          flux_phi0, cfg);
}

/// Dispersive shift chi = (E_{1,1} - E_{0,1})/h - (E_{1,0} - E_{0,0})/h, MHz.
/// Throws LabelingFailed when a corner level is ambiguous.
inline double dispersive_shift_MHz(const CircuitSpec& spec, double flux_phi0,
                                   const FockConfig& cfg) {
    const TransitionTable t = transitions_at(spec, flux_phi0, cfg);
    if (t.ambiguous)
        throw LabelingFailed(spec.name + ": ambiguous level assignment at flux " +
                             std::to_string(flux_phi0));
    return t.chi_MHz;
}

struct SweepRow {
    TransitionTable table;
    std::optional<std::string> error;  // set when the point failed outright
};

namespace detail {

inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < std::min(threads, n); ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Per-point errors are collected in the rows; the sweep itself never throws.
inline std::vector<SweepRow> flux_sweep(const CircuitSpec& spec,
                                        const std::vector<double>& flux_grid,
                                        const FockConfig& cfg, int threads = 1) {
    if (flux_grid.empty()) throw InvalidInput("flux grid is empty");
    for (double f : flux_grid)
        if (!std::isfinite(f)) throw InvalidInput("flux grid contains a non-finite value");
    const ModeDecomposition modes = analyze_circuit(spec, cfg.zero_tol);
    std::vector<SweepRow> rows(flux_grid.size());
    detail::parallel_for(static_cast<int>(flux_grid.size()), threads, [&](int i) {
        rows[i].table.flux_phi0 = flux_grid[i];
        try {
            rows[i].table =
                transitions_at(modes, spec.josephson_energy_GHz, flux_grid[i], cfg);
        } catch (const Error& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

/// |<0| phi |1>| between the (0,0) and (0,1) levels, with the flux operator in
/// units of Phi_0: phi = (lambda_Q x_Q + lambda_R x_R) / 2 pi.
inline double flux_matrix_element(const ModeDecomposition& modes, double EJ_GHz,
                                  double flux_phi0, const FockConfig& cfg) {
    const Eigen::MatrixXd H =
        build_hamiltonian(modes, EJ_GHz, canonical_flux(flux_phi0), cfg);
    const auto sys = detail::labeled_eigensystem(H, cfg);
    int k00 = -1, k01 = -1;
    for (int k = 0; k < cfg.dim(); ++k) {
        if (sys.readout_class[k] != 0) continue;
        if (sys.qubit_rank[k] == 0) k00 = k;
        if (sys.qubit_rank[k] == 1) k01 = k;
    }
    if (k00 < 0 || k01 < 0 || sys.confidence[k00] <= 0.5 || sys.confidence[k01] <= 0.5)
        throw LabelingFailed("qubit doublet at zero readout photons is ambiguous");
    const Eigen::MatrixXd phi =
        fock::junction_phase_operator(modes.lambda_readout, modes.lambda_qubit, cfg) /
        (2.0 * std::numbers::pi);
    return std::abs(sys.vectors.col(k00).dot(phi * sys.vectors.col(k01)));
}

inline double flux_matrix_element(const CircuitSpec& spec, double flux_phi0,
                                  const FockConfig& cfg) {
    return flux_matrix_element(analyze_circuit(spec, cfg.zero_tol),
                               spec.josephson_energy_GHz, flux_phi0, cfg);
}

/// Inductive energy E_L = Phi_0^2 / (4 pi^2 L_q), returned in GHz.
inline double inductive_energy_GHz(double loop_inductance_nH,
                                   const Units& u = Units::si()) {
    const double EL_joule = u.Phi0 * u.Phi0 /
                            (4.0 * std::numbers::pi * std::numbers::pi *
                             loop_inductance_nH * Units::nH);
    return EL_joule / u.h / Units::GHz;
}

/// Energy relaxation from inductive loss (Fermi golden rule):
///   1/T1 = (8 pi^3 E_L / h Q_ind) |<0|phi|1>|^2 (1 + coth(h f_q / 2 k_B T)).
inline double inductive_t1_seconds(double EL_GHz, double Q_ind, double matrix_element,
                                   double fq_GHz, double temperature_K,
                                   const Units& u = Units::si()) {
    if (EL_GHz <= 0.0 || Q_ind <= 0.0 || matrix_element <= 0.0 || fq_GHz <= 0.0 ||
        temperature_K <= 0.0)
        throw InvalidInput("inductive_t1 inputs must be positive");
    const double EL = EL_GHz * Units::GHz * u.h;
    const double x = u.h * fq_GHz * Units::GHz / (2.0 * u.kB * temperature_K);
    const double rate = 8.0 * std::pow(std::numbers::pi, 3) * EL / (u.h * Q_ind) *
                        matrix_element * matrix_element * (1.0 + 1.0 / std::tanh(x));
    return 1.0 / rate;
}

/// Algebraic inverse of inductive_t1_seconds.
inline double inductive_quality_factor(double EL_GHz, double t1_seconds,
                                       double matrix_element, double fq_GHz,
                                       double temperature_K, const Units& u = Units::si()) {
    const double EL = EL_GHz * Units::GHz * u.h;
    const double x = u.h * fq_GHz * Units::GHz / (2.0 * u.kB * temperature_K);
    return 8.0 * std::pow(std::numbers::pi, 3) * EL / u.h * matrix_element *
           matrix_element * (1.0 + 1.0 / std::tanh(x)) * t1_seconds;
}

} // namespace kinetiq

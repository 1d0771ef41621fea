#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kinetiq/circuit.hpp"
#include "kinetiq/errors.hpp"
#include "kinetiq/nelder_mead.hpp"
#include "kinetiq/spectrum.hpp"

namespace kinetiq {

enum class Transition { R, Q01, Q02 };

inline std::string to_string(Transition t) {
    switch (t) {
        case Transition::R: return "R";
        case Transition::Q01: return "Q01";
        case Transition::Q02: return "Q02";
    }
    return "?";
}

inline Transition transition_from_string(const std::string& s) {
    if (s == "R") return Transition::R;
    if (s == "Q01") return Transition::Q01;
    if (s == "Q02") return Transition::Q02;
    throw InvalidInput("unknown transition label '" + s + "' (expected R|Q01|Q02)");
}

struct SpectroscopyPoint {
    double flux_phi0 = 0.0;
    double freq_GHz = 0.0;
    Transition transition = Transition::R;
    double weight = 1.0;
};

/// The five fitted circuit parameters.
struct FitTheta {
    double Lr_nH = 0.0;
    double Lq_nH = 0.0;
    double Dk_nH = 0.0;
    double EJ_GHz = 0.0;
    double CJ_fF = 0.0;

    Eigen::VectorXd to_vector() const {
        Eigen::VectorXd v(5);
        v << Lr_nH, Lq_nH, Dk_nH, EJ_GHz, CJ_fF;
        return v;
    }
    static FitTheta from_vector(const Eigen::VectorXd& v) {
        return {v[0], v[1], v[2], v[3], v[4]};
    }
    CircuitSpec applied_to(CircuitSpec spec) const {
        spec.readout_inductance_nH = Lr_nH;
        spec.loop_inductance_nH = Lq_nH;
        spec.kinetic_asymmetry_nH = Dk_nH;
        spec.josephson_energy_GHz = EJ_GHz;
        spec.junction_cap_fF = CJ_fF;
        return spec;
    }
};

struct FitProblem {
    std::vector<SpectroscopyPoint> data;
    CircuitSpec base;   // fixed capacitance table (from simulation input)
    FitTheta theta0;
    FitTheta lower{1e-3, 1e-3, -1e3, 1e-3, 1e-3};
    FitTheta upper{1e3, 1e3, 1e3, 1e3, 1e3};
    FockConfig fock;
    int max_evals = 800;     // per simplex run
    double f_tol = 1e-12;
    double x_tol = 1e-9;
    int starts = 1;          // multi-start count; start 0 is theta0 itself
    int refinements = 2;     // fresh-simplex restarts from each run's incumbent
    double jitter = 0.2;     // relative jitter of the extra starts
    unsigned seed = 1;
    double ambiguous_penalty_GHz = 1.0;
    int threads = 1;

    /// Clamp Dk bounds to the physical branch window, symmetric about zero.
    void finalize_bounds() {
        const double dmax = 0.49 * std::min(std::abs(lower.Lq_nH), upper.Lq_nH);
        lower.Dk_nH = std::max(lower.Dk_nH, -dmax);
        upper.Dk_nH = std::min(upper.Dk_nH, dmax);
    }
};

struct ResidualReport {
    Eigen::VectorXd r;                   // weighted residuals, GHz, one per point
    std::vector<std::string> failures;   // per-point model failures, recorded not thrown
    double rss() const { return r.squaredNorm(); }
};

/// Weighted residual vector: model frequency of the named transition minus the
/// measured one, times sqrt(weight). Ambiguous-labeling points contribute the
/// configured penalty instead of a model value.
inline ResidualReport residuals(const FitTheta& theta, const FitProblem& problem) {
    const CircuitSpec spec = theta.applied_to(problem.base);
    ResidualReport report;
    report.r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.data.size()));

    std::vector<double> fluxes;
    std::map<double, int> flux_slot;
    for (const auto& p : problem.data)
        if (flux_slot.emplace(p.flux_phi0, static_cast<int>(fluxes.size())).second)
            fluxes.push_back(p.flux_phi0);

    struct Slot {
        TransitionTable table;
        bool failed = false;
        std::string message;
    };
    std::vector<Slot> slots(fluxes.size());
    ModeDecomposition modes;
    bool modes_ok = true;
    std::string modes_error;
    try {
        modes = analyze_circuit(spec, problem.fock.zero_tol);
    } catch (const Error& e) {
        modes_ok = false;
        modes_error = e.what();
    }
    if (modes_ok) {
        detail::parallel_for(static_cast<int>(fluxes.size()), problem.threads, [&](int i) {
            try {
                slots[i].table = transitions_at(modes, spec.josephson_energy_GHz,
                                                fluxes[i], problem.fock);
            } catch (const Error& e) {
                slots[i].failed = true;
                slots[i].message = e.what();
            }
        });
    }

    for (Eigen::Index k = 0; k < report.r.size(); ++k) {
        const auto& p = problem.data[static_cast<size_t>(k)];
        const double sw = std::sqrt(std::max(0.0, p.weight));
        if (!modes_ok) {
            report.r[k] = problem.ambiguous_penalty_GHz * sw;
            report.failures.push_back("flux " + std::to_string(p.flux_phi0) + ": " +
                                      modes_error);
            continue;
        }
        const Slot& slot = slots[static_cast<size_t>(flux_slot.at(p.flux_phi0))];
        if (slot.failed || slot.table.ambiguous) {
            report.r[k] = problem.ambiguous_penalty_GHz * sw;
            if (slot.failed)
                report.failures.push_back("flux " + std::to_string(p.flux_phi0) + ": " +
                                          slot.message);
            continue;
        }
        double model = 0.0;
        switch (p.transition) {
            case Transition::R: model = slot.table.fr0_GHz; break;
            case Transition::Q01: model = slot.table.fq01_GHz; break;
            case Transition::Q02: model = slot.table.fq02_GHz; break;
        }
        report.r[k] = (model - p.freq_GHz) * sw;
    }
    return report;
}

struct FitResult {
    FitTheta theta;
    double rss = 0.0;                       // weighted residual sum of squares, GHz^2
    Eigen::VectorXd per_point_residuals;    // at theta
    bool converged = false;
    int evals = 0;
    std::vector<double> best_history;       // best-so-far RSS, non-increasing
    std::vector<std::string> warnings;
};

/// Simplex descent on the weighted RSS with bound clipping and optional
/// multi-start (extra starts jittered around theta0). Deterministic per seed.
inline FitResult fit_parameters(const FitProblem& problem_in) {
    FitProblem problem = problem_in;
    problem.finalize_bounds();

    FitResult result;
    std::set<int> kinds;
    for (const auto& p : problem.data) kinds.insert(static_cast<int>(p.transition));
    if (problem.data.size() < 5 || kinds.size() < 2)
        result.warnings.push_back(
            "fit is underdetermined: need at least 5 points spanning 2 transitions");

    auto objective = [&](const Eigen::VectorXd& v) {
        return residuals(FitTheta::from_vector(v), problem).rss();
    };

    NelderMeadOptions opts;
    opts.max_evals = problem.max_evals;
    opts.f_tol = problem.f_tol;
    opts.x_tol = problem.x_tol;

    std::mt19937_64 rng(problem.seed);
    std::uniform_real_distribution<double> jitter(-problem.jitter, problem.jitter);

    const Eigen::VectorXd lo = problem.lower.to_vector();
    const Eigen::VectorXd hi = problem.upper.to_vector();
    bool have_best = false;
    NelderMeadResult best;
    int total_evals = 0;
    for (int s = 0; s < std::max(1, problem.starts); ++s) {
        Eigen::VectorXd x0 = problem.theta0.to_vector();
        if (s > 0)
            for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] *= 1.0 + jitter(rng);
        NelderMeadResult r = nelder_mead(objective, x0, lo, hi, opts);
        total_evals += r.evals;
        // a collapsed simplex restarted at its incumbent often keeps descending
        NelderMeadOptions fine = opts;
        fine.initial_step = 0.01;
        for (int ref = 0; ref < problem.refinements && !r.converged; ++ref) {
            NelderMeadResult r2 = nelder_mead(objective, r.x, lo, hi, fine);
            total_evals += r2.evals;
            r2.best_history.insert(r2.best_history.begin(), r.best_history.begin(),
                                   r.best_history.end());
            if (r2.fmin <= r.fmin) r = std::move(r2);
        }
        if (!have_best || r.fmin < best.fmin) {
            best = std::move(r);
            have_best = true;
        }
    }

    result.theta = FitTheta::from_vector(best.x);
    const ResidualReport report = residuals(result.theta, problem);
    result.rss = report.rss();
    result.per_point_residuals = report.r;
    result.converged = best.converged;
    result.evals = total_evals;
    result.best_history = std::move(best.best_history);
    if (!result.converged)
        result.warnings.push_back("optimizer stopped at the evaluation budget before "
                                  "meeting f_tol/x_tol");
    return result;
}

/// Starting-point heuristic: L_R from the far-detuned readout branch and the
/// reduced capacitances, E_J from twice the inductive energy, C_J a few fF.
/// Coarse by construction; meant to seed fit_parameters, not replace it.
inline FitTheta initial_guess(const std::vector<SpectroscopyPoint>& data,
                              const CircuitSpec& base) {
    std::vector<double> r_freqs, q_freqs;
    for (const auto& p : data)
        (p.transition == Transition::R ? r_freqs : q_freqs).push_back(p.freq_GHz);
    FitTheta theta{12.0, 30.0, 0.2, 8.0, 3.0};
    const IdealizedParams ideal = reduce_to_idealized(symmetrized(base));
    if (!r_freqs.empty()) {
        std::nth_element(r_freqs.begin(), r_freqs.begin() + r_freqs.size() / 2,
                         r_freqs.end());
        const double fr = r_freqs[r_freqs.size() / 2] * Units::GHz;
        const double LR =
            1.0 / (std::pow(2.0 * std::numbers::pi * fr, 2) * ideal.CR_fF * Units::fF);
        theta.Lr_nH = std::max(0.5, LR / Units::nH - theta.Lq_nH / 4.0 + theta.Dk_nH);
    }
    theta.EJ_GHz = 2.0 * inductive_energy_GHz(theta.Lq_nH);
    return theta;
}

} // namespace kinetiq

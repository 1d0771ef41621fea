#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "kinetiq/errors.hpp"
#include "kinetiq/nelder_mead.hpp"

namespace kinetiq {

struct PiPulseRecord {
    int n = 0;            // pulse count
    double population = 0.0;
};

/// Qubit population after n nominal pi-pulses:
///   P(n) = a (1/2 - 1/2 cos(pi n + 2 pi f n)) exp(-gamma n) + o.
inline double pipulse_population(int n, double a, double o, double f, double gamma) {
    if (n < 0) throw InvalidInput("pulse count must be non-negative");
    return a * (0.5 - 0.5 * std::cos(std::numbers::pi * n + 2.0 * std::numbers::pi * f * n)) *
               std::exp(-gamma * n) +
           o;
}

/// F_pi = (P(1) - P(0)) / a = (1/2 - 1/2 cos(pi + 2 pi f)) exp(-gamma).
inline double pipulse_fidelity(double f, double gamma) {
    return (0.5 - 0.5 * std::cos(std::numbers::pi + 2.0 * std::numbers::pi * f)) *
           std::exp(-gamma);
}

struct PiPulseFit {
    double a = 1.0;
    double o = 0.0;
    double f = 0.0;          // beating frequency per pulse
    double gamma = 0.0;      // decay rate per pulse
    double F_pi = 1.0;
    double F_pi_no_decay = 1.0;  // gamma forced to zero
    bool converged = false;
    double rss = 0.0;
};

/// Least-squares fit of (a, o, f, gamma) to a pulse train.
inline PiPulseFit fit_pipulse(std::span<const PiPulseRecord> records, int max_evals = 6000) {
    if (records.size() < 8)
        throw InvalidInput("fit_pipulse: need at least 8 records");

    auto rss_of = [&](const Eigen::VectorXd& v) {
        double rss = 0.0;
        for (const auto& rec : records) {
            const double d =
                pipulse_population(rec.n, v[0], v[1], v[2], v[3]) - rec.population;
            rss += d * d;
        }
        return rss;
    };

    double pmin = records[0].population, pmax = records[0].population;
    for (const auto& rec : records) {
        pmin = std::min(pmin, rec.population);
        pmax = std::max(pmax, rec.population);
    }
    Eigen::VectorXd x0(4), lo(4), hi(4);
    x0 << std::max(0.1, pmax - pmin), pmin, 0.0, 0.01;
    lo << 1e-3, -1.0, -0.45, 0.0;
    hi << 2.0, 1.0, 0.45, 1.0;

    NelderMeadOptions opts;
    opts.max_evals = max_evals;
    opts.f_tol = 1e-14;
    opts.x_tol = 1e-10;
    NelderMeadResult best = nelder_mead(rss_of, x0, lo, hi, opts);
    // the beating phase is easy to miss from a cold start; retry from a few
    // fixed frequency offsets and keep the best
    for (double f0 : {0.02, 0.05, 0.1, -0.02, -0.05, -0.1}) {
        Eigen::VectorXd xf = x0;
        xf[2] = f0;
        NelderMeadResult r = nelder_mead(rss_of, xf, lo, hi, opts);
        if (r.fmin < best.fmin) best = r;
    }

    PiPulseFit fit;
    fit.a = best.x[0];
    fit.o = best.x[1];
    fit.f = best.x[2];
    fit.gamma = best.x[3];
    fit.F_pi = pipulse_fidelity(fit.f, fit.gamma);
    fit.F_pi_no_decay = pipulse_fidelity(fit.f, 0.0);
    fit.converged = best.converged;
    fit.rss = best.fmin;
    return fit;
}

struct StarkRecord {
    double power = 0.0;       // drive power, arbitrary linear units
    double delta_f_MHz = 0.0; // Ramsey detuning shift
};

struct StarkFit {
    double slope_MHz_per_power = 0.0;
    double intercept_MHz = 0.0;   // diagnostic; forced to 0 in zero-intercept mode
    bool zero_intercept = true;
};

/// Ordinary least-squares line through the Stark records. A nonzero intercept
/// flags drive leakage and is reported, never silently removed.
inline StarkFit fit_stark(std::span<const StarkRecord> records, bool with_intercept = false) {
    if (records.size() < 2)
        throw DegenerateFit("fit_stark: need at least 2 records");
    double p0 = records[0].power;
    bool distinct = false;
    for (const auto& r : records)
        if (r.power != p0) distinct = true;
    if (!distinct) throw DegenerateFit("fit_stark: need at least 2 distinct powers");

    StarkFit fit;
    fit.zero_intercept = !with_intercept;
    const double n = double(records.size());
    double sp = 0.0, sf = 0.0, spp = 0.0, spf = 0.0;
    for (const auto& r : records) {
        sp += r.power;
        sf += r.delta_f_MHz;
        spp += r.power * r.power;
        spf += r.power * r.delta_f_MHz;
    }
    if (with_intercept) {
        const double denom = n * spp - sp * sp;
        fit.slope_MHz_per_power = (n * spf - sp * sf) / denom;
        fit.intercept_MHz = (sf - fit.slope_MHz_per_power * sp) / n;
    } else {
        fit.slope_MHz_per_power = spf / spp;
        fit.intercept_MHz = 0.0;
    }
    return fit;
}

/// AC-Stark photon calibration: n = delta_f / chi with delta_f = slope * power.
inline double photons_from_power(const StarkFit& fit, double chi_MHz, double power) {
    if (chi_MHz == 0.0) throw InvalidInput("photons_from_power: chi must be nonzero");
    return fit.slope_MHz_per_power * power / chi_MHz;
}

} // namespace kinetiq

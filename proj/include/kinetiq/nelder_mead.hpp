#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kinetiq/errors.hpp"

namespace kinetiq {

struct NelderMeadOptions {
    int max_evals = 2000;
    double f_tol = 1e-10;   // absolute spread of simplex values
    double x_tol = 1e-10;   // max vertex distance from best
    double initial_step = 0.05;  // relative simplex size (absolute for zero coords)
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fmin = 0.0;
    int evals = 0;
    bool converged = false;
    std::vector<double> best_history;  // best-so-far value after each accepted move
};

/// Derivative-free simplex descent (reflection / expansion / contraction /
/// shrink) with box-bound clipping. Deterministic.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi,
                                    const NelderMeadOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    if (lo.size() != n || hi.size() != n)
        throw InvalidInput("nelder_mead: bound dimensions do not match x0");

    auto clip = [&](Eigen::VectorXd x) {
        return x.cwiseMax(lo).cwiseMin(hi).eval();
    };

    NelderMeadResult result;
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };

    std::vector<Eigen::VectorXd> simplex(n + 1);
    std::vector<double> fx(n + 1);
    simplex[0] = clip(x0);
    fx[0] = eval(simplex[0]);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = simplex[0];
        const double step =
            v[i] != 0.0 ? opts.initial_step * std::abs(v[i])
                        : opts.initial_step * std::max(1e-3, (hi[i] - lo[i]) * 0.1);
        v[i] += step;
        if (v[i] > hi[i]) v[i] -= 2.0 * step;
        simplex[i + 1] = clip(v);
        fx[i + 1] = eval(simplex[i + 1]);
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::vector<Eigen::VectorXd> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fx[idx[i]];
        }
        simplex.swap(s2);
        fx.swap(f2);
    };

    order();
    result.best_history.push_back(fx[0]);
    while (evals < opts.max_evals) {
        const double spread = std::abs(fx[n] - fx[0]);
        double xspread = 0.0;
        for (int i = 1; i <= n; ++i)
            xspread = std::max(xspread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
        if (spread <= opts.f_tol && xspread <= opts.x_tol) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += simplex[i];
        centroid /= n;

        const Eigen::VectorXd xr = clip(centroid + alpha * (centroid - simplex[n]));
        const double fr = eval(xr);
        if (fr < fx[0]) {
            const Eigen::VectorXd xe = clip(centroid + gamma * (xr - centroid));
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fx[n] = fe;
            } else {
                simplex[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            simplex[n] = xr;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const Eigen::VectorXd base = outside ? xr : simplex[n];
            const Eigen::VectorXd xc = clip(centroid + rho * (base - centroid));
            const double fc = eval(xc);
            if (fc < (outside ? fr : fx[n])) {
                simplex[n] = xc;
                fx[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    simplex[i] = clip(simplex[0] + sigma * (simplex[i] - simplex[0]));
                    fx[i] = eval(simplex[i]);
                }
            }
        }
        order();
        result.best_history.push_back(fx[0]);
    }

    result.x = simplex[0];
    result.fmin = fx[0];
    result.evals = evals;
    return result;
}

} // namespace kinetiq

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kinetiq/errors.hpp"

namespace kinetiq {

struct IQSample {
    double i = 0.0;
    double q = 0.0;
    long t = 0;  // sample index
};

enum class QubitState { Ground = 0, Excited = 1, Other = 2 };

inline std::string to_string(QubitState s) {
    switch (s) {
        case QubitState::Ground: return "g0";
        case QubitState::Excited: return "e1";
        case QubitState::Other: return "other2plus";
    }
    return "?";
}

/// Gaussian mixture over the IQ plane.
struct GmmModel {
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> covariances;
    std::vector<double> weights;               // simplex
    std::vector<QubitState> state_map;         // component -> physical state
    double log_likelihood = 0.0;
    std::vector<double> loglik_history;        // per EM iteration
    int iterations = 0;

    int components() const { return static_cast<int>(means.size()); }

    int component_of(QubitState s) const {
        for (int k = 0; k < components(); ++k)
            if (state_map[k] == s) return k;
        throw NoOccupancy("no mixture component is mapped to state " + to_string(s));
    }
};

namespace detail {

inline double log_gauss2(const Eigen::Vector2d& x, const Eigen::Vector2d& mu,
                         const Eigen::Matrix2d& cov_inv, double log_det) {
    const Eigen::Vector2d d = x - mu;
    return -0.5 * (d.dot(cov_inv * d) + log_det) - std::numbers::ln2 -
           std::log(std::numbers::pi);  // -log(2 pi) for the 2-D normalizer
}

/// Farthest-point initial means: first center drawn with the seed, the rest
/// maximize the distance to the chosen set.
inline std::vector<Eigen::Vector2d> farthest_point_means(std::span<const IQSample> samples,
                                                         int K, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
    std::vector<Eigen::Vector2d> means;
    const IQSample& first = samples[pick(rng)];
    means.emplace_back(first.i, first.q);
    std::vector<double> dist(samples.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(means.size()) < K) {
        size_t far = 0;
        double best = -1.0;
        for (size_t n = 0; n < samples.size(); ++n) {
            const Eigen::Vector2d x(samples[n].i, samples[n].q);
            dist[n] = std::min(dist[n], (x - means.back()).squaredNorm());
            if (dist[n] > best) {
                best = dist[n];
                far = n;
            }
        }
        means.emplace_back(samples[far].i, samples[far].q);
    }
    return means;
}

} // namespace detail

/// Map components to states by descending weight: heaviest -> ground, next ->
/// excited, the rest -> other.
inline void map_states_by_weight(GmmModel& model) {
    std::vector<int> idx(model.components());
    for (int k = 0; k < model.components(); ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return model.weights[a] > model.weights[b]; });
    model.state_map.assign(model.components(), QubitState::Other);
    model.state_map[idx[0]] = QubitState::Ground;
    if (model.components() > 1) model.state_map[idx[1]] = QubitState::Excited;
}

/// Calibration mode: map each labeled reference pointer state to its nearest
/// component; components left over become Other.
inline void map_states_by_reference(
    GmmModel& model,
    std::span<const std::pair<Eigen::Vector2d, QubitState>> references) {
    model.state_map.assign(model.components(), QubitState::Other);
    for (const auto& [point, state] : references) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < model.components(); ++k) {
            const double d = (model.means[k] - point).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        model.state_map[best] = state;
    }
}

/// Standard EM for a K-component 2-D Gaussian mixture, farthest-point seeded.
/// Covariances are regularized by +eps*I with eps = 1e-9 times the data
/// variance; a component collapsing below that floor raises SingularComponent.
inline GmmModel fit_gmm(std::span<const IQSample> samples, int K = 3, unsigned seed = 0,
                        int max_iters = 300, double tol = 1e-8) {
    const size_t n = samples.size();
    if (K < 1) throw InvalidInput("fit_gmm: K must be at least 1");
    if (n < static_cast<size_t>(10 * K))
        throw InvalidInput("fit_gmm: need at least 10 samples per component");

    Eigen::Vector2d data_mean = Eigen::Vector2d::Zero();
    for (const auto& s : samples) data_mean += Eigen::Vector2d(s.i, s.q);
    data_mean /= double(n);
    double data_var = 0.0;
    for (const auto& s : samples)
        data_var += (Eigen::Vector2d(s.i, s.q) - data_mean).squaredNorm();
    data_var /= (2.0 * double(n));
    const double eps = 1e-9 * data_var;
    if (data_var <= 0.0)
        throw SingularComponent("all samples are identical, no mixture can be fit");

    GmmModel model;
    model.means = detail::farthest_point_means(samples, K, seed);
    model.covariances.assign(K, data_var * Eigen::Matrix2d::Identity());
    model.weights.assign(K, 1.0 / K);

    Eigen::MatrixXd resp(n, K);
    std::vector<Eigen::Matrix2d> cov_inv(K);
    std::vector<double> log_det(K), log_w(K);

    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int k = 0; k < K; ++k) {
            Eigen::Matrix2d cov = model.covariances[k];
            cov += eps * Eigen::Matrix2d::Identity();
            const double det = cov.determinant();
            if (!(det > 0.0) || !std::isfinite(det))
                throw SingularComponent("component " + std::to_string(k) +
                                        " collapsed below the covariance floor");
            cov_inv[k] = cov.inverse();
            log_det[k] = std::log(det);
            log_w[k] = std::log(std::max(model.weights[k], 1e-300));
        }

        // E-step with log-sum-exp
        double ll = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d x(samples[i].i, samples[i].q);
            double mx = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                resp(i, k) = log_w[k] + detail::log_gauss2(x, model.means[k], cov_inv[k],
                                                           log_det[k]);
                mx = std::max(mx, resp(i, k));
            }
            double sum = 0.0;
            for (int k = 0; k < K; ++k) sum += std::exp(resp(i, k) - mx);
            const double log_norm = mx + std::log(sum);
            ll += log_norm;
            for (int k = 0; k < K; ++k) resp(i, k) = std::exp(resp(i, k) - log_norm);
        }
        model.log_likelihood = ll;
        model.loglik_history.push_back(ll);
        model.iterations = iter + 1;

        // M-step
        for (int k = 0; k < K; ++k) {
            const double nk = resp.col(k).sum();
            if (nk < 1e-12)
                throw SingularComponent("component " + std::to_string(k) +
                                        " lost all responsibility mass");
            Eigen::Vector2d mu = Eigen::Vector2d::Zero();
            for (size_t i = 0; i < n; ++i)
                mu += resp(i, k) * Eigen::Vector2d(samples[i].i, samples[i].q);
            mu /= nk;
            Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
            for (size_t i = 0; i < n; ++i) {
                const Eigen::Vector2d d = Eigen::Vector2d(samples[i].i, samples[i].q) - mu;
                cov += resp(i, k) * d * d.transpose();
            }
            cov /= nk;
            model.means[k] = mu;
            model.covariances[k] = cov + eps * Eigen::Matrix2d::Identity();
            model.weights[k] = nk / double(n);
        }

        if (ll - prev_ll < tol && iter > 0) break;
        prev_ll = ll;
    }

    map_states_by_weight(model);
    return model;
}

/// Argmax-responsibility component of one sample; equidistant ties resolve to
/// the lower component index.
inline int assign_component(const GmmModel& model, const IQSample& s) {
    const Eigen::Vector2d x(s.i, s.q);
    int best = 0;
    double best_lp = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < model.components(); ++k) {
        Eigen::Matrix2d cov = model.covariances[k];
        const double lp = std::log(std::max(model.weights[k], 1e-300)) +
                          detail::log_gauss2(x, model.means[k], cov.inverse(),
                                             std::log(cov.determinant()));
        if (lp > best_lp + 1e-15) {
            best_lp = lp;
            best = k;
        }
    }
    return best;
}

using StateSequence = std::vector<QubitState>;

inline StateSequence assign_states(const GmmModel& model, std::span<const IQSample> samples) {
    std::vector<Eigen::Matrix2d> cov_inv(model.components());
    std::vector<double> log_det(model.components()), log_w(model.components());
    for (int k = 0; k < model.components(); ++k) {
        cov_inv[k] = model.covariances[k].inverse();
        log_det[k] = std::log(model.covariances[k].determinant());
        log_w[k] = std::log(std::max(model.weights[k], 1e-300));
    }
    StateSequence seq(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const Eigen::Vector2d x(samples[i].i, samples[i].q);
        int best = 0;
        double best_lp = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < model.components(); ++k) {
            const double lp =
                log_w[k] + detail::log_gauss2(x, model.means[k], cov_inv[k], log_det[k]);
            if (lp > best_lp + 1e-15) {
                best_lp = lp;
                best = k;
            }
        }
        seq[i] = model.state_map[best];
    }
    return seq;
}

} // namespace kinetiq

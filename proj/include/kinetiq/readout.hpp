#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "kinetiq/errors.hpp"
#include "kinetiq/gmm.hpp"

namespace kinetiq {

/// Populations, consecutive-measurement correlations and SNR of one trace.
struct ReadoutStats {
    double p_ground = 0.0;
    double p_excited = 0.0;
    double p_other = 0.0;
    std::optional<double> p00;  // absent when the state never starts a pair
    std::optional<double> p11;
    double snr = 0.0;
    long count = 0;
};

/// Empirical populations and conditional correlations
/// P_xx = #(x -> x) / #(pairs starting in x).
inline ReadoutStats correlations(std::span<const QubitState> seq) {
    if (seq.size() < 2) throw InvalidInput("correlations: need at least 2 samples");
    ReadoutStats stats;
    stats.count = static_cast<long>(seq.size());
    long counts[3] = {0, 0, 0};
    long starts[2] = {0, 0};
    long stays[2] = {0, 0};
    for (size_t i = 0; i < seq.size(); ++i) {
        ++counts[static_cast<int>(seq[i])];
        if (i + 1 < seq.size()) {
            const int s = static_cast<int>(seq[i]);
            if (s < 2) {
                ++starts[s];
                if (seq[i + 1] == seq[i]) ++stays[s];
            }
        }
    }
    stats.p_ground = double(counts[0]) / double(seq.size());
    stats.p_excited = double(counts[1]) / double(seq.size());
    stats.p_other = double(counts[2]) / double(seq.size());
    if (starts[0] > 0) stats.p00 = double(stays[0]) / double(starts[0]);
    if (starts[1] > 0) stats.p11 = double(stays[1]) / double(starts[1]);
    return stats;
}

/// SNR = |mu_0 - mu_1| / (sigma_0 + sigma_1), with each sigma the standard
/// deviation of that component projected on the unit vector between the means.
inline double snr(const GmmModel& model) {
    const int g = model.component_of(QubitState::Ground);
    const int e = model.component_of(QubitState::Excited);
    const Eigen::Vector2d d = model.means[e] - model.means[g];
    const double dist = d.norm();
    if (dist == 0.0) return 0.0;
    const Eigen::Vector2d u = d / dist;
    const double s0 = std::sqrt(u.dot(model.covariances[g] * u));
    const double s1 = std::sqrt(u.dot(model.covariances[e] * u));
    return dist / (s0 + s1);
}

/// Fraction of post-reset measurements found in the target state.
inline double reset_fidelity(std::span<const QubitState> pre,
                             std::span<const QubitState> post, QubitState target) {
    if (pre.size() != post.size())
        throw LengthMismatch("reset_fidelity: pre and post sequences differ in length");
    if (post.empty()) throw InvalidInput("reset_fidelity: empty sequences");
    long hits = 0;
    for (const QubitState s : post)
        if (s == target) ++hits;
    return double(hits) / double(post.size());
}

struct MarkovTrace {
    std::vector<int> states;       // generator truth
    std::vector<IQSample> samples;
};

/// Test oracle: a Markov chain over the model's components emitting Gaussian
/// IQ samples. Initial state drawn uniformly. Deterministic per seed.
inline MarkovTrace synth_trace(const Eigen::MatrixXd& transition, const GmmModel& emission,
                               long n, unsigned seed) {
    const int K = static_cast<int>(transition.rows());
    if (transition.cols() != K || K < 1 || K > emission.components())
        throw InvalidStochasticMatrix("transition matrix shape does not match the model");
    for (int r = 0; r < K; ++r) {
        if (transition.row(r).minCoeff() < 0.0 ||
            std::abs(transition.row(r).sum() - 1.0) > 1e-9)
            throw InvalidStochasticMatrix("row " + std::to_string(r) +
                                          " is not a probability distribution");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<Eigen::Matrix2d> chol(K);
    for (int k = 0; k < K; ++k)
        chol[k] = Eigen::LLT<Eigen::Matrix2d>(emission.covariances[k]).matrixL();

    MarkovTrace trace;
    trace.states.reserve(n);
    trace.samples.reserve(n);
    int state = std::uniform_int_distribution<int>(0, K - 1)(rng);
    for (long i = 0; i < n; ++i) {
        if (i > 0) {
            const double u = unif(rng);
            double acc = 0.0;
            int next = K - 1;
            for (int k = 0; k < K; ++k) {
                acc += transition(state, k);
                if (u < acc) {
                    next = k;
                    break;
                }
            }
            state = next;
        }
        const Eigen::Vector2d z(normal(rng), normal(rng));
        const Eigen::Vector2d x = emission.means[state] + chol[state] * z;
        trace.states.push_back(state);
        trace.samples.push_back({x[0], x[1], i});
    }
    return trace;
}

} // namespace kinetiq

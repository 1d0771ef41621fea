#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kinetiq/gmm.hpp"
#include "kinetiq/readout.hpp"

using namespace kinetiq;
using Catch::Approx;

namespace {

std::vector<IQSample> two_blob_samples(const Eigen::Vector2d& mu0,
                                       const Eigen::Vector2d& mu1, double sigma,
                                       size_t n, unsigned seed, double frac1 = 0.3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::bernoulli_distribution which(frac1);
    std::vector<IQSample> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d mu = which(rng) ? mu1 : mu0;
        out.push_back({mu[0] + gauss(rng), mu[1] + gauss(rng), long(i)});
    }
    return out;
}

} // namespace

TEST_CASE("EM recovers two well-separated Gaussians") {
    const Eigen::Vector2d mu0(0.0, 0.0), mu1(8.0, 3.0);
    const double sigma = 1.0;
    const auto samples = two_blob_samples(mu0, mu1, sigma, 20000, 3);
    const GmmModel model = fit_gmm(samples, 2, 3);

    const int g = model.component_of(QubitState::Ground);
    const int e = model.component_of(QubitState::Excited);
    REQUIRE((model.means[g] - mu0).norm() < 0.5 * sigma);
    REQUIRE((model.means[e] - mu1).norm() < 0.5 * sigma);
    REQUIRE(model.weights[g] == Approx(0.7).margin(0.02));
    REQUIRE(model.weights[g] + model.weights[e] == Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 2; ++k) {
        Eigen::LLT<Eigen::Matrix2d> llt(model.covariances[k]);
        REQUIRE(llt.info() == Eigen::Success);
    }
}

TEST_CASE("identical samples cannot support a mixture") {
    std::vector<IQSample> flat(100, IQSample{1.0, -2.0, 0});
    REQUIRE_THROWS_AS(fit_gmm(flat, 2, 1), SingularComponent);
}

TEST_CASE("training log-likelihood never decreases") {
    const auto samples =
        two_blob_samples({0.0, 0.0}, {4.0, 1.0}, 1.2, 5000, 17, 0.45);
    const GmmModel model = fit_gmm(samples, 3, 11);
    for (size_t i = 1; i < model.loglik_history.size(); ++i)
        REQUIRE(model.loglik_history[i] >= model.loglik_history[i - 1] - 1e-10);
}

TEST_CASE("translation equivariance") {
    const auto samples = two_blob_samples({0.0, 0.0}, {6.0, 0.0}, 1.0, 8000, 5);
    const Eigen::Vector2d shift(13.5, -4.25);
    std::vector<IQSample> moved = samples;
    for (auto& s : moved) {
        s.i += shift[0];
        s.q += shift[1];
    }
    const GmmModel a = fit_gmm(samples, 2, 9);
    const GmmModel b = fit_gmm(moved, 2, 9);
    for (int k = 0; k < 2; ++k) {
        REQUIRE((b.means[k] - a.means[k] - shift).norm() < 1e-8);
        REQUIRE((b.covariances[k] - a.covariances[k]).cwiseAbs().maxCoeff() < 1e-8);
        REQUIRE(b.weights[k] == Approx(a.weights[k]).margin(1e-8));
    }
}

TEST_CASE("rotation equivariance of the full analysis") {
    const auto samples = two_blob_samples({1.0, 2.0}, {7.0, 2.0}, 1.0, 8000, 23);
    const double theta = 0.7;
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    std::vector<IQSample> rotated = samples;
    for (auto& s : rotated) {
        const Eigen::Vector2d x = R * Eigen::Vector2d(s.i, s.q);
        s.i = x[0];
        s.q = x[1];
    }
    const GmmModel a = fit_gmm(samples, 2, 29);
    const GmmModel b = fit_gmm(rotated, 2, 29);

    // means and covariances rotate
    for (int k = 0; k < 2; ++k) {
        REQUIRE((b.means[k] - R * a.means[k]).norm() < 1e-6);
        REQUIRE((b.covariances[k] - R * a.covariances[k] * R.transpose())
                    .cwiseAbs()
                    .maxCoeff() < 1e-6);
    }
    // assignments, populations, correlations and SNR are invariant
    const StateSequence sa = assign_states(a, samples);
    const StateSequence sb = assign_states(b, rotated);
    REQUIRE(sa == sb);
    const ReadoutStats ra = correlations(sa);
    const ReadoutStats rb = correlations(sb);
    REQUIRE(ra.p_ground == Approx(rb.p_ground).margin(1e-12));
    REQUIRE(*ra.p00 == Approx(*rb.p00).margin(1e-12));
    REQUIRE(snr(a) == Approx(snr(b)).epsilon(1e-6));
}

TEST_CASE("sample at a component mean is assigned to that component") {
    GmmModel model;
    model.means = {{0.0, 0.0}, {10.0, 0.0}};
    model.covariances = {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
    model.weights = {0.5, 0.5};
    model.state_map = {QubitState::Ground, QubitState::Excited};
    REQUIRE(assign_component(model, {0.0, 0.0, 0}) == 0);
    REQUIRE(assign_component(model, {10.0, 0.0, 0}) == 1);
    // equidistant tie resolves to the lower component index
    REQUIRE(assign_component(model, {5.0, 0.0, 0}) == 0);
    const StateSequence seq =
        assign_states(model, std::vector<IQSample>{{5.0, 0.0, 0}, {10.0, 0.1, 1}});
    REQUIRE(seq[0] == QubitState::Ground);
    REQUIRE(seq[1] == QubitState::Excited);
}

TEST_CASE("reference pointer states override the weight-ordered map") {
    GmmModel model;
    model.means = {{0.0, 0.0}, {10.0, 0.0}};
    model.covariances = {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
    model.weights = {0.9, 0.1};
    map_states_by_weight(model);
    REQUIRE(model.state_map[0] == QubitState::Ground);
    const std::vector<std::pair<Eigen::Vector2d, QubitState>> refs = {
        {{10.1, 0.0}, QubitState::Ground}, {{-0.1, 0.0}, QubitState::Excited}};
    map_states_by_reference(model, refs);
    REQUIRE(model.state_map[0] == QubitState::Excited);
    REQUIRE(model.state_map[1] == QubitState::Ground);
}

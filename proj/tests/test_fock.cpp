#include <catch2/catch_amalgamated.hpp>

#include "kinetiq/fock.hpp"
#include "kinetiq/io.hpp"
#include "kinetiq/modes.hpp"

using namespace kinetiq;
using Catch::Approx;

namespace {

CircuitSpec load(const std::string& name) {
    return io::load_device(std::string(KINETIQ_DEVICE_DIR) + "/" + name + ".json");
}

/// Oracle: cos(A) by its Taylor series, summed to the given even order.
Eigen::MatrixXd cos_taylor(const Eigen::MatrixXd& A, int order = 40) {
    const Eigen::MatrixXd A2 = A * A;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(A.rows(), A.cols());
    Eigen::MatrixXd sum = term;
    double sign = 1.0;
    for (int k = 1; 2 * k <= order; ++k) {
        term = term * A2 / double((2 * k - 1) * (2 * k));
        sign = -sign;
        sum += sign * term;
    }
    return sum;
}

} // namespace

TEST_CASE("EJ = 0 gives the bare harmonic ladder") {
    FockConfig cfg;
    cfg.n_res = 5;
    cfg.n_qubit = 7;
    const Eigen::MatrixXd H = build_hamiltonian(6.0, 4.0, 0.1, 0.5, 0.0, 0.3, cfg);
    for (int r = 0; r < cfg.n_res; ++r)
        for (int q = 0; q < cfg.n_qubit; ++q) {
            const int k = r * cfg.n_qubit + q;
            REQUIRE(H(k, k) == Approx(6.0 * (r + 0.5) + 4.0 * (q + 0.5)).epsilon(1e-12));
        }
    Eigen::MatrixXd off = H;
    off.diagonal().setZero();
    REQUIRE(off.cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-13));
}

TEST_CASE("zero couplings at zero flux shift the ladder by -EJ") {
    FockConfig cfg;
    cfg.n_res = 4;
    cfg.n_qubit = 4;
    const double EJ = 3.7;
    const Eigen::MatrixXd H = build_hamiltonian(5.0, 2.0, 0.0, 0.0, EJ, 0.0, cfg);
    const Eigen::MatrixXd H0 = build_hamiltonian(5.0, 2.0, 0.0, 0.0, 0.0, 0.0, cfg);
    REQUIRE((H - (H0 - EJ * Eigen::MatrixXd::Identity(16, 16))).cwiseAbs().maxCoeff() <
            1e-12);
}

TEST_CASE("eigendecomposition cosine equals the order-40 Taylor series") {
    FockConfig cfg;
    cfg.n_res = 8;
    cfg.n_qubit = 8;
    for (double flux : {0.0, 0.5}) {
        for (auto [lr, lq] : {std::pair{0.15, 0.9}, {0.4, 0.4}, {0.0, 1.2}}) {
            Eigen::MatrixXd A = fock::junction_phase_operator(lr, lq, cfg);
            A.diagonal().array() -= 2.0 * std::numbers::pi * flux;
            // operator norm below the Taylor convergence radius used
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
            REQUIRE(es.eigenvalues().cwiseAbs().maxCoeff() < 10.0);
            const Eigen::MatrixXd exact = fock::cos_hermitian(A);
            const Eigen::MatrixXd series = cos_taylor(A);
            REQUIRE((exact - series).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("factored cosine equals direct eigendecomposition of the full argument") {
    FockConfig cfg;
    cfg.n_res = 6;
    cfg.n_qubit = 9;
    const double lr = 0.21, lq = 0.83, EJ = 4.1, flux = 0.37;
    const Eigen::MatrixXd H = build_hamiltonian(5.5, 3.3, lr, lq, EJ, flux, cfg);
    Eigen::MatrixXd A = fock::junction_phase_operator(lr, lq, cfg);
    A.diagonal().array() -= 2.0 * std::numbers::pi * flux;
    Eigen::MatrixXd Href = -EJ * fock::cos_hermitian(A);
    for (int r = 0; r < cfg.n_res; ++r)
        for (int q = 0; q < cfg.n_qubit; ++q)
            Href(r * cfg.n_qubit + q, r * cfg.n_qubit + q) +=
                5.5 * (r + 0.5) + 3.3 * (q + 0.5);
    REQUIRE((H - Href).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constructed Hamiltonians are Hermitian") {
    const CircuitSpec q7 = load("q7");
    const ModeDecomposition m = analyze_circuit(q7);
    FockConfig cfg;
    for (double flux : {0.0, 0.23, 0.5}) {
        const Eigen::MatrixXd H =
            build_hamiltonian(m, q7.josephson_energy_GHz, flux, cfg);
        const double herm = (H - H.transpose()).cwiseAbs().maxCoeff();
        REQUIRE(herm < 1e-12 * H.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("q7 ground energy at half flux, frozen from the enlarged Taylor oracle") {
    const CircuitSpec q7 = load("q7");
    const ModeDecomposition m = analyze_circuit(q7);

    FockConfig cfg;  // production truncation (15, 30)
    const Eigen::MatrixXd H = build_hamiltonian(m, q7.josephson_energy_GHz, 0.5, cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    REQUIRE(es.eigenvalues()[0] == Approx(10.0400052214).epsilon(1e-9));

    // live oracle: Taylor cosine on the enlarged (20, 40) space
    FockConfig big = cfg.enlarged(5, 10);
    Eigen::MatrixXd A = fock::junction_phase_operator(m.lambda_readout, m.lambda_qubit, big);
    A.diagonal().array() -= 2.0 * std::numbers::pi * 0.5;
    Eigen::MatrixXd Ht = -q7.josephson_energy_GHz * cos_taylor(A);
    for (int r = 0; r < big.n_res; ++r)
        for (int q = 0; q < big.n_qubit; ++q)
            Ht(r * big.n_qubit + q, r * big.n_qubit + q) +=
                m.readout_frequency_GHz() * (r + 0.5) + m.qubit_frequency_GHz() * (q + 0.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> est(Ht);
    REQUIRE(est.eigenvalues()[0] == Approx(10.0400052214).epsilon(1e-9));
}

TEST_CASE("dimension guard") {
    FockConfig cfg;
    cfg.n_res = 120;
    cfg.n_qubit = 120;
    REQUIRE_THROWS_AS(cfg.check(), TruncationOverflow);
    cfg = FockConfig{};
    cfg.n_qubit = 1;
    REQUIRE_THROWS_AS(cfg.check(), InvalidInput);
}

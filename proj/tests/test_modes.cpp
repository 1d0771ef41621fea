#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "kinetiq/io.hpp"
#include "kinetiq/modes.hpp"

using namespace kinetiq;
using Catch::Approx;

namespace {

CircuitSpec load(const std::string& name) {
    return io::load_device(std::string(KINETIQ_DEVICE_DIR) + "/" + name + ".json");
}

/// Independent oracle: solve L^{-1} v = omega^2 C v as a generalized
/// symmetric-definite eigenproblem, no inverse square root involved.
Eigen::VectorXd generalized_eigenfrequencies(const CircuitSpec& spec) {
    const Eigen::Matrix4d C = assemble_capacitance_matrix(spec).M;
    const Eigen::Matrix4d L = assemble_inverse_inductance_matrix(spec).M;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix4d> es(L, C);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

double to_GHz(double omega) { return omega / (2.0 * std::numbers::pi * Units::GHz); }

} // namespace

TEST_CASE("q7 mode tuple matches frozen golden values and the generalized oracle") {
    const CircuitSpec q7 = load("q7");
    const ModeDecomposition m = analyze_circuit(q7);

    // frozen from the generalized-eigenproblem oracle
    REQUIRE(to_GHz(m.omegas[m.readout_index]) == Approx(7.10505553791).epsilon(1e-9));
    REQUIRE(to_GHz(m.omegas[m.qubit_index]) == Approx(7.49471145666).epsilon(1e-9));
    REQUIRE(std::abs(m.lambda_readout) == Approx(0.058770244667).epsilon(1e-9));
    REQUIRE(std::abs(m.lambda_qubit) == Approx(0.944355445226).epsilon(1e-9));
    REQUIRE(m.delta_c_aF == Approx(-20.0).epsilon(1e-9));

    const Eigen::VectorXd oracle = generalized_eigenfrequencies(q7);
    for (int j = 0; j < 4; ++j) {
        if (j == m.zero_index) continue;
        REQUIRE(m.omegas[j] == Approx(oracle[j]).epsilon(1e-9));
    }
}

TEST_CASE("eigenvector matrix is orthogonal and diagonalizes the dynamical matrix") {
    for (const char* name : {"q2", "q7", "q9"}) {
        const CircuitSpec spec = load(name);
        const ModeDecomposition m = analyze_circuit(spec);
        const Eigen::MatrixXd gram = m.S.transpose() * m.S;
        REQUIRE((gram - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-10);

        const Eigen::Matrix4d C = assemble_capacitance_matrix(spec).M;
        const Eigen::Matrix4d L = assemble_inverse_inductance_matrix(spec).M;
        const Eigen::MatrixXd Cmh = detail::inverse_sqrt(C);
        const Eigen::MatrixXd K = Cmh * L * Cmh;
        const Eigen::MatrixXd D = m.S.transpose() * K * m.S;
        double off = 0.0, scale = D.cwiseAbs().maxCoeff();
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (a != b) off = std::max(off, std::abs(D(a, b)));
        REQUIRE(off < 1e-8 * scale);
    }
}

TEST_CASE("exactly one zero mode, distinct labels") {
    for (const char* name :
         {"q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "q10", "q11", "q12",
          "q13", "q14"}) {
        const ModeDecomposition m = analyze_circuit(load(name));
        int zeros = 0;
        const double w2max = m.omegas.cwiseAbs2().maxCoeff();
        for (int j = 0; j < 4; ++j)
            if (m.omegas[j] * m.omegas[j] < 1e-6 * w2max) ++zeros;
        REQUIRE(zeros == 1);
        REQUIRE(m.zero_index >= 0);
        REQUIRE(m.qubit_index != m.readout_index);
        REQUIRE(m.qubit_index != m.zero_index);
        REQUIRE(m.readout_index != m.zero_index);
        REQUIRE(m.high_index >= 0);
    }
}

TEST_CASE("perfect symmetry decouples the readout") {
    CircuitSpec spec = symmetrized(load("q7"));
    spec.kinetic_asymmetry_nH = 0.0;
    const ModeDecomposition m = analyze_circuit(spec);
    REQUIRE(std::abs(m.lambda_readout) < 1e-10);
    REQUIRE(std::abs(m.lambda_qubit) > 0.1);
}

TEST_CASE("node exchange flips the coupling but preserves the spectrum") {
    // swap nodes 1 and 2: C is node-symmetric after symmetrization, so the
    // exchange is Dk -> -Dk
    const CircuitSpec base = symmetrized(load("q7"));
    for (double dk : {0.1, 0.28, 0.7}) {
        CircuitSpec plus = base, minus = base;
        plus.kinetic_asymmetry_nH = dk;
        minus.kinetic_asymmetry_nH = -dk;
        const ModeDecomposition mp = analyze_circuit(plus);
        const ModeDecomposition mm = analyze_circuit(minus);
        for (int j = 0; j < 4; ++j) {
            if (j == mp.zero_index) continue;
            REQUIRE(mp.omegas[j] == Approx(mm.omegas[j]).epsilon(1e-9));
        }
        REQUIRE(std::abs(mp.lambda_readout) ==
                Approx(std::abs(mm.lambda_readout)).epsilon(1e-9));
    }
}

TEST_CASE("lambda_R is continuous and monotone in Dk near zero") {
    const CircuitSpec base = symmetrized(load("q7"));
    double prev = -1.0;
    double prev_dk = 0.0;
    bool first = true;
    for (double dk = -1.0; dk <= 1.0 + 1e-12; dk += 0.25) {
        CircuitSpec spec = base;
        spec.kinetic_asymmetry_nH = dk;
        const double lam = std::abs(analyze_circuit(spec).lambda_readout);
        if (!first) {
            // |lambda_R| decreases towards Dk=0 and grows away from it
            if (prev_dk < 0.0)
                REQUIRE(lam < prev + 1e-12);
            else
                REQUIRE(lam > prev - 1e-12);
            // continuity: no jumps larger than the sampled slope allows
            REQUIRE(std::abs(lam - prev) < 0.2);
        }
        first = false;
        prev = lam;
        prev_dk = dk;
    }
}

TEST_CASE("idealized two-node decomposition sorts and couples correctly") {
    const CircuitSpec spec = symmetrized(load("q7"));
    const IdealizedParams p = reduce_to_idealized(spec);
    const ModeDecomposition m = decompose_idealized(p);
    REQUIRE(m.zero_index == -1);
    REQUIRE(m.qubit_index != m.readout_index);
    // qubit mode carries the junction coordinate
    REQUIRE(std::abs(m.S(1, m.qubit_index)) > std::abs(m.S(0, m.qubit_index)));
    REQUIRE(std::abs(m.lambda_qubit) > std::abs(m.lambda_readout));
}

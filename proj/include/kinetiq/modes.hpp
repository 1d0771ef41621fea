#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "kinetiq/circuit.hpp"
#include "kinetiq/errors.hpp"
#include "kinetiq/units.hpp"

namespace kinetiq {

/// Normal modes of the linearized circuit, from the symmetric eigenproblem
/// C^{-1/2} L^{-1} C^{-1/2} eta = omega^2 eta.
struct ModeDecomposition {
    Eigen::VectorXd omegas;   // rad/s, ascending
    Eigen::MatrixXd S;        // orthogonal eigenvectors, columns
    Eigen::MatrixXd Sprime;   // C^{-1/2} S, back-transformation to flux nodes
    int qubit_index = -1;
    int readout_index = -1;
    int zero_index = -1;      // -1 when the network has no zero mode
    int high_index = -1;      // leftover high-frequency mode, reported, unused
    double lambda_readout = 0.0;
    double lambda_qubit = 0.0;
    double delta_c_aF = 0.0;  // filled by the circuit-level frontend

    double readout_frequency_GHz() const {
        return omegas[readout_index] / (2.0 * std::numbers::pi * Units::GHz);
    }
    double qubit_frequency_GHz() const {
        return omegas[qubit_index] / (2.0 * std::numbers::pi * Units::GHz);
    }
};

namespace detail {

/// Symmetric inverse square root, via eigendecomposition so the result is
/// itself symmetric.
inline Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& C) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw NonPositiveDefinite("capacitance matrix has a non-positive eigenvalue");
    return es.eigenvectors() *
           es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

/// Fix the sign gauge of each eigenvector: largest-magnitude entry positive.
inline void fix_column_signs(Eigen::MatrixXd& S) {
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
        Eigen::Index imax;
        S.col(j).cwiseAbs().maxCoeff(&imax);
        if (S(imax, j) < 0.0) S.col(j) = -S.col(j);
    }
}

} // namespace detail

/// Core decomposition for an n-node network. `junction_diff` is the junction
/// branch vector (the cosine argument is junction_diff . phi), `junction_sum`
/// the complementary in-phase vector used by the readout sorting rule.
/// A mode counts as zero when omega^2 < zero_tol * max omega^2.
inline ModeDecomposition decompose_modes(const Eigen::MatrixXd& C_farad,
                                         const Eigen::MatrixXd& Linv_per_henry,
                                         const Eigen::VectorXd& junction_diff,
                                         const Eigen::VectorXd& junction_sum,
                                         double zero_tol = 1e-6,
                                         const Units& units = Units::si()) {
    const Eigen::Index n = C_farad.rows();
    const Eigen::MatrixXd Cmh = detail::inverse_sqrt(C_farad);
    Eigen::MatrixXd K = Cmh * Linv_per_henry * Cmh;
    K = 0.5 * (K + K.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    Eigen::VectorXd w2 = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd S = es.eigenvectors();
    detail::fix_column_signs(S);

    ModeDecomposition m;
    m.omegas = w2.cwiseSqrt();
    m.S = S;
    m.Sprime = Cmh * S;

    const double thresh = zero_tol * w2.maxCoeff();
    int zero_count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (w2[j] < thresh) {
            ++zero_count;
            m.zero_index = static_cast<int>(j);
        }
    }
    if (zero_count > 1)
        throw ZeroModeAmbiguous("found " + std::to_string(zero_count) +
                                " near-zero modes, expected at most one");

    const Eigen::VectorXd diff_amp = (junction_diff.transpose() * S).cwiseAbs();
    const Eigen::VectorXd sum_amp = (junction_sum.transpose() * S).cwiseAbs();
    auto argmax_excluding = [&](const Eigen::VectorXd& amp, int skip) {
        int best = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (static_cast<int>(j) == m.zero_index || static_cast<int>(j) == skip) continue;
            if (best < 0 || amp[j] > amp[best]) best = static_cast<int>(j);
        }
        return best;
    };
    m.qubit_index = argmax_excluding(diff_amp, -1);
    const int readout_unrestricted = argmax_excluding(sum_amp, -1);
    if (readout_unrestricted == m.qubit_index && n - zero_count > 2)
        throw DegenerateSorting("qubit and readout sorting criteria select the same mode");
    m.readout_index = readout_unrestricted == m.qubit_index
                          ? argmax_excluding(sum_amp, m.qubit_index)
                          : readout_unrestricted;
    if (m.qubit_index < 0 || m.readout_index < 0 || m.qubit_index == m.readout_index)
        throw DegenerateSorting("could not separate qubit and readout modes");
    for (Eigen::Index j = 0; j < n; ++j) {
        const int ji = static_cast<int>(j);
        if (ji != m.zero_index && ji != m.qubit_index && ji != m.readout_index)
            m.high_index = ji;
    }

    auto lambda_of = [&](int j) {
        return 2.0 * std::numbers::pi / units.Phi0 *
               std::sqrt(units.hbar / (2.0 * m.omegas[j])) *
               junction_diff.dot(m.Sprime.col(j));
    };
    m.lambda_readout = lambda_of(m.readout_index);
    m.lambda_qubit = lambda_of(m.qubit_index);
    return m;
}

/// Four-node frontend: junction between nodes 1 and 2, exactly one zero mode.
inline ModeDecomposition decompose_modes(const CapacitanceMatrix& C,
                                         const InverseInductanceMatrix& Linv,
                                         double zero_tol = 1e-6,
                                         const Units& units = Units::si()) {
    Eigen::Vector4d diff(-1.0, 1.0, 0.0, 0.0);
    Eigen::Vector4d sum(1.0, 1.0, 0.0, 0.0);
    ModeDecomposition m = decompose_modes(C.M, Linv.M, diff, sum, zero_tol, units);
    if (m.zero_index < 0)
        throw ZeroModeAmbiguous("four-node network must have one zero mode");
    return m;
}

/// Assemble and decompose a device in one step.
inline ModeDecomposition analyze_circuit(const CircuitSpec& spec, double zero_tol = 1e-6,
                                         const Units& units = Units::si()) {
    ModeDecomposition m = decompose_modes(assemble_capacitance_matrix(spec),
                                          assemble_inverse_inductance_matrix(spec),
                                          zero_tol, units);
    m.delta_c_aF = capacitive_asymmetry_aF(spec);
    return m;
}

/// Two-node decomposition of the idealized circuit; the junction phase is the
/// second coordinate, so there is no zero mode.
inline ModeDecomposition decompose_idealized(const IdealizedParams& p,
                                             const Units& units = Units::si()) {
    Eigen::Vector2d diff(0.0, 1.0);
    Eigen::Vector2d sum(1.0, 0.0);
    return decompose_modes(idealized_capacitance_matrix(p),
                           idealized_inverse_inductance_matrix(p), diff, sum,
                           1e-12, units);
}

} // namespace kinetiq

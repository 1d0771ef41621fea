#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "kinetiq/errors.hpp"
#include "kinetiq/modes.hpp"

namespace kinetiq {

/// Truncation of the two-mode photon-number basis. Product index convention:
/// state (n_res, n_qubit) sits at row n_res * n_qubit_states + n_qubit.
struct FockConfig {
    int n_res = 15;
    int n_qubit = 30;
    double zero_tol = 1e-6;     // relative zero-mode tolerance
    int max_dim = 10000;        // guards the dense diagonalization cost

    int dim() const { return n_res * n_qubit; }

    void check() const {
        if (n_res < 2 || n_qubit < 2)
            throw InvalidInput("Fock truncations must be at least 2");
        if (dim() > max_dim)
            throw TruncationOverflow("Fock dimension " + std::to_string(dim()) +
                                     " exceeds the cap of " + std::to_string(max_dim));
    }

    FockConfig enlarged(int extra_res, int extra_qubit) const {
        FockConfig c = *this;
        c.n_res += extra_res;
        c.n_qubit += extra_qubit;
        c.max_dim = std::max(c.max_dim, c.dim());
        return c;
    }
};

namespace fock {

/// x = a + a^dagger on an n-state ladder.
inline Eigen::MatrixXd position_operator(int n) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) x(k - 1, k) = x(k, k - 1) = std::sqrt(double(k));
    return x;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

/// cos of a Hermitian operator, exact on the truncated space: eigendecompose
/// and apply cos to the eigenvalues.
inline Eigen::MatrixXd cos_hermitian(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return es.eigenvectors() * es.eigenvalues().array().cos().matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> cos_sin_hermitian(
    const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const Eigen::MatrixXd V = es.eigenvectors();
    return {V * es.eigenvalues().array().cos().matrix().asDiagonal() * V.transpose(),
            V * es.eigenvalues().array().sin().matrix().asDiagonal() * V.transpose()};
}

/// Junction phase operator in radians:
/// lambda_R (a_R + a_R^dag) + lambda_Q (a_Q + a_Q^dag).
inline Eigen::MatrixXd junction_phase_operator(double lambda_r, double lambda_q,
                                               const FockConfig& cfg) {
    const Eigen::MatrixXd IR = Eigen::MatrixXd::Identity(cfg.n_res, cfg.n_res);
    const Eigen::MatrixXd IQ = Eigen::MatrixXd::Identity(cfg.n_qubit, cfg.n_qubit);
    return lambda_r * kron(position_operator(cfg.n_res), IQ) +
           lambda_q * kron(IR, position_operator(cfg.n_qubit));
}

} // namespace fock

/// Two-mode Hamiltonian in GHz (E/h):
///   f_R (N_R + 1/2) + f_Q (N_Q + 1/2) - E_J cos(phase - 2  pi flux).
inline Eigen::MatrixXd build_hamiltonian(double f_res_GHz, double f_qubit_GHz,
                                         double lambda_r, double lambda_q,
                                         double EJ_GHz, double flux_phi0,
                                         const FockConfig& cfg) {
    cfg.check();
    // the two summands of the cosine argument commute, so the matrix cosine
    // factors over the modes: cos(A) = cosR x cosQ - sinR x sinQ, each factor
    // evaluated exactly by eigendecomposition on its own ladder
    Eigen::MatrixXd arg_r = lambda_r * fock::position_operator(cfg.n_res);
    Eigen::MatrixXd arg_q = lambda_q * fock::position_operator(cfg.n_qubit);
    arg_q.diagonal().array() -= 2.0 * std::numbers::pi * flux_phi0;
    const auto [cos_r, sin_r] = fock::cos_sin_hermitian(arg_r);
    const auto [cos_q, sin_q] = fock::cos_sin_hermitian(arg_q);
    Eigen::MatrixXd H =
        -EJ_GHz * (fock::kron(cos_r, cos_q) - fock::kron(sin_r, sin_q));
    for (int r = 0; r < cfg.n_res; ++r)
        for (int q = 0; q < cfg.n_qubit; ++q)
            H(r * cfg.n_qubit + q, r * cfg.n_qubit + q) +=
                f_res_GHz * (r + 0.5) + f_qubit_GHz * (q + 0.5);
    H = 0.5 * (H + H.transpose()).eval();
    return H;
}

inline Eigen::MatrixXd build_hamiltonian(const ModeDecomposition& modes, double EJ_GHz,
                                         double flux_phi0, const FockConfig& cfg) {
    if (!std::isfinite(modes.lambda_readout) || !std::isfinite(modes.lambda_qubit))
        throw InvalidInput("coupling coefficients must be finite");
    return build_hamiltonian(modes.readout_frequency_GHz(), modes.qubit_frequency_GHz(),
                             modes.lambda_readout, modes.lambda_qubit, EJ_GHz, flux_phi0,
                             cfg);
}

} // namespace kinetiq

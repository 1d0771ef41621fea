#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinetiq/errors.hpp"
#include "kinetiq/units.hpp"

namespace kinetiq {

/// Pairwise capacitance table over circuit nodes {1,2,3,4} and ground 0, in fF.
/// Keys are unordered: set(1,3,x) and set(3,1,x) address the same entry.
/// Diagonal entries (i,i) hold the island's total self-capacitance.
class CapacitanceTable {
public:
    void set(int i, int j, double value_fF) {
        check_nodes(i, j);
        table_[key(i, j)] = value_fF;
    }

    bool has(int i, int j) const { return table_.count(key(i, j)) > 0; }

    double at(int i, int j) const {
        auto it = table_.find(key(i, j));
        if (it == table_.end())
            throw MissingPair("capacitance C" + std::to_string(i) + std::to_string(j) +
                              " missing from table");
        return it->second;
    }

    /// Missing pairs read as 0 fF; callers collect the warning via validate().
    double at_or_zero(int i, int j) const {
        auto it = table_.find(key(i, j));
        return it == table_.end() ? 0.0 : it->second;
    }

private:
    static void check_nodes(int i, int j) {
        if (i < 0 || i > 4 || j < 0 || j > 4 || (i == j && i == 0))
            throw InvalidInput("capacitance table nodes must be in {0..4}");
    }
    static std::pair<int, int> key(int i, int j) {
        return {std::min(i, j), std::max(i, j)};
    }
    std::map<std::pair<int, int>, double> table_;
};

/// Full lumped-element description of one device. Boundary units: nH, fF, GHz.
struct CircuitSpec {
    std::string name;
    CapacitanceTable caps;            // island-island and island-ground pairs, fF
    double junction_cap_fF = 0.0;     // C_J, enters between nodes 1 and 2
    double loop_inductance_nH = 0.0;  // L_q, total qubit loop
    double readout_inductance_nH = 0.0;  // L_r
    double kinetic_asymmetry_nH = 0.0;   // Delta_k, signed; node 1 branch is L_q/2 + Delta_k
    double josephson_energy_GHz = 0.0;   // E_J / h

    // When true (default), the table's diagonal entries C_ii are the full
    // self-capacitance (sum over every counterparty including ground) and the
    // C_i0 entries are the implied remainders. When false the diagonal is
    // rebuilt by summing off-diagonal pairs plus C_i0.
    bool diagonal_is_total = true;

    /// Throws on invariant violations; returns soft warnings (missing optional
    /// pairs, inconsistent ground remainders).
    std::vector<std::string> validate() const {
        if (loop_inductance_nH <= 0.0 || readout_inductance_nH <= 0.0)
            throw InvalidInput(name + ": inductances must be positive");
        if (std::abs(kinetic_asymmetry_nH) >= loop_inductance_nH / 2.0)
            throw BranchNonPositive(name + ": |Delta_k| must stay below L_q/2");
        if (josephson_energy_GHz <= 0.0 || junction_cap_fF <= 0.0)
            throw InvalidInput(name + ": E_J and C_J must be positive");
        for (int i = 1; i <= 3; ++i)
            if (!caps.has(i, 0))
                throw MissingPair(name + ": ground capacitance C" + std::to_string(i) +
                                  "0 is required");
        std::vector<std::string> warnings;
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j)
                if (!caps.has(i, j))
                    warnings.push_back(name + ": C" + std::to_string(i) + std::to_string(j) +
                                       " missing, assuming 0 fF");
        if (diagonal_is_total) {
            for (int i = 1; i <= 4; ++i) {
                if (!caps.has(i, i)) continue;
                double rem = caps.at(i, i);
                for (int j = 0; j <= 4; ++j)
                    if (j != i) rem -= caps.at_or_zero(i, j);
                if (std::abs(rem) > 1e-6)
                    warnings.push_back(name + ": C" + std::to_string(i) + std::to_string(i) +
                                       " differs from its pair sum by " + std::to_string(rem) +
                                       " fF");
            }
        }
        return warnings;
    }
};

struct CapacitanceMatrix {
    Eigen::Matrix4d M;  // farads
};

struct InverseInductanceMatrix {
    Eigen::Matrix4d M;  // 1/henry
};

/// Maxwell capacitance matrix of the four islands: off-diagonals are -C_ij
/// (with -C_J added between nodes 1 and 2), diagonals the full self-capacitance
/// including ground, plus C_J on nodes 1 and 2.
inline CapacitanceMatrix assemble_capacitance_matrix(const CircuitSpec& spec) {
    spec.validate();
    const double CJ = spec.junction_cap_fF;
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    for (int i = 1; i <= 4; ++i) {
        double diag;
        if (spec.diagonal_is_total) {
            diag = spec.caps.at(i, i);
        } else {
            diag = spec.caps.at_or_zero(i, 0);
            for (int j = 1; j <= 4; ++j)
                if (j != i) diag += spec.caps.at_or_zero(i, j);
        }
        if (i <= 2) diag += CJ;
        M(i - 1, i - 1) = diag;
        for (int j = i + 1; j <= 4; ++j) {
            double off = -spec.caps.at_or_zero(i, j);
            if (i == 1 && j == 2) off -= CJ;
            M(i - 1, j - 1) = M(j - 1, i - 1) = off;
        }
    }
    M *= Units::fF;
    Eigen::LLT<Eigen::Matrix4d> llt(M);
    if (llt.info() != Eigen::Success)
        throw NonPositiveDefinite(spec.name + ": capacitance matrix is not positive definite");
    return {M};
}

/// Inverse inductance matrix of the loop + readout network. Branch inductances
/// are L_q/2 + Delta_k (node 1) and L_q/2 - Delta_k (node 2); node 4 is the
/// common island joining both branches and L_r. Row sums vanish.
inline InverseInductanceMatrix assemble_inverse_inductance_matrix(const CircuitSpec& spec) {
    const double La = (spec.loop_inductance_nH / 2.0 + spec.kinetic_asymmetry_nH) * Units::nH;
    const double Lb = (spec.loop_inductance_nH / 2.0 - spec.kinetic_asymmetry_nH) * Units::nH;
    const double Lr = spec.readout_inductance_nH * Units::nH;
    if (La <= 0.0 || Lb <= 0.0)
        throw BranchNonPositive(spec.name + ": loop branch inductance is non-positive");
    if (Lr <= 0.0)
        throw BranchNonPositive(spec.name + ": readout inductance is non-positive");
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    M(0, 0) = 1.0 / La;
    M(1, 1) = 1.0 / Lb;
    M(2, 2) = 1.0 / Lr;
    M(0, 3) = M(3, 0) = -1.0 / La;
    M(1, 3) = M(3, 1) = -1.0 / Lb;
    M(2, 3) = M(3, 2) = -1.0 / Lr;
    M(3, 3) = 1.0 / La + 1.0 / Lb + 1.0 / Lr;
    return {M};
}

/// Capacitive asymmetry Delta_C = (C13 - C23)/2, in aF, signed.
inline double capacitive_asymmetry_aF(const CapacitanceTable& caps) {
    const double c13 = caps.at(1, 3);
    const double c23 = caps.at(2, 3);
    return (c13 - c23) / 2.0 * (Units::fF / Units::aF);
}

inline double capacitive_asymmetry_aF(const CircuitSpec& spec) {
    return capacitive_asymmetry_aF(spec.caps);
}

/// Effective two-node parameters of the reduced circuit.
struct IdealizedParams {
    double LQ_nH = 0.0;
    double LR_nH = 0.0;
    double LS_nH = 0.0;
    double CR_fF = 0.0;
    double CQ_fF = 0.0;
    double SigmaL_nH2 = 0.0;
};

/// Reduce the four-node circuit to the equivalent two-node (readout, qubit)
/// circuit: node 4 eliminated by current conservation, ground eliminated as a
/// floating conserved-charge node. Requires a symmetric ground environment
/// C10 = C20 (within tolerance; the mean is used). The junction capacitance
/// C_J sits in parallel with C_sh and is folded into the qubit capacitance.
inline IdealizedParams reduce_to_idealized(const CircuitSpec& spec,
                                           double ground_tol_fF = 0.25) {
    const double c10 = spec.caps.at(1, 0);
    const double c20 = spec.caps.at(2, 0);
    const double mean_g = 0.5 * (c10 + c20);
    if (std::abs(c10 - c20) > std::max(ground_tol_fF, 0.02 * mean_g))
        throw AsymmetricGround(spec.name + ": C10 and C20 differ beyond tolerance, " +
                               "the idealized reduction does not apply");
    const double CJ0 = mean_g;
    const double C30 = spec.caps.at(3, 0);
    const double Cr = 0.5 * (spec.caps.at(1, 3) + spec.caps.at(2, 3));
    const double Csh = spec.caps.at_or_zero(1, 2) + spec.junction_cap_fF;

    const double Lq = spec.loop_inductance_nH;
    const double Lr = spec.readout_inductance_nH;
    const double Dk = spec.kinetic_asymmetry_nH;

    IdealizedParams p;
    p.LQ_nH = Lq - Dk;
    p.LR_nH = Lr + Lq / 4.0 - Dk;
    p.LS_nH = Dk;
    p.SigmaL_nH2 = Lr * Lq + Lq * Lq / 4.0 - Dk * Dk;
    if (p.SigmaL_nH2 <= 0.0)
        throw BranchNonPositive(spec.name + ": Sigma_L is non-positive");
    p.CR_fF = 2.0 * Cr + 1.0 / (1.0 / (2.0 * CJ0) + 1.0 / C30);
    p.CQ_fF = Cr / 2.0 + Csh + CJ0 / 2.0;
    return p;
}

/// 2x2 matrices of the idealized circuit in the (phi_R, phi_Q) basis. The
/// junction phase is the second coordinate.
inline Eigen::Matrix2d idealized_capacitance_matrix(const IdealizedParams& p) {
    Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
    C(0, 0) = p.CR_fF * Units::fF;
    C(1, 1) = p.CQ_fF * Units::fF;
    return C;
}

inline Eigen::Matrix2d idealized_inverse_inductance_matrix(const IdealizedParams& p) {
    const double sig = p.SigmaL_nH2 * Units::nH * Units::nH;
    Eigen::Matrix2d L;
    L(0, 0) = (p.LQ_nH + p.LS_nH) * Units::nH / sig;
    L(1, 1) = (p.LR_nH + p.LS_nH) * Units::nH / sig;
    L(0, 1) = L(1, 0) = p.LS_nH * Units::nH / sig;
    return L;
}

/// Shift C13 by +delta and C23 by -delta (delta in aF), changing the
/// capacitive asymmetry Delta_C by exactly delta while preserving the
/// diagonal totals.
inline CircuitSpec with_capacitive_asymmetry_shift(CircuitSpec spec, double delta_aF) {
    const double d = delta_aF * (Units::aF / Units::fF);
    spec.caps.set(1, 3, spec.caps.at(1, 3) + d);
    spec.caps.set(2, 3, spec.caps.at(2, 3) - d);
    if (spec.diagonal_is_total) {
        spec.caps.set(1, 1, spec.caps.at(1, 1) + d);
        spec.caps.set(2, 2, spec.caps.at(2, 2) - d);
    }
    return spec;
}

/// Symmetrize the table between nodes 1 and 2 (Delta_C = 0, equal diagonals
/// and equal couplings to islands 3 and 4).
inline CircuitSpec symmetrized(CircuitSpec spec) {
    auto avg = [&](int a1, int b1, int a2, int b2) {
        const double m = 0.5 * (spec.caps.at_or_zero(a1, b1) + spec.caps.at_or_zero(a2, b2));
        spec.caps.set(a1, b1, m);
        spec.caps.set(a2, b2, m);
    };
    avg(1, 3, 2, 3);
    avg(1, 4, 2, 4);
    avg(1, 0, 2, 0);
    avg(1, 1, 2, 2);
    return spec;
}

} // namespace kinetiq

#pragma once

namespace kinetiq {

// CODATA 2018 exact values (SI)
struct Units {
    double h = 6.62607015e-34;        // J s
    double hbar = 1.054571817e-34;    // J s
    double e = 1.602176634e-19;       // C
    double Phi0 = 2.067833848e-15;    // Wb, h / 2e
    double kB = 1.380649e-23;         // J / K

    // boundary I/O is (nH, fF, GHz, aF); everything internal is SI
    static constexpr double nH = 1e-9;
    static constexpr double fF = 1e-15;
    static constexpr double aF = 1e-18;
    static constexpr double GHz = 1e9;
    static constexpr double MHz = 1e6;

    static const Units& si() {
        static const Units u{};
        return u;
    }
};

} // namespace kinetiq

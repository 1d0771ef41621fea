// Command-line front end: circuit modes, spectra, dispersive shifts, parameter
// fits, quantum-jump statistics and pulse/photon calibrations.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "kinetiq/kinetiq.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string device_path;
    std::string data_path;
    std::string out_path;
    double flux = 0.5;
    std::string flux_grid;  // LO:HI:N
    int n_res = 15;
    int n_qubit = 30;
    unsigned seed = 1;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    double delta_c_aF = 0.0;
};

void emit(const CommonArgs& args, const std::string& content) {
    if (args.out_path.empty())
        std::cout << content;
    else
        kinetiq::io::write_file(args.out_path, content);
}

void emit_json(const CommonArgs& args, const json& j) {
    emit(args, j.dump(2) + "\n");
}

kinetiq::CircuitSpec load_device(const CommonArgs& args) {
    kinetiq::CircuitSpec spec = kinetiq::io::load_device(args.device_path);
    if (args.delta_c_aF != 0.0)
        spec = kinetiq::with_capacitive_asymmetry_shift(spec, args.delta_c_aF);
    return spec;
}

kinetiq::FockConfig fock_config(const CommonArgs& args) {
    kinetiq::FockConfig cfg;
    cfg.n_res = args.n_res;
    cfg.n_qubit = args.n_qubit;
    return cfg;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1)
        throw kinetiq::InvalidInput("flux grid must be LO:HI:N with N >= 1, got '" + text +
                                    "'");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return grid;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_device) {
    auto* dev = cmd->add_option("--device", args.device_path, "device JSON file");
    if (needs_device) dev->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_path, "output file (default: stdout)");
    cmd->add_option("--nR", args.n_res, "resonator Fock truncation");
    cmd->add_option("--nQ", args.n_qubit, "qubit Fock truncation");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--threads", args.threads, "worker threads for sweeps and residuals");
    cmd->add_option("--delta-c-aF", args.delta_c_aF,
                    "perturb C13/C23 by +/- this much (aF)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"circuit QED toolkit for kinetic-inductance coupled flux qubits"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* cmd_modes = app.add_subcommand("modes", "normal-mode decomposition of a device");
    add_common(cmd_modes, args, true);

    auto* cmd_spectrum =
        app.add_subcommand("spectrum", "transition table over a flux grid (CSV)");
    add_common(cmd_spectrum, args, true);
    cmd_spectrum->add_option("--flux-grid", args.flux_grid, "grid LO:HI:N")->required();

    auto* cmd_chi = app.add_subcommand("chi", "dispersive shift at one flux point");
    add_common(cmd_chi, args, true);
    cmd_chi->add_option("--flux", args.flux, "external flux in Phi_0 units");

    auto* cmd_ideal = app.add_subcommand(
        "idealized", "effective two-node parameters and extended-vs-idealized comparison");
    add_common(cmd_ideal, args, true);
    std::string dk_grid = "-1:1:11";
    cmd_ideal->add_option("--dk-grid", dk_grid, "asymmetry grid LO:HI:N in nH");

    auto* cmd_fit = app.add_subcommand("fit", "fit circuit parameters to spectroscopy data");
    add_common(cmd_fit, args, true);
    cmd_fit->add_option("--data", args.data_path, "spectroscopy CSV")
        ->required()
        ->check(CLI::ExistingFile);
    int fit_starts = 3;
    int fit_evals = 800;
    cmd_fit->add_option("--starts", fit_starts, "multi-start count");
    cmd_fit->add_option("--max-evals", fit_evals, "objective evaluations per start");

    auto* cmd_jumps = app.add_subcommand("jumps", "GMM statistics of a quantum-jump trace");
    add_common(cmd_jumps, args, false);
    cmd_jumps->add_option("--data", args.data_path, "trace CSV (t_index,I,Q)")
        ->required()
        ->check(CLI::ExistingFile);
    int gmm_k = 3;
    cmd_jumps->add_option("-K,--components", gmm_k, "mixture components");

    auto* cmd_pipulse = app.add_subcommand("pipulse", "fit a pi-pulse train record");
    add_common(cmd_pipulse, args, false);
    cmd_pipulse->add_option("--data", args.data_path, "CSV (n,population)")
        ->required()
        ->check(CLI::ExistingFile);

    auto* cmd_stark = app.add_subcommand("stark", "AC-Stark photon-number calibration");
    add_common(cmd_stark, args, false);
    cmd_stark->add_option("--data", args.data_path, "CSV (power,deltaF_MHz)")
        ->required()
        ->check(CLI::ExistingFile);
    double stark_chi = 0.0, stark_power = 0.0;
    bool stark_intercept = false;
    cmd_stark->add_option("--chi-MHz", stark_chi, "dispersive shift")->required();
    cmd_stark->add_option("--power", stark_power, "drive power to convert");
    cmd_stark->add_flag("--with-intercept", stark_intercept, "fit a free intercept");

    auto* cmd_t1 = app.add_subcommand("t1", "inductive-loss T1 from the circuit model");
    add_common(cmd_t1, args, true);
    cmd_t1->add_option("--flux", args.flux, "external flux in Phi_0 units");
    double qind = 0.0, t1_us = 0.0, temp_K = 0.01;
    cmd_t1->add_option("--qind", qind, "inductive quality factor -> prints T1");
    cmd_t1->add_option("--t1-us", t1_us, "measured T1 in us -> prints Q_ind");
    cmd_t1->add_option("--temp-K", temp_K, "bath temperature (K)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*cmd_modes) {
            const auto spec = load_device(args);
            emit_json(args, kinetiq::io::modes_to_json(kinetiq::analyze_circuit(spec)));
        } else if (*cmd_spectrum) {
            const auto spec = load_device(args);
            const auto rows = kinetiq::flux_sweep(spec, parse_grid(args.flux_grid),
                                                  fock_config(args), args.threads);
            emit(args, kinetiq::io::sweep_csv(rows));
        } else if (*cmd_chi) {
            const auto spec = load_device(args);
            auto table = kinetiq::transitions_at(spec, args.flux, fock_config(args));
            json j = kinetiq::io::transitions_to_json(table);
            j["device"] = spec.name;
            emit_json(args, j);
        } else if (*cmd_ideal) {
            const auto spec = kinetiq::symmetrized(load_device(args));
            const auto ideal = kinetiq::reduce_to_idealized(spec);
            json comparison = json::array();
            const auto cfg = fock_config(args);
            for (double dk : parse_grid(dk_grid)) {
                kinetiq::CircuitSpec ext = spec;
                ext.kinetic_asymmetry_nH = dk;
                kinetiq::IdealizedParams p = kinetiq::reduce_to_idealized(ext);
                const auto te = kinetiq::transitions_at(ext, 0.5, cfg);
                const auto ti = kinetiq::transitions_at(kinetiq::decompose_idealized(p),
                                                        ext.josephson_energy_GHz, 0.5, cfg);
                comparison.push_back({{"Dk_nH", dk},
                                      {"fR_ext_GHz", te.fr0_GHz},
                                      {"fQ_ext_GHz", te.fq01_GHz},
                                      {"chi_ext_MHz", te.chi_MHz},
                                      {"fR_ideal_GHz", ti.fr0_GHz},
                                      {"fQ_ideal_GHz", ti.fq01_GHz},
                                      {"chi_ideal_MHz", ti.chi_MHz},
                                      {"ambiguous", te.ambiguous || ti.ambiguous}});
            }
            emit_json(args, json{{"device", spec.name},
                                 {"LQ_nH", ideal.LQ_nH},
                                 {"LR_nH", ideal.LR_nH},
                                 {"LS_nH", ideal.LS_nH},
                                 {"CR_fF", ideal.CR_fF},
                                 {"CQ_fF", ideal.CQ_fF},
                                 {"SigmaL_nH2", ideal.SigmaL_nH2},
                                 {"comparison", comparison}});
        } else if (*cmd_fit) {
            kinetiq::FitProblem problem;
            problem.base = load_device(args);
            problem.data = kinetiq::io::read_spectroscopy_csv(args.data_path);
            problem.theta0 = {problem.base.readout_inductance_nH,
                              problem.base.loop_inductance_nH,
                              problem.base.kinetic_asymmetry_nH,
                              problem.base.josephson_energy_GHz,
                              problem.base.junction_cap_fF};
            problem.fock = fock_config(args);
            problem.starts = fit_starts;
            problem.max_evals = fit_evals;
            problem.seed = args.seed;
            problem.threads = args.threads;
            problem.lower = {0.1, 1.0, -10.0, 0.1, 0.1};
            problem.upper = {100.0, 200.0, 10.0, 50.0, 20.0};
            const auto result = kinetiq::fit_parameters(problem);
            emit_json(args, kinetiq::io::fit_result_to_json(result));
        } else if (*cmd_jumps) {
            const auto samples = kinetiq::io::read_trace_csv(args.data_path);
            const auto model = kinetiq::fit_gmm(samples, gmm_k, args.seed);
            const auto seq = kinetiq::assign_states(model, samples);
            auto stats = kinetiq::correlations(seq);
            stats.snr = kinetiq::snr(model);
            emit_json(args, kinetiq::io::readout_stats_to_json(stats, model));
        } else if (*cmd_pipulse) {
            const auto records = kinetiq::io::read_pipulse_csv(args.data_path);
            const auto fit = kinetiq::fit_pipulse(records);
            emit_json(args, json{{"a", fit.a},
                                 {"o", fit.o},
                                 {"f", fit.f},
                                 {"gamma", fit.gamma},
                                 {"F_pi", fit.F_pi},
                                 {"F_pi_no_decay", fit.F_pi_no_decay},
                                 {"converged", fit.converged},
                                 {"rss", fit.rss}});
        } else if (*cmd_stark) {
            const auto records = kinetiq::io::read_stark_csv(args.data_path);
            const auto fit = kinetiq::fit_stark(records, stark_intercept);
            json j{{"slope_MHz_per_power", fit.slope_MHz_per_power},
                   {"intercept_MHz", fit.intercept_MHz},
                   {"zero_intercept", fit.zero_intercept}};
            if (stark_power != 0.0)
                j["n_bar"] = kinetiq::photons_from_power(fit, stark_chi, stark_power);
            emit_json(args, j);
        } else if (*cmd_t1) {
            const auto spec = load_device(args);
            const auto cfg = fock_config(args);
            const double matel = kinetiq::flux_matrix_element(spec, args.flux, cfg);
            const auto table = kinetiq::transitions_at(spec, args.flux, cfg);
            const double EL = kinetiq::inductive_energy_GHz(spec.loop_inductance_nH);
            json j{{"device", spec.name},
                   {"flux_phi0", args.flux},
                   {"EL_GHz", EL},
                   {"fq01_GHz", table.fq01_GHz},
                   {"matrix_element", matel},
                   {"temp_K", temp_K}};
            if (qind > 0.0)
                j["T1_us"] = kinetiq::inductive_t1_seconds(EL, qind, matel, table.fq01_GHz,
                                                           temp_K) *
                             1e6;
            if (t1_us > 0.0)
                j["Q_ind"] = kinetiq::inductive_quality_factor(EL, t1_us * 1e-6, matel,
                                                               table.fq01_GHz, temp_K);
            emit_json(args, j);
        }
    } catch (const kinetiq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

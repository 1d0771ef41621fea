#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(KINETIQ_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string device(const std::string& name) {
    return std::string(KINETIQ_DEVICE_DIR) + "/" + name + ".json";
}

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/kinetiq_cli_test_") + name;
}

} // namespace

TEST_CASE("chi subcommand reproduces the q7 shift") {
    const RunResult r = run("chi --device " + device("q7") + " --flux 0.5");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(j.at("device") == "q7");
    REQUIRE(std::abs(j.at("chi_MHz").get<double>() - 0.98) < 0.1);
}

TEST_CASE("spectrum on a decoupled device has a vanishing chi column") {
    // symmetric capacitances with Dk = 0
    json dev = json::parse(std::ifstream(device("q6_symmetric")));
    dev["Delta_k_nH"] = 0.0;
    const std::string path = tmp_path("sym.json");
    std::ofstream(path) << dev.dump();
    const RunResult r =
        run("spectrum --device " + path + " --flux-grid 0:1:11 --threads 2");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string line;
    std::getline(lines, line);
    REQUIRE(line == "flux_phi0,fQ01_GHz,fQ02_GHz,fR0_GHz,fR1_GHz,chi_MHz,ambiguous");
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto last_comma = line.rfind(',');
        const auto prev_comma = line.rfind(',', last_comma - 1);
        const double chi =
            std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
        REQUIRE(std::abs(chi) < 1e-3);
        ++rows;
    }
    REQUIRE(rows == 11);
}

TEST_CASE("outputs are byte-identical across repeated runs") {
    const std::string base = "spectrum --device " + device("q7") +
                             " --flux-grid 0.4:0.6:5 --threads 2 --seed 3";
    const RunResult a = run(base);
    const RunResult b = run(base);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.output == b.output);

    const RunResult c = run("modes --device " + device("q3"));
    const RunResult d = run("modes --device " + device("q3"));
    REQUIRE(c.exit_code == 0);
    REQUIRE(c.output == d.output);
}

TEST_CASE("modes reports the decomposition") {
    const RunResult r = run("modes --device " + device("q7"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(std::abs(j.at("f_readout_GHz").get<double>() - 7.105) < 0.01);
    REQUIRE(std::abs(j.at("delta_c_aF").get<double>() + 20.0) < 1e-9);
    REQUIRE(j.at("qubit_index") != j.at("readout_index"));
}

TEST_CASE("idealized comparison stays close for the symmetric device") {
    const RunResult r =
        run("idealized --device " + device("q6_symmetric") + " --dk-grid -1:1:5");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(j.at("LS_nH").get<double>() == 0.36);
    for (const auto& row : j.at("comparison")) {
        const double fr_e = row.at("fR_ext_GHz").get<double>();
        const double fr_i = row.at("fR_ideal_GHz").get<double>();
        REQUIRE(std::abs(fr_e - fr_i) / fr_e < 0.01);
    }
}

TEST_CASE("jumps pipeline on a generated trace") {
    // two clusters, strongly ground-biased
    const std::string path = tmp_path("trace.csv");
    {
        std::ofstream out(path);
        out << "t_index,I,Q\n";
        std::mt19937_64 rng(5);
        std::normal_distribution<double> gauss(0.0, 1.0);
        int state = 0;
        for (int t = 0; t < 20000; ++t) {
            const double u = std::uniform_real_distribution<double>(0, 1)(rng);
            state = state == 0 ? (u < 0.995 ? 0 : 1) : (u < 0.93 ? 1 : 0);
            out << t << ',' << (state == 0 ? 0.0 : 8.0) + gauss(rng) << ','
                << gauss(rng) << '\n';
        }
    }
    const RunResult r = run("jumps --data " + path + " -K 2 --seed 2");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(j.at("populations").at("P0").get<double>() > 0.8);
    REQUIRE(j.at("P00").get<double>() > 0.98);
    REQUIRE(std::abs(j.at("snr").get<double>() - 4.0) < 0.4);
}

TEST_CASE("pipulse and stark subcommands") {
    const std::string pi_path = tmp_path("pi.csv");
    {
        std::ofstream out(pi_path);
        out << "n,population\n";
        for (int n = 0; n <= 40; ++n) {
            const double p = 0.9 *
                                 (0.5 - 0.5 * std::cos(std::numbers::pi * n +
                                                       2 * std::numbers::pi * 0.04 * n)) *
                                 std::exp(-0.015 * n) +
                             0.05;
            out << n << ',' << p << '\n';
        }
    }
    const RunResult rp = run("pipulse --data " + pi_path);
    REQUIRE(rp.exit_code == 0);
    const json jp = json::parse(rp.output);
    REQUIRE(std::abs(jp.at("gamma").get<double>() - 0.015) < 0.002);
    REQUIRE(jp.at("F_pi").get<double>() <= jp.at("F_pi_no_decay").get<double>());

    const std::string stark_path = tmp_path("stark.csv");
    {
        std::ofstream out(stark_path);
        out << "power,deltaF_MHz\n";
        for (double p : {0.0, 25.0, 50.0, 75.0, 100.0}) out << p << ',' << 0.02 * p << '\n';
    }
    const RunResult rs =
        run("stark --data " + stark_path + " --chi-MHz 0.5 --power 100");
    REQUIRE(rs.exit_code == 0);
    const json js = json::parse(rs.output);
    REQUIRE(std::abs(js.at("n_bar").get<double>() - 4.0) < 1e-9);
}

TEST_CASE("t1 subcommand round-trips Q_ind") {
    const RunResult r =
        run("t1 --device " + device("q7") + " --flux 0.5 --t1-us 8.0 --temp-K 0.01");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    const double q = j.at("Q_ind").get<double>();
    REQUIRE(std::abs(q - 0.61e6) / 0.61e6 < 0.30);
}

TEST_CASE("exit codes: domain errors give 1, usage errors give 2") {
    REQUIRE(run("chi --device /nonexistent.json --flux 0.5").exit_code == 2);
    REQUIRE(run("chi").exit_code == 2);
    REQUIRE(run("nonsense-subcommand").exit_code == 2);

    // domain error: device file with a broken invariant
    json dev = json::parse(std::ifstream(device("q7")));
    dev["Delta_k_nH"] = 100.0;
    const std::string path = tmp_path("broken.json");
    std::ofstream(path) << dev.dump();
    REQUIRE(run("chi --device " + path + " --flux 0.5").exit_code == 1);
}

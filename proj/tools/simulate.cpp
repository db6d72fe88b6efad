// Command-line front end: Monte-Carlo sweeps, convergence traces and
// plot-data emission for the movable-antenna secure symbiotic-radio
// simulator.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "masr/channel.hpp"
#include "masr/errors.hpp"
#include "masr/experiments.hpp"
#include "masr/scenario.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

masr::ScenarioConfig load_or_default(const std::string& path) {
    if (path.empty()) return masr::default_scenario();
    return masr::load_scenario(path);
}

// Desk-scale swarm size unless the user asks for the full configuration.
void apply_swarm_overrides(masr::ScenarioConfig& cfg, int particles,
                           int iterations) {
    if (particles > 0) cfg.swarm.particles = particles;
    if (iterations > 0) cfg.swarm.iterations = iterations;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw masr::ConfigError("bad value in --values: '" + item + "'");
        }
    }
    if (out.empty()) throw masr::ConfigError("--values is empty");
    return out;
}

std::vector<masr::Scheme> parse_schemes(const std::string& csv) {
    std::vector<masr::Scheme> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(masr::parse_scheme(item));
    if (out.empty()) throw masr::ConfigError("--schemes is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Movable-antenna secure symbiotic-radio simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::uint64_t seed = 42;
    std::string out_dir = "results";
    int particles = 60;
    int iterations = 60;
    int threads = 0;

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep");
    std::string param = "p_max_dbm";
    std::string values_csv = "20,25,30,35";
    std::string schemes_csv = "gapso,pso,fpa,random";
    int trials = 20;
    sweep->add_option("--param", param,
                      "swept parameter: p_max_dbm | n_antennas | m_aps | "
                      "pathloss_exponent");
    sweep->add_option("--values", values_csv, "comma-separated sweep values");
    sweep->add_option("--trials", trials, "paired trials per sweep value");
    sweep->add_option("--schemes", schemes_csv,
                      "comma-separated subset of gapso,pso,fpa,random");
    sweep->add_option("--scenario", scenario_path, "scenario file");
    sweep->add_option("--seed", seed, "master RNG seed");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
    sweep->add_option("--particles", particles,
                      "swarm size override (0 = scenario value)");
    sweep->add_option("--iterations", iterations,
                      "swarm iterations override (0 = scenario value)");

    auto* converge = app.add_subcommand(
        "converge", "Single-trial beamforming and swarm convergence traces");
    converge->add_option("--scenario", scenario_path, "scenario file");
    converge->add_option("--seed", seed, "RNG seed");
    converge->add_option("--out", out_dir, "output directory");
    converge->add_option("--particles", particles,
                         "swarm size override (0 = scenario value)");
    converge->add_option("--iterations", iterations,
                         "swarm iterations override (0 = scenario value)");

    auto* plotdata = app.add_subcommand(
        "plotdata", "Aggregate raw sweep CSVs into per-figure plot data");
    std::string in_dir = "results";
    plotdata->add_option("--in", in_dir, "directory containing raw_*.csv");
    plotdata->add_option("--out", out_dir, "output directory");

    auto* dump = app.add_subcommand(
        "dump-channels", "Write one channel realization in matrix text form");
    std::string dump_file = "channels.txt";
    dump->add_option("--scenario", scenario_path, "scenario file");
    dump->add_option("--seed", seed, "RNG seed");
    dump->add_option("--out", dump_file, "output file");

    try {
        app.parse(argc, argv);

        if (sweep->parsed()) {
            masr::SweepSpec spec;
            spec.base = load_or_default(scenario_path);
            apply_swarm_overrides(spec.base, particles, iterations);
            spec.param = param;
            spec.values = parse_values(values_csv);
            spec.trials = trials;
            spec.schemes = parse_schemes(schemes_csv);
            spec.out_dir = out_dir;
            spec.seed = seed;
            spec.threads = threads;
            const masr::ExperimentResult result = masr::run_sweep(spec);
            masr::emit_plotdata(result, out_dir);
            std::cout << "wrote raw_" << param << ".csv, agg_" << param
                      << ".csv, fig_" << param << ".csv under " << out_dir
                      << "\n";
        } else if (converge->parsed()) {
            masr::ScenarioConfig cfg = load_or_default(scenario_path);
            apply_swarm_overrides(cfg, particles, iterations);
            masr::run_convergence(cfg, seed, out_dir);
            std::cout << "wrote sca_trace.csv, swarm_trace_{gapso,pso}.csv, "
                         "ao_trace.csv under "
                      << out_dir << "\n";
        } else if (plotdata->parsed()) {
            bool any = false;
            for (const auto& entry : fs::directory_iterator(in_dir)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("raw_", 0) != 0 ||
                    entry.path().extension() != ".csv")
                    continue;
                std::ifstream in(entry.path());
                if (!in)
                    throw masr::IoError("cannot read " + entry.path().string());
                masr::emit_plotdata(masr::read_rows_csv(in), out_dir);
                any = true;
            }
            if (!any)
                throw masr::IoError("no raw_*.csv files under " + in_dir);
            std::cout << "wrote fig_*.csv under " << out_dir << "\n";
        } else if (dump->parsed()) {
            const masr::ScenarioConfig cfg = load_or_default(scenario_path);
            masr::Rng rng = masr::Rng(seed).substream(0);
            const masr::ChannelGeometry geom = masr::sample_geometry(cfg, rng);
            const masr::ChannelSet ch = masr::assemble_channels(
                geom, masr::fpa_baseline_layout(cfg), cfg);
            std::ofstream out(dump_file);
            if (!out) throw masr::IoError("cannot write " + dump_file);
            masr::dump_channels(out, ch);
            std::cout << "wrote " << dump_file << "\n";
        }
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    } catch (const masr::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const masr::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

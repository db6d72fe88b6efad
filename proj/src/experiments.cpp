#include "masr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "masr/beamforming.hpp"
#include "masr/errors.hpp"

namespace masr {

namespace fs = std::filesystem;

std::vector<const ResultRow*> ExperimentResult::select(Scheme scheme,
                                                       double value) const {
    std::vector<const ResultRow*> out;
    for (const auto& row : rows)
        if (row.scheme == scheme && row.value == value) out.push_back(&row);
    return out;
}

Aggregate t_interval(const std::vector<double>& samples) {
    Aggregate agg;
    agg.count = static_cast<int>(samples.size());
    if (samples.empty()) return agg;
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    agg.mean = mean;
    if (samples.size() == 1) {
        agg.ci_low = agg.ci_high = mean;
        return agg;
    }
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= (samples.size() - 1);
    const boost::math::students_t dist(
        static_cast<double>(samples.size() - 1));
    const double t = boost::math::quantile(dist, 0.975);
    const double half = t * std::sqrt(var / samples.size());
    agg.ci_low = mean - half;
    agg.ci_high = mean + half;
    return agg;
}

ScenarioConfig apply_param(const ScenarioConfig& base, const std::string& param,
                           double value) {
    ScenarioConfig cfg = base;
    if (param == "p_max_dbm") {
        cfg.max_power_w = dbm_to_watt(value);
    } else if (param == "n_antennas") {
        cfg.antennas_per_ap = static_cast<int>(std::llround(value));
    } else if (param == "m_aps") {
        cfg.num_aps = static_cast<int>(std::llround(value));
        cfg.ap_centers = uniform_ap_grid(cfg.ap_region_center,
                                         cfg.ap_region_size_m, cfg.num_aps);
        cfg.ma_region_normal.assign(cfg.num_aps,
                                    base.ma_region_normal.front());
    } else if (param == "pathloss_exponent") {
        cfg.pathloss_exponent = value;
    } else {
        throw ConfigError("unknown sweep parameter: " + param);
    }
    validate(cfg);
    return cfg;
}

namespace {

int scheme_stream_id(Scheme scheme) {
    switch (scheme) {
        case Scheme::GaPso: return 3;
        case Scheme::Pso: return 4;
        case Scheme::Fpa: return 5;
        default: return 6;
    }
}

std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

void run_trial(const SweepSpec& spec, int value_index, int trial,
               std::vector<ResultRow>& rows, std::size_t row_base) {
    const ScenarioConfig cfg =
        apply_param(spec.base, spec.param, spec.values[value_index]);
    const Rng trial_rng = Rng(spec.seed)
                              .substream(static_cast<std::uint64_t>(value_index))
                              .substream(static_cast<std::uint64_t>(trial));
    Rng geom_rng = trial_rng.substream(0);
    const ChannelGeometry geom = sample_geometry(cfg, geom_rng);

    for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
        const Scheme scheme = spec.schemes[si];
        Rng scheme_rng = trial_rng.substream(scheme_stream_id(scheme));
        const auto start = std::chrono::steady_clock::now();
        const AoResult ao = run_ao(geom, cfg, scheme_rng, scheme);
        const auto stop = std::chrono::steady_clock::now();

        ResultRow row;
        row.scheme = scheme;
        row.value = spec.values[value_index];
        row.trial = trial;
        row.feasible = ao.feasible;
        row.rounds = static_cast<int>(ao.rounds.size());
        row.wall_s = std::chrono::duration<double>(stop - start).count();
        if (ao.beamformer.size() > 0) {
            row.secrecy_bps = ao.report.rate_secrecy;
            row.secondary_bps = ao.report.rate_secondary;
        }
        rows[row_base + si] = row;
    }
}

}  // namespace

ExperimentResult run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep values list is empty");
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    if (spec.schemes.empty()) throw ConfigError("schemes list is empty");

    ExperimentResult result;
    result.param = spec.param;
    result.values = spec.values;
    const std::size_t schemes = spec.schemes.size();
    result.rows.resize(spec.values.size() * spec.trials * schemes);

    struct Task {
        int value_index;
        int trial;
    };
    std::vector<Task> tasks;
    tasks.reserve(spec.values.size() * spec.trials);
    for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi)
        for (int ti = 0; ti < spec.trials; ++ti) tasks.push_back({vi, ti});

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                const Task& t = tasks[i];
                const std::size_t base =
                    (static_cast<std::size_t>(t.value_index) * spec.trials +
                     t.trial) *
                    schemes;
                run_trial(spec, t.value_index, t.trial, result.rows, base);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    int threads = spec.threads > 0
                      ? spec.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads,
                                        static_cast<int>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    if (!spec.out_dir.empty()) {
        fs::create_directories(spec.out_dir);
        const fs::path raw = fs::path(spec.out_dir) / ("raw_" + spec.param + ".csv");
        std::ofstream raw_out(raw);
        if (!raw_out) throw IoError("cannot write " + raw.string());
        write_rows_csv(raw_out, result);
        const fs::path agg = fs::path(spec.out_dir) / ("agg_" + spec.param + ".csv");
        std::ofstream agg_out(agg);
        if (!agg_out) throw IoError("cannot write " + agg.string());
        write_aggregate_csv(agg_out, result);
    }
    return result;
}

void write_rows_csv(std::ostream& out, const ExperimentResult& result) {
    out << "param,value,trial,scheme,r_sec_bps,r_c_bps,feasible,rounds,"
           "wall_time_s\n";
    for (const auto& row : result.rows) {
        out << result.param << "," << num(row.value) << "," << row.trial << ","
            << scheme_name(row.scheme) << ",";
        if (row.secrecy_bps) out << num(*row.secrecy_bps);
        out << "," << num(row.secondary_bps) << "," << (row.feasible ? 1 : 0)
            << "," << row.rounds << "," << num(row.wall_s) << "\n";
    }
}

ExperimentResult read_rows_csv(std::istream& in) {
    ExperimentResult result;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty results csv");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != 9) throw IoError("bad results row: " + line);
        result.param = fields[0];
        ResultRow row;
        row.value = std::stod(fields[1]);
        row.trial = std::stoi(fields[2]);
        row.scheme = parse_scheme(fields[3]);
        if (!fields[4].empty()) row.secrecy_bps = std::stod(fields[4]);
        row.secondary_bps = std::stod(fields[5]);
        row.feasible = fields[6] == "1";
        row.rounds = std::stoi(fields[7]);
        row.wall_s = std::stod(fields[8]);
        if (std::find(result.values.begin(), result.values.end(), row.value) ==
            result.values.end())
            result.values.push_back(row.value);
        result.rows.push_back(row);
    }
    return result;
}

namespace {

std::vector<Scheme> schemes_in(const ExperimentResult& result) {
    std::vector<Scheme> out;
    for (const auto& row : result.rows)
        if (std::find(out.begin(), out.end(), row.scheme) == out.end())
            out.push_back(row.scheme);
    return out;
}

std::vector<double> secrecy_samples(const ExperimentResult& result,
                                    Scheme scheme, double value) {
    std::vector<double> samples;
    for (const ResultRow* row : result.select(scheme, value))
        if (row->secrecy_bps) samples.push_back(*row->secrecy_bps);
    return samples;
}

}  // namespace

void write_aggregate_csv(std::ostream& out, const ExperimentResult& result) {
    out << "param,value,scheme,trials,mean_r_sec_bps,ci_low,ci_high\n";
    for (double value : result.values) {
        for (Scheme scheme : schemes_in(result)) {
            const auto samples = secrecy_samples(result, scheme, value);
            const Aggregate agg = t_interval(samples);
            out << result.param << "," << num(value) << ","
                << scheme_name(scheme) << "," << agg.count << ","
                << num(agg.mean) << "," << num(agg.ci_low) << ","
                << num(agg.ci_high) << "\n";
        }
    }
}

void emit_plotdata(const ExperimentResult& result, const std::string& out_dir) {
    if (result.rows.empty()) throw ConfigError("no rows to plot");
    fs::create_directories(out_dir);
    const fs::path path = fs::path(out_dir) / ("fig_" + result.param + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "x,scheme,mean,ci_low,ci_high\n";
    std::vector<double> values = result.values;
    std::sort(values.begin(), values.end());
    for (double value : values) {
        for (Scheme scheme : schemes_in(result)) {
            const auto samples = secrecy_samples(result, scheme, value);
            if (samples.empty())
                throw ConfigError("no rows for scheme " + scheme_name(scheme) +
                                  " at value " + num(value));
            const Aggregate agg = t_interval(samples);
            out << num(value) << "," << scheme_name(scheme) << ","
                << num(agg.mean) << "," << num(agg.ci_low) << ","
                << num(agg.ci_high) << "\n";
        }
    }
}

void run_convergence(const ScenarioConfig& cfg, std::uint64_t seed,
                     const std::string& out_dir) {
    fs::create_directories(out_dir);
    const Rng trial_rng = Rng(seed);
    Rng geom_rng = trial_rng.substream(0);
    const ChannelGeometry geom = sample_geometry(cfg, geom_rng);
    const MALayout layout = fpa_baseline_layout(cfg);
    const ChannelSet ch = assemble_channels(geom, layout, cfg);
    const double beta_star = bisect_beta_star(
        cfg.rate_th_secondary_bps, cfg.bandwidth_hz, cfg.solver.bisect_tol);

    const BeamformingSolution sol = solve_p2(ch, beta_star, {}, cfg);
    if (!sol.feasible)
        throw ConfigError("convergence trial infeasible: " + sol.failure);
    {
        std::ofstream out(fs::path(out_dir) / "sca_trace.csv");
        if (!out) throw IoError("cannot write sca_trace.csv");
        out << "iteration,objective_bits_per_s_per_hz\n"
            << std::setprecision(17);
        for (std::size_t i = 0; i < sol.trace.size(); ++i)
            out << i << "," << sol.trace[i] << "\n";
    }

    const LiftedMatrices lifted = build_lifted(ch);
    Rng extraction = trial_rng.substream(1);
    const auto w = extract_beamvector(sol.lifted_w, lifted, beta_star, cfg,
                                      extraction);
    if (!w) throw ConfigError("convergence trial: no feasible beamvector");

    FitnessContext ctx{&geom, &cfg, *w, beta_star};
    for (const SwarmMode mode : {SwarmMode::GaPso, SwarmMode::Pso}) {
        Rng swarm_rng = trial_rng.substream(2);
        const SwarmResult swarm = run_swarm(ctx, swarm_rng, mode);
        const std::string name = mode == SwarmMode::GaPso
                                     ? "swarm_trace_gapso.csv"
                                     : "swarm_trace_pso.csv";
        std::ofstream out(fs::path(out_dir) / name);
        if (!out) throw IoError("cannot write " + name);
        write_swarm_trace(out, swarm);
    }

    Rng ao_rng = trial_rng.substream(3);
    const AoResult ao = run_ao(geom, cfg, ao_rng, Scheme::GaPso);
    std::ofstream out(fs::path(out_dir) / "ao_trace.csv");
    if (!out) throw IoError("cannot write ao_trace.csv");
    write_ao_trace(out, ao);
}

}  // namespace masr

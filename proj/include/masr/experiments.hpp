#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "masr/ao.hpp"
#include "masr/scenario.hpp"

namespace masr {

/// One Monte-Carlo sweep: a parameter axis, trial count and scheme list.
struct SweepSpec {
    std::string param;  // p_max_dbm | n_antennas | m_aps | pathloss_exponent
    std::vector<double> values;
    int trials = 20;
    std::vector<Scheme> schemes;
    ScenarioConfig base;
    std::string out_dir;  // empty: no files written
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency
};

struct ResultRow {
    Scheme scheme = Scheme::GaPso;
    double value = 0.0;
    int trial = 0;
    std::optional<double> secrecy_bps;  // absent for infeasible trials
    double secondary_bps = 0.0;
    bool feasible = false;
    int rounds = 0;
    double wall_s = 0.0;
};

struct ExperimentResult {
    std::string param;
    std::vector<double> values;
    std::vector<ResultRow> rows;

    std::vector<const ResultRow*> select(Scheme scheme, double value) const;
};

struct Aggregate {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int count = 0;
};

/// Sample mean with a 95% t-interval.
Aggregate t_interval(const std::vector<double>& samples);

/// Returns a copy of `base` with one swept parameter applied (AP grid and
/// plane normals are re-derived when the AP count changes).
ScenarioConfig apply_param(const ScenarioConfig& base, const std::string& param,
                           double value);

/// Paired Monte-Carlo sweep: per (value, trial) one shared channel
/// realization is run through every scheme. Rows come back in deterministic
/// (value, trial, scheme) order regardless of worker scheduling. When
/// out_dir is set, writes raw_<param>.csv and agg_<param>.csv.
ExperimentResult run_sweep(const SweepSpec& spec);

void write_rows_csv(std::ostream& out, const ExperimentResult& result);
ExperimentResult read_rows_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const ExperimentResult& result);

/// One CSV per figure analog: columns (x, scheme, mean, ci_low, ci_high).
void emit_plotdata(const ExperimentResult& result, const std::string& out_dir);

/// Single-trial convergence traces: SCA objective per iteration plus swarm
/// gbest traces for both swarm modes, written as CSV files under out_dir.
void run_convergence(const ScenarioConfig& cfg, std::uint64_t seed,
                     const std::string& out_dir);

}  // namespace masr

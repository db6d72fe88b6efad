#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "masr/channel.hpp"
#include "masr/gapso.hpp"
#include "masr/rates.hpp"
#include "masr/rng.hpp"
#include "masr/scenario.hpp"

namespace masr {

enum class Scheme { GaPso, Pso, Fpa, Random };

std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct AoRound {
    int round = 0;
    double secrecy_bps = 0.0;
    int sca_iterations = 0;
    double swarm_best_fitness = 0.0;
    bool feasible = true;
};

struct AoResult {
    Scheme scheme = Scheme::GaPso;
    bool feasible = false;
    std::string failure;
    MALayout layout;
    Eigen::VectorXcd beamformer;
    RateReport report;
    std::vector<AoRound> rounds;
    /// Worst relative violation across power, spacing, box and QoS
    /// constraints at the returned solution (<= 0 when all hold).
    double max_constraint_residual = 0.0;
    double eigen_gap = 0.0;
};

/// Per-AP isotropic random beams at full power; no QoS enforcement.
Eigen::VectorXcd random_beamformer(const ChannelSet& ch,
                                   const ScenarioConfig& cfg, Rng& rng);

/// Alternating optimization over (beamformer, antenna positions) for the
/// gapso/pso schemes; single beamforming solve for fpa; no optimization for
/// random. Infeasible trials are reported in the result, not thrown.
AoResult run_ao(const ChannelGeometry& geom, const ScenarioConfig& cfg,
                Rng& rng, Scheme scheme);

/// Direct residual check of C3/C4/C5/C7/C8 for a concrete solution; returns
/// the worst relative violation (<= 0 when every constraint holds).
double constraint_residual(const ChannelGeometry& geom, const MALayout& layout,
                           const Eigen::VectorXcd& w, double beta_star,
                           const ScenarioConfig& cfg);

void write_ao_trace(std::ostream& out, const AoResult& result);

}  // namespace masr

#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "masr/channel.hpp"
#include "masr/rng.hpp"
#include "masr/scenario.hpp"

namespace masr {

/// Frozen inputs for one swarm run: geometry and the beamformer stay fixed
/// while antenna positions move.
struct FitnessContext {
    const ChannelGeometry* geometry = nullptr;
    const ScenarioConfig* cfg = nullptr;
    Eigen::VectorXcd beamformer;
    double beta_star = 0.0;
};

/// Number of intra-AP antenna pairs closer than `min_distance`.
int violation_set_size(const MALayout& layout, double min_distance);

/// Penalty fitness: secrecy rate in bits/s/Hz at the candidate layout under
/// the frozen beamformer, minus `penalty` per spacing violation and per
/// unmet secondary QoS constraint.
double fitness(const MALayout& layout, const FitnessContext& ctx);

struct Particle {
    MALayout position;
    MALayout velocity;
    MALayout pbest;
    double pbest_fitness = 0.0;
    double current_fitness = 0.0;
};

struct SwarmTracePoint {
    int iteration = 0;
    double gbest_fitness = 0.0;
    double mean_fitness = 0.0;
    int violations_in_gbest = 0;
};

struct SwarmResult {
    MALayout best;
    double best_fitness = 0.0;
    std::vector<SwarmTracePoint> trace;
};

enum class SwarmMode { GaPso, Pso };

// Update rules, exposed for direct testing.
double inertia(int iteration, int total, double omega_max, double omega_min);
std::pair<double, double> operator_schedules(int iteration, int total,
                                             const SwarmParams& swarm);
MALayout update_velocity(const Particle& p, const MALayout& gbest, double omega,
                         double c1, double c2, Rng& rng);
MALayout clamp_layout(const MALayout& layout, const ScenarioConfig& cfg);
MALayout update_position(const MALayout& position, const MALayout& velocity,
                         const ScenarioConfig& cfg);
std::pair<MALayout, MALayout> crossover(const MALayout& a, const MALayout& b,
                                        Rng& rng);
MALayout mutate(const MALayout& layout, const ScenarioConfig& cfg, Rng& rng);

/// Algorithm state machine: linear inertia and operator schedules, velocity
/// plus position updates with boundary clamping, in-place crossover and
/// single-point mutation, pbest/gbest tracking. In Pso mode the genetic
/// operators are kept with probabilities forced to zero.
SwarmResult run_swarm(const FitnessContext& ctx, Rng& rng, SwarmMode mode);

void write_swarm_trace(std::ostream& out, const SwarmResult& result);

}  // namespace masr

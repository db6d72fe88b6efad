#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "masr/channel.hpp"
#include "masr/convex.hpp"
#include "masr/rng.hpp"
#include "masr/scenario.hpp"

namespace masr {

/// Channels lifted to the stacked MN-dimensional beamforming space.
struct LiftedMatrices {
    Eigen::VectorXcd h_pu, h_eve, h_su;  // stacked direct channels
    Eigen::VectorXcd g_pu, g_eve, g_su;  // stacked H_m g blocks per AP
    Eigen::MatrixXcd hh_pu, hh_eve, hh_su;  // h h^H
    Eigen::MatrixXcd gg_pu, gg_eve, gg_su;  // g g^H
};

/// First-order model of the secrecy objective at an expansion point: the two
/// concave logs are kept, the two subtracted logs are replaced by their
/// tangent planes. Everything is in bits/s/Hz (bandwidth applied by callers).
struct SurrogateModel {
    std::vector<LogTerm> log_terms;
    Eigen::MatrixXcd linear;
    double constant = 0.0;

    double value(const Eigen::MatrixXcd& w) const;
};

struct BeamformingSolution {
    Eigen::MatrixXcd lifted_w;      // W*
    double surrogate_value = 0.0;   // bits/s/Hz at the last iterate
    double true_value = 0.0;        // bits/s/Hz at the last iterate
    int sca_iterations = 0;
    double eigen_gap = 0.0;         // lambda_2 / lambda_1 of W*
    std::vector<double> trace;      // true objective per accepted SCA iterate
    bool feasible = true;
    std::string failure;
};

LiftedMatrices build_lifted(const ChannelSet& ch);

/// Secrecy objective in trace form, bits/s/Hz, without the [.]^+ clamp.
double true_secrecy(const LiftedMatrices& lifted, const Eigen::MatrixXcd& w,
                    const ScenarioConfig& cfg);

/// Tangent surrogate at w_t. Throws ConfigError if an interference-plus-noise
/// denominator at w_t is not positive.
SurrogateModel surrogate(const LiftedMatrices& lifted,
                         const Eigen::MatrixXcd& w_t,
                         const ScenarioConfig& cfg);

/// The convex subproblem for one SCA iteration: surrogate objective plus the
/// secondary-QoS and per-AP power constraints.
ConeProblem build_subproblem(const LiftedMatrices& lifted, double beta_star,
                             const Eigen::MatrixXcd& w_t,
                             const ScenarioConfig& cfg);

/// Full SCA loop. `w_init`, when given, is used as the expansion point after
/// being pulled strictly inside the feasible set.
BeamformingSolution solve_p2(const ChannelSet& ch, double beta_star,
                             const std::optional<Eigen::MatrixXcd>& w_init,
                             const ScenarioConfig& cfg);

/// Rank-one beamvector recovery: dominant eigenvector when the spectrum is
/// effectively rank one, Gaussian randomization otherwise. Returns nullopt
/// when no candidate satisfies the QoS constraints.
std::optional<Eigen::VectorXcd> extract_beamvector(
    const Eigen::MatrixXcd& lifted_w, const LiftedMatrices& lifted,
    double beta_star, const ScenarioConfig& cfg, Rng& rng);

/// QoS feasibility of a concrete beamvector (C7/C8 with relative slack tol).
bool qos_feasible(const LiftedMatrices& lifted, const Eigen::VectorXcd& w,
                  double beta_star, const ScenarioConfig& cfg,
                  double rel_tol = 1e-9);

}  // namespace masr

#pragma once

#include <Eigen/Core>

#include "masr/channel.hpp"
#include "masr/scenario.hpp"

namespace masr {

enum class Node { Pu, Eve, Su };

/// All link-quality figures for one (channels, beamformer) pair.
/// Rates are bits/s; SINRs/SNR are linear.
struct RateReport {
    double gamma_pu = 0.0;
    double gamma_eve = 0.0;
    double gamma_su = 0.0;
    double beta_c = 0.0;
    double rate_pu = 0.0;
    double rate_eve = 0.0;
    double rate_su = 0.0;
    double rate_secondary = 0.0;
    double rate_secrecy = 0.0;
};

double node_noise_w(const ScenarioConfig& cfg, Node node);

/// SINR of the primary signal at a node: the backscatter path acts as
/// interference. `w` stacks the per-AP beamvectors (length M*N).
double sinr_primary(const ChannelSet& ch, const Eigen::VectorXcd& w, Node node,
                    const ScenarioConfig& cfg);

/// [R_p - R_e]^+ in bits/s.
double secrecy_rate(const ChannelSet& ch, const Eigen::VectorXcd& w,
                    const ScenarioConfig& cfg);

/// Post-SIC backscatter SNR at the SU (linear).
double snr_secondary(const ChannelSet& ch, const Eigen::VectorXcd& w,
                     const ScenarioConfig& cfg);

/// Exponential integral Ei(x) for x < 0; throws std::domain_error otherwise.
double exponential_integral_ei(double x);

/// Ergodic BD->SU rate: B * E[log2(1 + beta |s|^2)] with |s|^2 ~ Exp(1),
/// evaluated in closed form; continuous (= 0) at beta = 0.
double ergodic_secondary_rate(double beta_c, double bandwidth_hz);

/// Inverts ergodic_secondary_rate: smallest beta with rate >= threshold,
/// within `rel_tol` on the rate residual.
double bisect_beta_star(double rate_threshold_bps, double bandwidth_hz,
                        double rel_tol);

/// SINR floor implied by the primary-rate threshold at the SU:
/// 2^(R_th1 / B) - 1.
double primary_qos_threshold(const ScenarioConfig& cfg);

RateReport rate_report(const ChannelSet& ch, const Eigen::VectorXcd& w,
                       const ScenarioConfig& cfg);

}  // namespace masr

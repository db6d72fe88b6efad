#include "masr/ao.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "masr/beamforming.hpp"
#include "masr/errors.hpp"

namespace masr {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::GaPso: return "gapso";
        case Scheme::Pso: return "pso";
        case Scheme::Fpa: return "fpa";
        default: return "random";
    }
}

Scheme parse_scheme(const std::string& name) {
    if (name == "gapso") return Scheme::GaPso;
    if (name == "pso") return Scheme::Pso;
    if (name == "fpa") return Scheme::Fpa;
    if (name == "random") return Scheme::Random;
    throw ConfigError("unknown scheme: " + name);
}

Eigen::VectorXcd random_beamformer(const ChannelSet& ch,
                                   const ScenarioConfig& cfg, Rng& rng) {
    const int n = cfg.antennas_per_ap;
    Eigen::VectorXcd w(cfg.num_aps * n);
    for (int m = 0; m < cfg.num_aps; ++m) {
        Eigen::VectorXcd block(n);
        for (int i = 0; i < n; ++i) block(i) = rng.cnormal(1.0);
        block *= std::sqrt(cfg.max_power_w) / block.norm();
        w.segment(m * n, n) = block;
    }
    return w;
}

double constraint_residual(const ChannelGeometry& geom, const MALayout& layout,
                           const Eigen::VectorXcd& w, double beta_star,
                           const ScenarioConfig& cfg) {
    double worst = -std::numeric_limits<double>::infinity();
    // C3: per-AP power.
    const int n = cfg.antennas_per_ap;
    for (int m = 0; m < cfg.num_aps; ++m) {
        const double p = w.segment(m * n, n).squaredNorm();
        worst = std::max(worst, (p - cfg.max_power_w) / cfg.max_power_w);
    }
    // C4: inter-antenna spacing.
    const double min_dist = min_intra_ap_distance(layout);
    if (n > 1)
        worst = std::max(worst, (cfg.min_ma_distance_m - min_dist) /
                                    cfg.min_ma_distance_m);
    // C5: region box.
    for (int m = 0; m < cfg.num_aps; ++m)
        for (const Vec3& p : layout.positions[m]) {
            const double box =
                std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
            worst = std::max(
                worst, (box - cfg.region_halfwidth_m) / cfg.region_halfwidth_m);
        }
    // C7/C8 at the actual channels.
    const ChannelSet ch = assemble_channels(geom, layout, cfg);
    if (beta_star > 0.0) {
        const double beta = snr_secondary(ch, w, cfg);
        worst = std::max(worst, (beta_star - beta) / beta_star);
    }
    const double gamma1 = primary_qos_threshold(cfg);
    if (gamma1 > 0.0) {
        const double gamma_su = sinr_primary(ch, w, Node::Su, cfg);
        worst = std::max(worst, (gamma1 - gamma_su) / gamma1);
    }
    return worst;
}

namespace {

struct BeamStep {
    Eigen::VectorXcd w;
    double secrecy_hz = 0.0;
    int sca_iterations = 0;
    double eigen_gap = 0.0;
    bool feasible = false;
    std::string failure;
};

// One beamforming solve plus rank-one recovery at a fixed layout.
BeamStep beamforming_step(const ChannelSet& ch, double beta_star,
                          const std::optional<Eigen::MatrixXcd>& warm,
                          const ScenarioConfig& cfg, Rng& rng) {
    BeamStep step;
    const BeamformingSolution sol = solve_p2(ch, beta_star, warm, cfg);
    if (!sol.feasible) {
        step.failure = sol.failure;
        return step;
    }
    const LiftedMatrices lifted = build_lifted(ch);
    const auto w = extract_beamvector(sol.lifted_w, lifted, beta_star, cfg, rng);
    if (!w) {
        step.failure = "no feasible beamvector candidate";
        return step;
    }
    step.w = *w;
    step.secrecy_hz =
        std::max(true_secrecy(lifted, Eigen::MatrixXcd(*w * w->adjoint()), cfg),
                 0.0);
    step.sca_iterations = sol.sca_iterations;
    step.eigen_gap = sol.eigen_gap;
    step.feasible = true;
    return step;
}

}  // namespace

AoResult run_ao(const ChannelGeometry& geom, const ScenarioConfig& cfg,
                Rng& rng, Scheme scheme) {
    AoResult result;
    result.scheme = scheme;
    const double beta_star =
        bisect_beta_star(cfg.rate_th_secondary_bps, cfg.bandwidth_hz,
                         cfg.solver.bisect_tol);

    MALayout layout = fpa_baseline_layout(cfg);
    Rng extraction = rng.substream(1);

    if (scheme == Scheme::Random) {
        const ChannelSet ch = assemble_channels(geom, layout, cfg);
        result.layout = layout;
        Rng beam_rng = rng.substream(2);
        result.beamformer = random_beamformer(ch, cfg, beam_rng);
        result.report = rate_report(ch, result.beamformer, cfg);
        result.max_constraint_residual =
            constraint_residual(geom, layout, result.beamformer, beta_star, cfg);
        result.feasible = result.max_constraint_residual <= 1e-6;
        if (!result.feasible) result.failure = "random beams violate QoS";
        result.rounds.push_back(
            {1, result.report.rate_secrecy, 0, 0.0, result.feasible});
        return result;
    }

    Eigen::VectorXcd w;
    double secrecy_hz = 0.0;
    std::optional<Eigen::MatrixXcd> warm;
    const double tol = cfg.solver.ao_tol;
    double previous = -std::numeric_limits<double>::infinity();
    for (int round = 1; round <= cfg.solver.ao_round_cap; ++round) {
        AoRound entry;
        entry.round = round;

        // Position step (from round 2; fpa keeps the baseline grid).
        if (round > 1 && (scheme == Scheme::GaPso || scheme == Scheme::Pso)) {
            FitnessContext ctx{&geom, &cfg, w, beta_star};
            Rng swarm_rng = rng.substream(100 + round);
            const SwarmResult swarm = run_swarm(
                ctx, swarm_rng,
                scheme == Scheme::GaPso ? SwarmMode::GaPso : SwarmMode::Pso);
            entry.swarm_best_fitness = swarm.best_fitness;
            // Accept only a strictly better, fully feasible layout; a
            // rejected candidate ends the alternation at the incumbent.
            const bool clean =
                violation_set_size(swarm.best, cfg.min_ma_distance_m) == 0 &&
                swarm.best_fitness > secrecy_hz;
            if (clean) {
                const double check = fitness(swarm.best, ctx);
                if (check > secrecy_hz &&
                    std::abs(check - swarm.best_fitness) < 1e-9) {
                    layout = swarm.best;
                    secrecy_hz = check;
                } else {
                    entry.swarm_best_fitness = check;
                }
            }
            if (layout != swarm.best) {
                // Incumbent kept: alternation has stalled.
                entry.secrecy_bps = secrecy_hz * cfg.bandwidth_hz;
                entry.feasible = true;
                result.rounds.push_back(entry);
                break;
            }
        }

        const ChannelSet ch = assemble_channels(geom, layout, cfg);
        Rng step_rng = extraction.substream(round);
        const BeamStep step = beamforming_step(ch, beta_star, warm, cfg, step_rng);
        if (!step.feasible) {
            if (round == 1) {
                result.failure = step.failure;
                result.feasible = false;
                return result;
            }
            // A later round failing feasibility keeps the incumbent solution.
            break;
        }
        entry.sca_iterations = step.sca_iterations;
        if (round == 1 || step.secrecy_hz > secrecy_hz) {
            w = step.w;
            secrecy_hz = step.secrecy_hz;
            result.eigen_gap = step.eigen_gap;
        }
        warm = Eigen::MatrixXcd(w * w.adjoint());

        entry.secrecy_bps = secrecy_hz * cfg.bandwidth_hz;
        entry.feasible = true;
        result.rounds.push_back(entry);

        if (round > 1 && secrecy_hz - previous <= tol) break;
        previous = secrecy_hz;

        if (scheme == Scheme::Fpa && round >= 2) break;
    }

    const ChannelSet ch = assemble_channels(geom, layout, cfg);
    result.layout = layout;
    result.beamformer = w;
    result.report = rate_report(ch, w, cfg);
    result.max_constraint_residual =
        constraint_residual(geom, layout, w, beta_star, cfg);
    result.feasible = true;
    return result;
}

void write_ao_trace(std::ostream& out, const AoResult& result) {
    out << "round,r_sec_bits_per_s,sca_iters,swarm_best_fitness,feasible\n";
    out << std::setprecision(17);
    for (const auto& r : result.rounds)
        out << r.round << "," << r.secrecy_bps << "," << r.sca_iterations << ","
            << r.swarm_best_fitness << "," << (r.feasible ? 1 : 0) << "\n";
}

}  // namespace masr

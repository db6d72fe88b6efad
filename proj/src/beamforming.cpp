#include "masr/beamforming.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "masr/errors.hpp"
#include "masr/rates.hpp"

namespace masr {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double trace_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.cwiseProduct(b.conjugate()).sum().real();
}

}  // namespace

LiftedMatrices build_lifted(const ChannelSet& ch) {
    const int aps = static_cast<int>(ch.ap_to_bd.size());
    const Eigen::Index n = ch.ap_to_pu[0].size();
    LiftedMatrices out;
    out.h_pu.resize(aps * n);
    out.h_eve.resize(aps * n);
    out.h_su.resize(aps * n);
    out.g_pu.resize(aps * n);
    out.g_eve.resize(aps * n);
    out.g_su.resize(aps * n);
    for (int m = 0; m < aps; ++m) {
        out.h_pu.segment(m * n, n) = ch.ap_to_pu[m];
        out.h_eve.segment(m * n, n) = ch.ap_to_eve[m];
        out.h_su.segment(m * n, n) = ch.ap_to_su[m];
        // g blocks: H_m g_{b,xi} with H_m = (H_m^H)^H.
        out.g_pu.segment(m * n, n) = ch.ap_to_bd[m].adjoint() * ch.bd_to_pu;
        out.g_eve.segment(m * n, n) = ch.ap_to_bd[m].adjoint() * ch.bd_to_eve;
        out.g_su.segment(m * n, n) = ch.ap_to_bd[m].adjoint() * ch.bd_to_su;
    }
    out.hh_pu = out.h_pu * out.h_pu.adjoint();
    out.hh_eve = out.h_eve * out.h_eve.adjoint();
    out.hh_su = out.h_su * out.h_su.adjoint();
    out.gg_pu = out.g_pu * out.g_pu.adjoint();
    out.gg_eve = out.g_eve * out.g_eve.adjoint();
    out.gg_su = out.g_su * out.g_su.adjoint();
    return out;
}

double true_secrecy(const LiftedMatrices& lifted, const Eigen::MatrixXcd& w,
                    const ScenarioConfig& cfg) {
    const double a = cfg.reflection_coeff;
    const double ip_pu = a * trace_inner(lifted.gg_pu, w) + cfg.noise_pu_w;
    const double ip_eve = a * trace_inner(lifted.gg_eve, w) + cfg.noise_eve_w;
    const double sig_pu = trace_inner(lifted.hh_pu, w);
    const double sig_eve = trace_inner(lifted.hh_eve, w);
    return std::log2(1.0 + sig_pu / ip_pu) - std::log2(1.0 + sig_eve / ip_eve);
}

double SurrogateModel::value(const Eigen::MatrixXcd& w) const {
    double v = constant + trace_inner(linear, w);
    for (const auto& t : log_terms)
        v += t.coeff * std::log(t.offset + trace_inner(t.matrix, w));
    return v;
}

SurrogateModel surrogate(const LiftedMatrices& lifted,
                         const Eigen::MatrixXcd& w_t,
                         const ScenarioConfig& cfg) {
    const double a = cfg.reflection_coeff;
    // Denominators of the two subtracted logs at the expansion point.
    const double den_pu = a * trace_inner(lifted.gg_pu, w_t) + cfg.noise_pu_w;
    const double den_eve = a * trace_inner(lifted.gg_eve, w_t) +
                           cfg.noise_eve_w + trace_inner(lifted.hh_eve, w_t);
    if (!(den_pu > 0.0) || !(den_eve > 0.0))
        throw ConfigError("surrogate: non-positive denominator at expansion point");

    SurrogateModel model;
    // Retained concave logs: g1 (primary signal-plus-interference) and g4
    // (eavesdropper interference-plus-noise).
    model.log_terms.push_back(
        {1.0 / kLn2, cfg.noise_pu_w,
         Eigen::MatrixXcd(a * lifted.gg_pu + lifted.hh_pu)});
    model.log_terms.push_back(
        {1.0 / kLn2, cfg.noise_eve_w, Eigen::MatrixXcd(a * lifted.gg_eve)});

    // Tangent planes of the subtracted logs g2, g3.
    model.linear = -(a / (den_pu * kLn2)) * lifted.gg_pu -
                   (1.0 / (den_eve * kLn2)) *
                       (a * lifted.gg_eve + lifted.hh_eve);
    model.constant =
        -std::log2(den_pu) - std::log2(den_eve) +
        (a * trace_inner(lifted.gg_pu, w_t)) / (den_pu * kLn2) +
        (a * trace_inner(lifted.gg_eve, w_t) +
         trace_inner(lifted.hh_eve, w_t)) /
            (den_eve * kLn2);
    return model;
}

ConeProblem build_subproblem(const LiftedMatrices& lifted, double beta_star,
                             const Eigen::MatrixXcd& w_t,
                             const ScenarioConfig& cfg) {
    const int n = static_cast<int>(lifted.h_pu.size());
    const int block = cfg.antennas_per_ap;
    const double a = cfg.reflection_coeff;

    ConeProblem prob;
    prob.dim = n;
    prob.block_size = block;
    const SurrogateModel model = surrogate(lifted, w_t, cfg);
    prob.log_terms = model.log_terms;
    prob.linear = model.linear;
    prob.constant = model.constant;

    // Secondary SNR floor (from C2 via the bisected beta*).
    if (beta_star > 0.0)
        prob.constraints.push_back({Eigen::MatrixXcd(a * lifted.gg_su),
                                    beta_star * cfg.noise_su_w, Sense::Geq,
                                    "secondary_snr"});
    // Primary-rate floor at the SU.
    const double gamma1 = primary_qos_threshold(cfg);
    if (gamma1 > 0.0)
        prob.constraints.push_back(
            {Eigen::MatrixXcd(lifted.hh_su - gamma1 * a * lifted.gg_su),
             gamma1 * cfg.noise_su_w, Sense::Geq, "primary_qos_su"});
    // Per-AP power caps.
    for (int m = 0; m < cfg.num_aps; ++m) {
        Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(n, n);
        sel.block(m * block, m * block, block, block) =
            Eigen::MatrixXcd::Identity(block, block);
        prob.constraints.push_back({std::move(sel), cfg.max_power_w, Sense::Leq,
                                    "power_ap_" + std::to_string(m + 1)});
    }
    return prob;
}

BeamformingSolution solve_p2(const ChannelSet& ch, double beta_star,
                             const std::optional<Eigen::MatrixXcd>& w_init,
                             const ScenarioConfig& cfg) {
    const LiftedMatrices lifted = build_lifted(ch);
    BeamformingSolution out;

    // Expansion point: caller-provided warm start pulled strictly inside,
    // else the phase-1 seed.
    ConeProblem probe = build_subproblem(lifted, beta_star,
                                         Eigen::MatrixXcd::Identity(
                                             lifted.h_pu.size(),
                                             lifted.h_pu.size()),
                                         cfg);
    const auto seed = feasibility_seed(probe);
    if (!seed) {
        out.feasible = false;
        out.failure = "secondary QoS unsatisfiable at P_max";
        return out;
    }
    Eigen::MatrixXcd w_t = *seed;
    if (w_init) {
        const Eigen::MatrixXcd mixed = 0.999 * (*w_init) + 0.001 * (*seed);
        if (probe.min_slack(mixed) > 0.0) w_t = mixed;
    }

    double current = true_secrecy(lifted, w_t, cfg);
    out.trace.push_back(current);
    const int max_iterations = 60;
    double surrogate_at_last = current;
    for (int it = 0; it < max_iterations; ++it) {
        const ConeProblem prob = build_subproblem(lifted, beta_star, w_t, cfg);
        const ConeSolution sol = solve(prob, 1e-6, w_t);
        if (!sol.feasible) {
            out.feasible = false;
            out.failure = sol.failure;
            return out;
        }
        out.sca_iterations = it + 1;
        const double candidate = true_secrecy(lifted, sol.w, cfg);
        if (candidate < current - 1e-6)
            throw std::logic_error(
                "solve_p2: SCA step decreased the true objective");
        if (candidate <= current) {
            // Solver noise at stationarity; keep the incumbent.
            break;
        }
        w_t = sol.w;
        surrogate_at_last = sol.objective;
        out.trace.push_back(candidate);
        const double gain = candidate - current;
        current = candidate;
        if (gain <= cfg.solver.sca_tol) break;
    }

    out.lifted_w = w_t;
    out.true_value = current;
    out.surrogate_value = surrogate_at_last;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w_t);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const double l1 = es.eigenvalues()(top);
    const double l2 = top > 0 ? std::max(es.eigenvalues()(top - 1), 0.0) : 0.0;
    out.eigen_gap = l1 > 0.0 ? l2 / l1 : 0.0;
    return out;
}

bool qos_feasible(const LiftedMatrices& lifted, const Eigen::VectorXcd& w,
                  double beta_star, const ScenarioConfig& cfg, double rel_tol) {
    const double a = cfg.reflection_coeff;
    const double backscatter_su = std::norm(lifted.g_su.dot(w));
    const double beta = a * backscatter_su / cfg.noise_su_w;
    if (beta + rel_tol * std::max(beta_star, 1.0) < beta_star) return false;
    const double gamma1 = primary_qos_threshold(cfg);
    if (gamma1 > 0.0) {
        const double sig = std::norm(lifted.h_su.dot(w));
        const double gamma_su = sig / (a * backscatter_su + cfg.noise_su_w);
        if (gamma_su + rel_tol * std::max(gamma1, 1.0) < gamma1) return false;
    }
    return true;
}

std::optional<Eigen::VectorXcd> extract_beamvector(
    const Eigen::MatrixXcd& lifted_w, const LiftedMatrices& lifted,
    double beta_star, const ScenarioConfig& cfg, Rng& rng) {
    const Eigen::Index n = lifted_w.rows();
    const int block = cfg.antennas_per_ap;
    const int aps = cfg.num_aps;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lifted_w);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const double l1 = std::max(es.eigenvalues()(top), 0.0);
    const double l2 = top > 0 ? std::max(es.eigenvalues()(top - 1), 0.0) : 0.0;

    const auto clamp_power = [&](Eigen::VectorXcd w) {
        for (int m = 0; m < aps; ++m) {
            const double p = w.segment(m * block, block).squaredNorm();
            if (p > cfg.max_power_w)
                w.segment(m * block, block) *= std::sqrt(cfg.max_power_w / p);
        }
        return w;
    };

    const Eigen::VectorXcd direct =
        clamp_power(std::sqrt(l1) * es.eigenvectors().col(top));
    if (l1 > 0.0 && l2 / l1 <= 1e-6 &&
        qos_feasible(lifted, direct, beta_star, cfg))
        return direct;

    // Gaussian randomization: candidates ~ CN(0, W*) with per-AP rescaling.
    Eigen::VectorXcd sqrt_eigs = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index i = 0; i <= top; ++i)
        sqrt_eigs(i) = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    std::optional<Eigen::VectorXcd> best;
    double best_value = -std::numeric_limits<double>::infinity();
    const auto consider = [&](const Eigen::VectorXcd& w) {
        if (!qos_feasible(lifted, w, beta_star, cfg)) return;
        const Eigen::MatrixXcd outer = w * w.adjoint();
        const double value = true_secrecy(lifted, outer, cfg);
        if (value > best_value) {
            best_value = value;
            best = w;
        }
    };
    consider(direct);
    for (int draw = 0; draw < 200; ++draw) {
        Eigen::VectorXcd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.cnormal(1.0);
        consider(clamp_power(es.eigenvectors() *
                             (sqrt_eigs.cwiseProduct(z))));
    }
    return best;
}

}  // namespace masr

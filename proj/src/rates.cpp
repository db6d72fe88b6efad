#include "masr/rates.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace masr {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// E1(z) via the truncated power series, stable for 0 < z < 1:
// E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!).
double e1_series(double z) {
    double sum = 0.0;
    double term = 1.0;  // z^k / k!
    for (int k = 1; k <= 60; ++k) {
        term *= z / k;
        const double contrib = ((k % 2) ? term : -term) / k;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(z) + sum;
}

// exp(z) E1(z) via the modified Lentz continued fraction, stable for z >= 1:
// E1(z) = e^-z / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
double exp_e1_continued_fraction(double z) {
    const double tiny = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k <= 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

// exp(z) E1(z) for z > 0; the overflow-free form used by the ergodic rate.
double scaled_e1(double z) {
    if (z >= 1.0) return exp_e1_continued_fraction(z);
    return std::exp(z) * e1_series(z);
}

}  // namespace

double exponential_integral_ei(double x) {
    if (x >= 0.0)
        throw std::domain_error("exponential_integral_ei: requires x < 0");
    const double z = -x;
    if (z >= 1.0) return -std::exp(-z) * exp_e1_continued_fraction(z);
    return -e1_series(z);
}

double ergodic_secondary_rate(double beta_c, double bandwidth_hz) {
    if (beta_c < 0.0)
        throw std::domain_error("ergodic_secondary_rate: beta_c must be >= 0");
    if (beta_c == 0.0) return 0.0;
    // B log2(e) e^{1/beta} E1(1/beta), with exp folded into the E1 evaluation
    // so small beta cannot overflow.
    return bandwidth_hz * std::numbers::log2e * scaled_e1(1.0 / beta_c);
}

double bisect_beta_star(double rate_threshold_bps, double bandwidth_hz,
                        double rel_tol) {
    if (rate_threshold_bps <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (ergodic_secondary_rate(hi, bandwidth_hz) < rate_threshold_bps)
        hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rate = ergodic_secondary_rate(mid, bandwidth_hz);
        if (std::abs(rate - rate_threshold_bps) <=
            rel_tol * rate_threshold_bps)
            return mid;
        (rate < rate_threshold_bps ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double primary_qos_threshold(const ScenarioConfig& cfg) {
    return std::pow(2.0, cfg.rate_th_primary_bps / cfg.bandwidth_hz) - 1.0;
}

double node_noise_w(const ScenarioConfig& cfg, Node node) {
    switch (node) {
        case Node::Pu: return cfg.noise_pu_w;
        case Node::Eve: return cfg.noise_eve_w;
        default: return cfg.noise_su_w;
    }
}

namespace {

const Eigen::VectorXcd& direct_channel(const ChannelSet& ch, Node node, int m) {
    switch (node) {
        case Node::Pu: return ch.ap_to_pu[m];
        case Node::Eve: return ch.ap_to_eve[m];
        default: return ch.ap_to_su[m];
    }
}

const Eigen::VectorXcd& backscatter_channel(const ChannelSet& ch, Node node) {
    switch (node) {
        case Node::Pu: return ch.bd_to_pu;
        case Node::Eve: return ch.bd_to_eve;
        default: return ch.bd_to_su;
    }
}

struct LinkPowers {
    double direct = 0.0;       // |sum_m h_m^H w_m|^2
    double backscatter = 0.0;  // |sum_m g^H H_m^H w_m|^2
};

LinkPowers link_powers(const ChannelSet& ch, const Eigen::VectorXcd& w,
                       Node node) {
    const int aps = static_cast<int>(ch.ap_to_bd.size());
    const Eigen::Index n = ch.ap_to_pu.empty() ? 0 : ch.ap_to_pu[0].size();
    const Eigen::VectorXcd& g = backscatter_channel(ch, node);
    std::complex<double> direct{0.0, 0.0};
    std::complex<double> reflected{0.0, 0.0};
    for (int m = 0; m < aps; ++m) {
        const Eigen::VectorXcd wm = w.segment(m * n, n);
        direct += direct_channel(ch, node, m).dot(wm);
        reflected += g.dot(ch.ap_to_bd[m] * wm);
    }
    return {std::norm(direct), std::norm(reflected)};
}

}  // namespace

double sinr_primary(const ChannelSet& ch, const Eigen::VectorXcd& w, Node node,
                    const ScenarioConfig& cfg) {
    const LinkPowers p = link_powers(ch, w, node);
    return p.direct /
           (cfg.reflection_coeff * p.backscatter + node_noise_w(cfg, node));
}

double secrecy_rate(const ChannelSet& ch, const Eigen::VectorXcd& w,
                    const ScenarioConfig& cfg) {
    const double rp =
        cfg.bandwidth_hz * std::log2(1.0 + sinr_primary(ch, w, Node::Pu, cfg));
    const double re =
        cfg.bandwidth_hz * std::log2(1.0 + sinr_primary(ch, w, Node::Eve, cfg));
    return std::max(rp - re, 0.0);
}

double snr_secondary(const ChannelSet& ch, const Eigen::VectorXcd& w,
                     const ScenarioConfig& cfg) {
    const LinkPowers p = link_powers(ch, w, Node::Su);
    return cfg.reflection_coeff * p.backscatter / cfg.noise_su_w;
}

RateReport rate_report(const ChannelSet& ch, const Eigen::VectorXcd& w,
                       const ScenarioConfig& cfg) {
    RateReport r;
    r.gamma_pu = sinr_primary(ch, w, Node::Pu, cfg);
    r.gamma_eve = sinr_primary(ch, w, Node::Eve, cfg);
    r.gamma_su = sinr_primary(ch, w, Node::Su, cfg);
    r.beta_c = snr_secondary(ch, w, cfg);
    const double b = cfg.bandwidth_hz;
    r.rate_pu = b * std::log2(1.0 + r.gamma_pu);
    r.rate_eve = b * std::log2(1.0 + r.gamma_eve);
    r.rate_su = b * std::log2(1.0 + r.gamma_su);
    r.rate_secondary = ergodic_secondary_rate(r.beta_c, b);
    r.rate_secrecy = std::max(r.rate_pu - r.rate_eve, 0.0);
    return r;
}

}  // namespace masr

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "masr/channel.hpp"
#include "masr/rates.hpp"
#include "masr/rng.hpp"
#include "masr/scenario.hpp"

using namespace masr;

namespace {

// Adaptive Simpson quadrature, independent of the library's Ei evaluation.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fb, double fm, double eps,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

double quadrature(const std::function<double(double)>& f, double a, double b,
                  double eps) {
    const double m = 0.5 * (a + b);
    return adaptive_simpson(f, a, b, f(a), f(b), f(m), eps, 40);
}

// Oracle: Ei(x) = -E1(-x) = -exp(x) * integral_0^inf exp(-u)/(u - x) du for
// x < 0, integrated numerically with the tail truncated at u = 60.
double ei_oracle(double x) {
    const double z = -x;
    const auto integrand = [&](double u) { return std::exp(-u) / (z + u); };
    return -std::exp(-z) * quadrature(integrand, 0.0, 60.0, 1e-14);
}

// Monte-Carlo oracle for E[log2(1 + beta X)], X ~ Exp(1).
double ergodic_mc_oracle(double beta, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = -std::log(1.0 - rng.uniform());
        acc += std::log2(1.0 + beta * x);
    }
    return acc / samples;
}

ScenarioConfig tiny_config() {
    ScenarioConfig cfg = default_scenario();
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 2;
    cfg.bd_antennas = 2;
    cfg.paths_per_link = 3;
    cfg.ap_centers = uniform_ap_grid(cfg.ap_region_center, cfg.ap_region_size_m,
                                     cfg.num_aps);
    cfg.ma_region_normal.assign(cfg.num_aps, 'y');
    validate(cfg);
    return cfg;
}

// Naive SINR evaluation with explicit loops.
double sinr_oracle(const ChannelSet& ch, const Eigen::VectorXcd& w, Node node,
                   const ScenarioConfig& cfg) {
    const int n = cfg.antennas_per_ap;
    std::complex<double> direct{0, 0};
    std::complex<double> refl{0, 0};
    for (int m = 0; m < cfg.num_aps; ++m) {
        const Eigen::VectorXcd& h = node == Node::Pu   ? ch.ap_to_pu[m]
                                    : node == Node::Eve ? ch.ap_to_eve[m]
                                                        : ch.ap_to_su[m];
        const Eigen::VectorXcd& g = node == Node::Pu   ? ch.bd_to_pu
                                    : node == Node::Eve ? ch.bd_to_eve
                                                        : ch.bd_to_su;
        for (int i = 0; i < n; ++i)
            direct += std::conj(h(i)) * w(m * n + i);
        for (int l = 0; l < static_cast<int>(g.size()); ++l)
            for (int i = 0; i < n; ++i)
                refl += std::conj(g(l)) * ch.ap_to_bd[m](l, i) * w(m * n + i);
    }
    const double noise = node == Node::Pu   ? cfg.noise_pu_w
                         : node == Node::Eve ? cfg.noise_eve_w
                                             : cfg.noise_su_w;
    return std::norm(direct) /
           (cfg.reflection_coeff * std::norm(refl) + noise);
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("exponential integral against the quadrature oracle") {
    CHECK(exponential_integral_ei(-1.0) ==
          doctest::Approx(-0.2193839).epsilon(1e-6));
    CHECK(exponential_integral_ei(-0.5) ==
          doctest::Approx(-0.5598).epsilon(1e-4));
    CHECK(exponential_integral_ei(-1.0) ==
          doctest::Approx(ei_oracle(-1.0)).epsilon(1e-10));
    // |Ei(x)| shrinks as x moves away from the log singularity at 0.
    CHECK(std::abs(exponential_integral_ei(-0.5)) >
          std::abs(exponential_integral_ei(-1.0)));
    CHECK(exponential_integral_ei(-0.5) <= exponential_integral_ei(-1.0));
    CHECK(std::abs(exponential_integral_ei(-50.0)) < 1e-22);

    for (double x : {-0.05, -0.3, -0.9, -1.0, -2.5, -7.0, -20.0}) {
        CHECK(exponential_integral_ei(x) ==
              doctest::Approx(ei_oracle(x)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(exponential_integral_ei(0.0), std::domain_error);
    CHECK_THROWS_AS(exponential_integral_ei(1.0), std::domain_error);
}

TEST_CASE("ergodic secondary rate closed form") {
    CHECK(ergodic_secondary_rate(0.0, 1.0) == 0.0);
    CHECK(ergodic_secondary_rate(1.0, 1.0) ==
          doctest::Approx(0.8604).epsilon(2e-4));
    // Closed-form via oracle Ei values.
    CHECK(ergodic_secondary_rate(1.0, 1.0) ==
          doctest::Approx(-std::exp(1.0) * ei_oracle(-1.0) * std::log2(std::exp(1.0)))
              .epsilon(1e-10));
    // Tiny beta must not overflow.
    CHECK(ergodic_secondary_rate(1e-4, 1.0) > 0.0);
    CHECK(std::isfinite(ergodic_secondary_rate(1e-6, 1.0)));

    SUBCASE("matches Monte Carlo within 0.5%") {
        for (double beta : {0.1, 1.0, 10.0, 100.0}) {
            const double mc = ergodic_mc_oracle(beta, 1000000, 99);
            CHECK(ergodic_secondary_rate(beta, 1.0) ==
                  doctest::Approx(mc).epsilon(0.005));
        }
    }

    SUBCASE("strictly increasing and below the Jensen bound") {
        Rng rng(4);
        double prev = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double beta = 0.05 * i * i;
            const double rate = ergodic_secondary_rate(beta, 1.0);
            CHECK(rate > prev);
            CHECK(rate <= std::log2(1.0 + beta));
            prev = rate;
        }
        for (int i = 0; i < 50; ++i) {
            const double beta = std::exp(rng.uniform(-3.0, 5.0));
            CHECK(ergodic_secondary_rate(beta, 1.0) <=
                  std::log2(1.0 + beta) + 1e-12);
        }
    }
}

TEST_CASE("beta-star bisection inverts the ergodic rate") {
    CHECK(bisect_beta_star(0.0, 100e3, 1e-6) == 0.0);

    const double b = 100e3;
    const double target = 600e3;
    const double beta = bisect_beta_star(target, b, 1e-6);
    CHECK(std::abs(ergodic_secondary_rate(beta, b) - target) <= 1e-6 * target);

    SUBCASE("monotone in the threshold") {
        const double lo = bisect_beta_star(200e3, b, 1e-6);
        const double hi = bisect_beta_star(600e3, b, 1e-6);
        CHECK(hi > lo);
    }

    SUBCASE("round trip on random rates") {
        Rng rng(8);
        for (int i = 0; i < 20; ++i) {
            const double beta_true = std::exp(rng.uniform(-2.0, 6.0));
            const double rate = ergodic_secondary_rate(beta_true, b);
            const double beta_est = bisect_beta_star(rate, b, 1e-9);
            CHECK(ergodic_secondary_rate(beta_est, b) ==
                  doctest::Approx(rate).epsilon(1e-8));
        }
    }
}

TEST_CASE("primary SINR via the loop oracle") {
    const ScenarioConfig cfg = tiny_config();
    Rng rng(21);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    const ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    const int dim = cfg.num_aps * cfg.antennas_per_ap;

    SUBCASE("zero beamformer gives zero SINR") {
        const Eigen::VectorXcd w = Eigen::VectorXcd::Zero(dim);
        CHECK(sinr_primary(ch, w, Node::Pu, cfg) == 0.0);
        CHECK(snr_secondary(ch, w, cfg) == 0.0);
        CHECK(secrecy_rate(ch, w, cfg) == 0.0);
    }

    SUBCASE("random beamformers match the naive loops") {
        for (int rep = 0; rep < 50; ++rep) {
            Eigen::VectorXcd w(dim);
            for (int i = 0; i < dim; ++i) w(i) = rng.cnormal(1.0);
            for (Node node : {Node::Pu, Node::Eve, Node::Su}) {
                CHECK(sinr_primary(ch, w, node, cfg) ==
                      doctest::Approx(sinr_oracle(ch, w, node, cfg))
                          .epsilon(1e-9));
            }
        }
    }

    SUBCASE("matched-filter upper bound is attained for a single AP") {
        ScenarioConfig solo = tiny_config();
        solo.num_aps = 1;
        solo.reflection_coeff = 0.0;
        solo.ap_centers = {solo.ap_centers[0]};
        solo.ma_region_normal = {'y'};
        validate(solo);
        Rng r2(5);
        const ChannelGeometry g2 = sample_geometry(solo, r2);
        const ChannelSet c2 =
            assemble_channels(g2, fpa_baseline_layout(solo), solo);
        const Eigen::VectorXcd h = c2.ap_to_pu[0];
        const Eigen::VectorXcd w = 2.0 * h;  // aligned with the channel
        CHECK(sinr_primary(c2, w, Node::Pu, solo) ==
              doctest::Approx(h.squaredNorm() * w.squaredNorm() /
                              solo.noise_pu_w)
                  .epsilon(1e-12));
    }
}

TEST_CASE("secrecy rate behavior") {
    ScenarioConfig cfg = tiny_config();
    Rng rng(33);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    const int dim = cfg.num_aps * cfg.antennas_per_ap;
    Eigen::VectorXcd w(dim);
    for (int i = 0; i < dim; ++i) w(i) = rng.cnormal(1.0);

    SUBCASE("identical PU and Eve channels give zero secrecy") {
        ChannelSet same = ch;
        same.ap_to_eve = same.ap_to_pu;
        same.bd_to_eve = same.bd_to_pu;
        ScenarioConfig sym = cfg;
        sym.noise_eve_w = sym.noise_pu_w;
        CHECK(secrecy_rate(same, w, sym) == 0.0);
    }

    SUBCASE("rate difference composition") {
        const double rp =
            cfg.bandwidth_hz * std::log2(1.0 + sinr_primary(ch, w, Node::Pu, cfg));
        const double re = cfg.bandwidth_hz *
                          std::log2(1.0 + sinr_primary(ch, w, Node::Eve, cfg));
        CHECK(secrecy_rate(ch, w, cfg) ==
              doctest::Approx(std::max(rp - re, 0.0)).epsilon(1e-12));
    }

    SUBCASE("gamma_e = 0 and gamma_p = 1 give exactly B") {
        // Direct construction: unit SINR at the PU, silent Eve.
        ChannelSet quiet = ch;
        for (auto& h : quiet.ap_to_eve) h.setZero();
        quiet.bd_to_eve.setZero();
        ScenarioConfig unit = cfg;
        unit.reflection_coeff = 0.0;
        // Scale w so |sum h^H w|^2 = noise.
        std::complex<double> acc{0, 0};
        for (int m = 0; m < unit.num_aps; ++m)
            acc += quiet.ap_to_pu[m].dot(w.segment(m * unit.antennas_per_ap,
                                                   unit.antennas_per_ap));
        const Eigen::VectorXcd scaled =
            w * std::sqrt(unit.noise_pu_w / std::norm(acc));
        CHECK(secrecy_rate(quiet, scaled, unit) ==
              doctest::Approx(unit.bandwidth_hz).epsilon(1e-9));
    }
}

TEST_CASE("SINR ratio structure is scale invariant") {
    ScenarioConfig cfg = tiny_config();
    cfg.reflection_coeff = 0.0;
    Rng rng(41);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    const ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    const int dim = cfg.num_aps * cfg.antennas_per_ap;
    Eigen::VectorXcd w(dim);
    for (int i = 0; i < dim; ++i) w(i) = rng.cnormal(1.0);

    const double c = 3.7;
    ScenarioConfig scaled = cfg;
    scaled.noise_pu_w *= c * c;
    scaled.noise_eve_w *= c * c;
    scaled.noise_su_w *= c * c;
    const Eigen::VectorXcd wc = c * w;
    for (Node node : {Node::Pu, Node::Eve, Node::Su})
        CHECK(sinr_primary(ch, w, node, cfg) ==
              doctest::Approx(sinr_primary(ch, wc, node, scaled))
                  .epsilon(1e-12));
}

TEST_CASE("homogeneity of the secondary SNR") {
    const ScenarioConfig cfg = tiny_config();
    Rng rng(43);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    const ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    const int dim = cfg.num_aps * cfg.antennas_per_ap;
    Eigen::VectorXcd w(dim);
    for (int i = 0; i < dim; ++i) w(i) = rng.cnormal(1.0);
    CHECK(snr_secondary(ch, 2.0 * w, cfg) ==
          doctest::Approx(4.0 * snr_secondary(ch, w, cfg)).epsilon(1e-12));

    ScenarioConfig absorbing = cfg;
    absorbing.reflection_coeff = 0.0;
    CHECK(snr_secondary(ch, w, absorbing) == 0.0);
}

TEST_CASE("rate report is internally consistent") {
    const ScenarioConfig cfg = tiny_config();
    Rng rng(47);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    const ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    const int dim = cfg.num_aps * cfg.antennas_per_ap;
    Eigen::VectorXcd w(dim);
    for (int i = 0; i < dim; ++i) w(i) = rng.cnormal(0.5);

    const RateReport r = rate_report(ch, w, cfg);
    CHECK(r.rate_secrecy == doctest::Approx(std::max(r.rate_pu - r.rate_eve, 0.0)));
    CHECK(r.rate_pu ==
          doctest::Approx(cfg.bandwidth_hz * std::log2(1.0 + r.gamma_pu)));
    CHECK(r.rate_secondary ==
          doctest::Approx(ergodic_secondary_rate(r.beta_c, cfg.bandwidth_hz)));
    CHECK(r.gamma_pu >= 0.0);
    CHECK(r.beta_c >= 0.0);
    CHECK(r.rate_secrecy >= 0.0);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "masr/channel.hpp"
#include "masr/matrix_io.hpp"
#include "masr/rng.hpp"
#include "masr/scenario.hpp"

using namespace masr;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent three-term evaluation of the propagation difference.
double propagation_oracle(const Vec3& p, double az, double el) {
    const double a = p.x * std::cos(el) * std::cos(az);
    const double b = p.y * std::cos(el) * std::sin(az);
    const double c = p.z * std::sin(el);
    return a + b + c;
}

// Naive per-entry double sum over paths, written independently of the
// Eigen-based assembly.
std::complex<double> channel_entry_oracle(const LinkGeometry& link,
                                          const Vec3& rx_pos,
                                          const Vec3& tx_pos,
                                          double wavelength) {
    std::complex<double> acc{0.0, 0.0};
    const double k = 2.0 * kPi / wavelength;
    for (std::size_t j = 0; j < link.departure.size(); ++j) {
        const double rx_phase =
            k * propagation_oracle(rx_pos, link.arrival[j].azimuth,
                                   link.arrival[j].elevation);
        const double tx_phase =
            k * propagation_oracle(tx_pos, link.departure[j].azimuth,
                                   link.departure[j].elevation);
        const std::complex<double> rx{std::cos(rx_phase), std::sin(rx_phase)};
        const std::complex<double> tx{std::cos(tx_phase), std::sin(tx_phase)};
        acc += std::conj(rx) * link.path_gain(j) * tx;
    }
    return acc;
}

ScenarioConfig small_config() {
    ScenarioConfig cfg = default_scenario();
    cfg.num_aps = 2;
    cfg.antennas_per_ap = 3;
    cfg.bd_antennas = 2;
    cfg.paths_per_link = 4;
    cfg.ap_centers = uniform_ap_grid(cfg.ap_region_center, cfg.ap_region_size_m,
                                     cfg.num_aps);
    cfg.ma_region_normal.assign(cfg.num_aps, 'y');
    validate(cfg);
    return cfg;
}

MALayout random_layout(const ScenarioConfig& cfg, Rng& rng) {
    MALayout layout;
    layout.positions.resize(cfg.num_aps);
    for (int m = 0; m < cfg.num_aps; ++m)
        for (int i = 0; i < cfg.antennas_per_ap; ++i)
            layout.positions[m].push_back(
                {rng.uniform(-cfg.region_halfwidth_m, cfg.region_halfwidth_m),
                 0.0,
                 rng.uniform(-cfg.region_halfwidth_m, cfg.region_halfwidth_m)});
    return layout;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("propagation difference basics") {
    CHECK(propagation_difference({0, 0, 0}, 0.7, -0.3) == 0.0);
    CHECK(propagation_difference({1, 0, 0}, 0.0, 0.0) == doctest::Approx(1.0));
    const Vec3 p{0.03, 0.01, 0.02};
    CHECK(propagation_difference(p, kPi / 4, kPi / 6) ==
          doctest::Approx(propagation_oracle(p, kPi / 4, kPi / 6))
              .epsilon(1e-15));
}

TEST_CASE("propagation difference matches the oracle on random inputs") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1)};
        const double az = rng.uniform(-kPi / 2, kPi / 2);
        const double el = rng.uniform(-kPi / 2, kPi / 2);
        CHECK(propagation_difference(p, az, el) ==
              doctest::Approx(propagation_oracle(p, az, el)).epsilon(1e-12));
    }
}

TEST_CASE("field response vectors are unit modulus with composed phases") {
    Rng rng(11);
    std::vector<PathAngles> angles(6);
    for (auto& a : angles) {
        a.azimuth = rng.uniform(-kPi / 2, kPi / 2);
        a.elevation = rng.uniform(-kPi / 2, kPi / 2);
    }
    const double lambda = 0.1;

    SUBCASE("origin gives the all-ones vector") {
        const auto v = field_response_vector({0, 0, 0}, angles, lambda);
        for (Eigen::Index j = 0; j < v.size(); ++j)
            CHECK(std::abs(v(j) - std::complex<double>{1.0, 0.0}) < 1e-15);
    }

    SUBCASE("displacement by lambda along a path direction is a full turn") {
        const PathAngles& a0 = angles[0];
        const Vec3 dir{std::cos(a0.elevation) * std::cos(a0.azimuth),
                       std::cos(a0.elevation) * std::sin(a0.azimuth),
                       std::sin(a0.elevation)};
        const auto v = field_response_vector(dir * lambda, angles, lambda);
        CHECK(std::abs(v(0) - std::complex<double>{1.0, 0.0}) < 1e-12);
    }

    SUBCASE("entries compose the propagation difference, modulus one") {
        for (int trial = 0; trial < 50; ++trial) {
            const Vec3 p{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                         rng.uniform(-0.3, 0.3)};
            const auto v = field_response_vector(p, angles, lambda);
            for (std::size_t j = 0; j < angles.size(); ++j) {
                CHECK(std::abs(v(j)) == doctest::Approx(1.0).epsilon(1e-12));
                const double phase =
                    2.0 * kPi / lambda *
                    propagation_oracle(p, angles[j].azimuth,
                                       angles[j].elevation);
                const std::complex<double> expect{std::cos(phase),
                                                  std::sin(phase)};
                CHECK(std::abs(v(j) - expect) < 1e-9);
            }
        }
    }
}

TEST_CASE("sampled geometry matches the declared statistics") {
    ScenarioConfig cfg = small_config();

    SUBCASE("zero reference pathloss zeroes every gain") {
        cfg.pathloss_ref = 0.0;
        Rng rng(3);
        const ChannelGeometry geom = sample_geometry(cfg, rng);
        for (const auto& link : geom.ap_to_bd)
            CHECK(link.path_gain.norm() == 0.0);
        CHECK(geom.bd_to_su.path_gain.norm() == 0.0);
    }

    SUBCASE("empirical gain variance is c0 d^-rho / L within 3%") {
        Rng rng(5);
        const double d = distance(cfg.ap_centers[0], cfg.bd_pos);
        const double expected = cfg.pathloss_ref *
                                std::pow(d, -cfg.pathloss_exponent) /
                                cfg.paths_per_link;
        double acc = 0.0;
        int count = 0;
        for (int rep = 0; rep < 100000 / cfg.paths_per_link; ++rep) {
            const ChannelGeometry geom = sample_geometry(cfg, rng);
            acc += geom.ap_to_bd[0].path_gain.squaredNorm();
            count += cfg.paths_per_link;
        }
        CHECK(acc / count == doctest::Approx(expected).epsilon(0.03));
    }

    SUBCASE("angles pass a KS uniformity test at the 1% level") {
        Rng rng(9);
        std::vector<double> samples;
        while (samples.size() < 8000) {
            const ChannelGeometry geom = sample_geometry(cfg, rng);
            for (const auto& link : geom.ap_to_su) {
                for (const auto& a : link.departure) {
                    samples.push_back(a.azimuth);
                    samples.push_back(a.elevation);
                }
            }
        }
        std::sort(samples.begin(), samples.end());
        double d_stat = 0.0;
        const double n = static_cast<double>(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double cdf = (samples[i] + kPi / 2) / kPi;
            d_stat = std::max(d_stat, std::abs(cdf - (i + 1) / n));
            d_stat = std::max(d_stat, std::abs(cdf - i / n));
        }
        // Asymptotic 1% critical value.
        CHECK(d_stat < 1.628 / std::sqrt(n));
    }
}

TEST_CASE("assembled channels match the naive path-sum oracle") {
    ScenarioConfig cfg = small_config();
    Rng rng(13);
    const auto bd_rx = bd_fpa_positions(cfg.bd_antennas, cfg.wavelength_m);

    for (int rep = 0; rep < 50; ++rep) {
        const ChannelGeometry geom = sample_geometry(cfg, rng);
        const MALayout layout = random_layout(cfg, rng);
        const ChannelSet ch = assemble_channels(geom, layout, cfg);
        for (int m = 0; m < cfg.num_aps; ++m) {
            for (int l = 0; l < cfg.bd_antennas; ++l)
                for (int nn = 0; nn < cfg.antennas_per_ap; ++nn) {
                    const auto expect = channel_entry_oracle(
                        geom.ap_to_bd[m], bd_rx[l], layout.positions[m][nn],
                        cfg.wavelength_m);
                    CHECK(std::abs(ch.ap_to_bd[m](l, nn) - expect) <=
                          1e-9 * std::max(1.0, std::abs(expect)));
                }
            for (int nn = 0; nn < cfg.antennas_per_ap; ++nn) {
                const auto expect = channel_entry_oracle(
                    geom.ap_to_pu[m], Vec3{}, layout.positions[m][nn],
                    cfg.wavelength_m);
                // Stored as h with h^H the row form.
                CHECK(std::abs(std::conj(ch.ap_to_pu[m](nn)) - expect) <=
                      1e-9 * std::max(1.0, std::abs(expect)));
            }
        }
        for (int l = 0; l < cfg.bd_antennas; ++l) {
            const auto expect = channel_entry_oracle(
                geom.bd_to_su, Vec3{}, bd_rx[l], cfg.wavelength_m);
            CHECK(std::abs(std::conj(ch.bd_to_su(l)) - expect) <=
                  1e-9 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("assembly degenerate cases") {
    ScenarioConfig cfg = small_config();

    SUBCASE("zero path gains give zero channels") {
        cfg.pathloss_ref = 0.0;
        Rng rng(17);
        const ChannelGeometry geom = sample_geometry(cfg, rng);
        const ChannelSet ch = assemble_channels(
            geom, fpa_baseline_layout(cfg), cfg);
        CHECK(ch.ap_to_bd[0].norm() == 0.0);
        CHECK(ch.ap_to_pu[0].norm() == 0.0);
        CHECK(ch.bd_to_pu.norm() == 0.0);
    }

    SUBCASE("single unit path, everything at region origins: all-ones matrix") {
        cfg.paths_per_link = 1;
        cfg.bd_antennas = 1;  // the BD ULA center sits at the origin
        Rng rng(19);
        ChannelGeometry geom = sample_geometry(cfg, rng);
        for (auto& link : geom.ap_to_bd) link.path_gain(0) = 1.0;
        MALayout layout;
        layout.positions.assign(
            cfg.num_aps, std::vector<Vec3>(cfg.antennas_per_ap, Vec3{}));
        const ChannelSet ch = assemble_channels(geom, layout, cfg);
        for (int m = 0; m < cfg.num_aps; ++m)
            for (Eigen::Index l = 0; l < ch.ap_to_bd[m].rows(); ++l)
                for (Eigen::Index nn = 0; nn < ch.ap_to_bd[m].cols(); ++nn)
                    CHECK(std::abs(ch.ap_to_bd[m](l, nn) -
                                   std::complex<double>{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("re-assembly is bit-identical and continuous in the layout") {
    const ScenarioConfig cfg = small_config();
    Rng rng(23);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    Rng lrng(29);
    const MALayout layout = random_layout(cfg, lrng);

    const ChannelSet a = assemble_channels(geom, layout, cfg);
    const ChannelSet b = assemble_channels(geom, layout, cfg);
    for (int m = 0; m < cfg.num_aps; ++m) {
        CHECK(a.ap_to_bd[m] == b.ap_to_bd[m]);
        CHECK(a.ap_to_pu[m] == b.ap_to_pu[m]);
    }
    CHECK(a.bd_to_eve == b.bd_to_eve);

    MALayout nudged = layout;
    nudged.positions[0][0].x += 1e-9;
    const ChannelSet c = assemble_channels(geom, nudged, cfg);
    double diff = 0.0;
    for (int m = 0; m < cfg.num_aps; ++m)
        diff += (a.ap_to_bd[m] - c.ap_to_bd[m]).squaredNorm();
    CHECK(std::sqrt(diff) < 1e-6);
}

TEST_CASE("array translation preserves the Frobenius-norm distribution") {
    // Shifting the whole MA array multiplies transmit responses by per-path
    // phases; individual channels change but E||H||_F^2 over path-gain draws
    // does not.
    ScenarioConfig cfg = small_config();
    cfg.region_halfwidth_m = 0.4;
    Rng rng(31);
    MALayout layout;
    layout.positions.assign(cfg.num_aps, {});
    for (int m = 0; m < cfg.num_aps; ++m)
        for (int i = 0; i < cfg.antennas_per_ap; ++i)
            layout.positions[m].push_back({0.04 * i, 0.0, 0.02 * i});
    MALayout shifted = layout;
    for (auto& ap : shifted.positions)
        for (auto& p : ap) p = p + Vec3{0.11, 0.0, 0.07};

    double base_acc = 0.0, shift_acc = 0.0;
    bool any_difference = false;
    for (int rep = 0; rep < 2000; ++rep) {
        const ChannelGeometry geom = sample_geometry(cfg, rng);
        const ChannelSet a = assemble_channels(geom, layout, cfg);
        const ChannelSet s = assemble_channels(geom, shifted, cfg);
        base_acc += a.ap_to_bd[0].squaredNorm();
        shift_acc += s.ap_to_bd[0].squaredNorm();
        if ((a.ap_to_bd[0] - s.ap_to_bd[0]).norm() > 1e-12)
            any_difference = true;
    }
    CHECK(any_difference);
    CHECK(base_acc == doctest::Approx(shift_acc).epsilon(0.03));
}

TEST_CASE("paired geometry draws hash identically") {
    const ScenarioConfig cfg = small_config();
    Rng a = Rng(77).substream(0);
    Rng b = Rng(77).substream(0);
    CHECK(geometry_hash(sample_geometry(cfg, a)) ==
          geometry_hash(sample_geometry(cfg, b)));
    Rng c = Rng(78).substream(0);
    CHECK(geometry_hash(sample_geometry(cfg, c)) !=
          geometry_hash(sample_geometry(cfg, a)));
}

TEST_CASE("channel dump round-trips through the matrix text format") {
    const ScenarioConfig cfg = small_config();
    Rng rng(37);
    const ChannelGeometry geom = sample_geometry(cfg, rng);
    const ChannelSet ch = assemble_channels(geom, fpa_baseline_layout(cfg), cfg);
    std::stringstream ss;
    dump_channels(ss, ch);
    const auto mats = read_matrices(ss);
    REQUIRE(mats.size() == 4 * cfg.num_aps + 3);
    CHECK(mats[0].first == "H_1");
    CHECK(mats[0].second == ch.ap_to_bd[0]);
    CHECK(mats.back().first == "g_su");
    CHECK(mats.back().second == ch.bd_to_su);
}

}  // TEST_SUITE

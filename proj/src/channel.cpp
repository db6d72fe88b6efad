#include "masr/channel.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <ostream>

#include "masr/errors.hpp"
#include "masr/matrix_io.hpp"

namespace masr {

double propagation_difference(const Vec3& pos, double azimuth,
                              double elevation) {
    return pos.x * std::cos(elevation) * std::cos(azimuth) +
           pos.y * std::cos(elevation) * std::sin(azimuth) +
           pos.z * std::sin(elevation);
}

Eigen::VectorXcd field_response_vector(const Vec3& pos,
                                       std::span<const PathAngles> angles,
                                       double wavelength_m) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(angles.size()));
    const double k = 2.0 * std::numbers::pi / wavelength_m;
    for (std::size_t j = 0; j < angles.size(); ++j) {
        const double phase =
            k * propagation_difference(pos, angles[j].azimuth,
                                       angles[j].elevation);
        out(static_cast<Eigen::Index>(j)) = {std::cos(phase), std::sin(phase)};
    }
    return out;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

LinkGeometry sample_link(double distance_m, const ScenarioConfig& cfg,
                         Rng& rng) {
    LinkGeometry link;
    link.distance_m = distance_m;
    const int paths = cfg.paths_per_link;
    link.departure.resize(paths);
    link.arrival.resize(paths);
    for (auto& a : link.departure) {
        a.azimuth = rng.uniform(-kHalfPi, kHalfPi);
        a.elevation = rng.uniform(-kHalfPi, kHalfPi);
    }
    for (auto& a : link.arrival) {
        a.azimuth = rng.uniform(-kHalfPi, kHalfPi);
        a.elevation = rng.uniform(-kHalfPi, kHalfPi);
    }
    const double variance = cfg.pathloss_ref *
                            std::pow(distance_m, -cfg.pathloss_exponent) /
                            paths;
    link.path_gain.resize(paths);
    for (int j = 0; j < paths; ++j) link.path_gain(j) = rng.cnormal(variance);
    return link;
}

// Transmit-side field-response matrix: one column per antenna position.
Eigen::MatrixXcd response_matrix(const std::vector<Vec3>& positions,
                                 std::span<const PathAngles> angles,
                                 double wavelength_m) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(angles.size()),
                         static_cast<Eigen::Index>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) =
            field_response_vector(positions[i], angles, wavelength_m);
    return out;
}

}  // namespace

ChannelGeometry sample_geometry(const ScenarioConfig& cfg, Rng& rng) {
    ChannelGeometry geom;
    geom.ap_to_bd.reserve(cfg.num_aps);
    geom.ap_to_pu.reserve(cfg.num_aps);
    geom.ap_to_eve.reserve(cfg.num_aps);
    geom.ap_to_su.reserve(cfg.num_aps);
    for (int m = 0; m < cfg.num_aps; ++m) {
        const Vec3& ap = cfg.ap_centers[m];
        geom.ap_to_bd.push_back(sample_link(distance(ap, cfg.bd_pos), cfg, rng));
        geom.ap_to_pu.push_back(sample_link(distance(ap, cfg.pu_pos), cfg, rng));
        geom.ap_to_eve.push_back(
            sample_link(distance(ap, cfg.eve_pos), cfg, rng));
        geom.ap_to_su.push_back(sample_link(distance(ap, cfg.su_pos), cfg, rng));
    }
    geom.bd_to_pu = sample_link(distance(cfg.bd_pos, cfg.pu_pos), cfg, rng);
    geom.bd_to_eve = sample_link(distance(cfg.bd_pos, cfg.eve_pos), cfg, rng);
    geom.bd_to_su = sample_link(distance(cfg.bd_pos, cfg.su_pos), cfg, rng);
    return geom;
}

ChannelSet assemble_channels(const ChannelGeometry& geom, const MALayout& layout,
                             const ScenarioConfig& cfg) {
    if (static_cast<int>(layout.positions.size()) != cfg.num_aps)
        throw ConfigError("assemble_channels: layout AP count mismatch");
    for (const auto& ap : layout.positions)
        if (static_cast<int>(ap.size()) != cfg.antennas_per_ap)
            throw ConfigError("assemble_channels: layout antenna count mismatch");

    const std::vector<Vec3> bd_rx =
        bd_fpa_positions(cfg.bd_antennas, cfg.wavelength_m);
    const Vec3 origin{};  // single-FPA nodes sit at their region origin

    ChannelSet ch;
    ch.ap_to_bd.reserve(cfg.num_aps);
    ch.ap_to_pu.reserve(cfg.num_aps);
    ch.ap_to_eve.reserve(cfg.num_aps);
    ch.ap_to_su.reserve(cfg.num_aps);

    const auto direct_link = [&](const LinkGeometry& link,
                                 int m) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd tx =
            response_matrix(layout.positions[m], link.departure,
                            cfg.wavelength_m);
        const Eigen::VectorXcd rx =
            field_response_vector(origin, link.arrival, cfg.wavelength_m);
        // h^H = f^H Sigma K; store h.
        const Eigen::RowVectorXcd row =
            rx.adjoint() * link.path_gain.asDiagonal() * tx;
        return row.adjoint();
    };

    for (int m = 0; m < cfg.num_aps; ++m) {
        const LinkGeometry& bd = geom.ap_to_bd[m];
        const Eigen::MatrixXcd tx =
            response_matrix(layout.positions[m], bd.departure, cfg.wavelength_m);
        const Eigen::MatrixXcd rx =
            response_matrix(bd_rx, bd.arrival, cfg.wavelength_m);
        ch.ap_to_bd.push_back(rx.adjoint() * bd.path_gain.asDiagonal() * tx);
        ch.ap_to_pu.push_back(direct_link(geom.ap_to_pu[m], m));
        ch.ap_to_eve.push_back(direct_link(geom.ap_to_eve[m], m));
        ch.ap_to_su.push_back(direct_link(geom.ap_to_su[m], m));
    }

    const auto backscatter_link =
        [&](const LinkGeometry& link) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd tx =
            response_matrix(bd_rx, link.departure, cfg.wavelength_m);
        const Eigen::VectorXcd rx =
            field_response_vector(origin, link.arrival, cfg.wavelength_m);
        const Eigen::RowVectorXcd row =
            rx.adjoint() * link.path_gain.asDiagonal() * tx;
        return row.adjoint();
    };
    ch.bd_to_pu = backscatter_link(geom.bd_to_pu);
    ch.bd_to_eve = backscatter_link(geom.bd_to_eve);
    ch.bd_to_su = backscatter_link(geom.bd_to_su);
    return ch;
}

void dump_channels(std::ostream& out, const ChannelSet& ch) {
    std::vector<NamedMatrix> ms;
    for (std::size_t m = 0; m < ch.ap_to_bd.size(); ++m) {
        const std::string idx = std::to_string(m + 1);
        ms.emplace_back("H_" + idx, ch.ap_to_bd[m]);
        ms.emplace_back("h_pu_" + idx, ch.ap_to_pu[m]);
        ms.emplace_back("h_eve_" + idx, ch.ap_to_eve[m]);
        ms.emplace_back("h_su_" + idx, ch.ap_to_su[m]);
    }
    ms.emplace_back("g_pu", ch.bd_to_pu);
    ms.emplace_back("g_eve", ch.bd_to_eve);
    ms.emplace_back("g_su", ch.bd_to_su);
    write_matrices(out, ms);
}

namespace {

void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h = mix64(h, bits);
}

void hash_link(std::uint64_t& h, const LinkGeometry& link) {
    hash_double(h, link.distance_m);
    for (const auto& a : link.departure) {
        hash_double(h, a.azimuth);
        hash_double(h, a.elevation);
    }
    for (const auto& a : link.arrival) {
        hash_double(h, a.azimuth);
        hash_double(h, a.elevation);
    }
    for (Eigen::Index j = 0; j < link.path_gain.size(); ++j) {
        hash_double(h, link.path_gain(j).real());
        hash_double(h, link.path_gain(j).imag());
    }
}

}  // namespace

std::uint64_t geometry_hash(const ChannelGeometry& geom) {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (const auto& link : geom.ap_to_bd) hash_link(h, link);
    for (const auto& link : geom.ap_to_pu) hash_link(h, link);
    for (const auto& link : geom.ap_to_eve) hash_link(h, link);
    for (const auto& link : geom.ap_to_su) hash_link(h, link);
    hash_link(h, geom.bd_to_pu);
    hash_link(h, geom.bd_to_eve);
    hash_link(h, geom.bd_to_su);
    return h;
}

}  // namespace masr

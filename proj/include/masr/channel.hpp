#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "masr/rng.hpp"
#include "masr/scenario.hpp"
#include "masr/vec3.hpp"

namespace masr {

/// Azimuth/elevation of one propagation path, radians in [-pi/2, pi/2].
struct PathAngles {
    double azimuth = 0.0;
    double elevation = 0.0;
};

/// One link's multipath description: departure/arrival angle sets and the
/// diagonal of the path-response matrix. Fixed for a channel realization;
/// independent of antenna placement.
struct LinkGeometry {
    std::vector<PathAngles> departure;
    std::vector<PathAngles> arrival;
    Eigen::VectorXcd path_gain;
    double distance_m = 0.0;
};

struct ChannelGeometry {
    std::vector<LinkGeometry> ap_to_bd;   // one per AP
    std::vector<LinkGeometry> ap_to_pu;
    std::vector<LinkGeometry> ap_to_eve;
    std::vector<LinkGeometry> ap_to_su;
    LinkGeometry bd_to_pu;
    LinkGeometry bd_to_eve;
    LinkGeometry bd_to_su;
};

/// Assembled complex channels for one antenna layout.
struct ChannelSet {
    /// AP m -> BD, stored in conjugate-transposed form (L x N).
    std::vector<Eigen::MatrixXcd> ap_to_bd;
    /// AP m -> node direct links (length-N vectors h with h^H w the response).
    std::vector<Eigen::VectorXcd> ap_to_pu;
    std::vector<Eigen::VectorXcd> ap_to_eve;
    std::vector<Eigen::VectorXcd> ap_to_su;
    /// BD -> node links (length-L vectors g).
    Eigen::VectorXcd bd_to_pu;
    Eigen::VectorXcd bd_to_eve;
    Eigen::VectorXcd bd_to_su;
};

/// Propagation difference of `pos` relative to the region origin along the
/// unit direction given by (azimuth, elevation).
double propagation_difference(const Vec3& pos, double azimuth, double elevation);

/// Per-path phase vector exp(j 2 pi rho / lambda); every entry unit modulus.
Eigen::VectorXcd field_response_vector(const Vec3& pos,
                                       std::span<const PathAngles> angles,
                                       double wavelength_m);

/// Draws angles uniform on [-pi/2, pi/2] and path gains CN(0, c0 d^-rho / L).
ChannelGeometry sample_geometry(const ScenarioConfig& cfg, Rng& rng);

/// Builds every link from frozen geometry and the current MA layout. Pure;
/// identical inputs produce bit-identical channels.
ChannelSet assemble_channels(const ChannelGeometry& geom, const MALayout& layout,
                             const ScenarioConfig& cfg);

/// Text dump of all channel matrices for cross-language validation.
void dump_channels(std::ostream& out, const ChannelSet& ch);

/// Hash over the raw geometry payload; used to confirm paired trials share
/// channel realizations.
std::uint64_t geometry_hash(const ChannelGeometry& geom);

}  // namespace masr

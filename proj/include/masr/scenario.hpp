#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "masr/vec3.hpp"

namespace masr {

/// Axis held fixed by an antenna-placement plane ('x', 'y' or 'z'); the two
/// remaining axes are the free in-plane coordinates.
using PlaneNormal = char;

struct SwarmParams {
    int particles = 300;      // Q
    int iterations = 300;     // S
    double penalty = 100.0;   // tau
    double c1 = 1.4;
    double c2 = 1.4;
    double omega_max = 0.9;
    double omega_min = 0.4;
    double p_cs_max = 0.95;
    double p_cs_min = 0.2;
    double p_mt_max = 0.1;
    double p_mt_min = 0.01;

    bool operator==(const SwarmParams&) const = default;
};

struct SolverParams {
    double ao_tol = 0.01;        // epsilon, on secrecy-rate gain in bits/s/Hz
    double sca_tol = 0.01;       // epsilon_2, same units
    double bisect_tol = 1e-6;    // relative, on the secondary-rate residual
    int ao_round_cap = 20;

    bool operator==(const SolverParams&) const = default;
};

/// Full description of one simulation setup. All values are SI (watts,
/// meters, Hz); dBm/dB appear only in the scenario file keys.
struct ScenarioConfig {
    int num_aps = 3;            // M
    int antennas_per_ap = 8;    // N
    int bd_antennas = 4;        // L

    double bandwidth_hz = 100e3;
    double max_power_w = 0.0;   // per AP
    double wavelength_m = 0.1;
    double min_ma_distance_m = 0.05;   // D
    double reflection_coeff = 0.8;     // alpha
    double noise_pu_w = 0.0;
    double noise_eve_w = 0.0;
    double noise_su_w = 0.0;
    double rate_th_primary_bps = 100e3;    // R_th1, decoded at the SU
    double rate_th_secondary_bps = 600e3;  // R_th2

    double region_halfwidth_m = 0.3;       // A/2, per free axis
    std::vector<PlaneNormal> ma_region_normal;  // per AP, default 'y'

    Vec3 ap_region_center{0.0, -50.0, 10.0};
    double ap_region_size_m = 100.0;
    std::vector<Vec3> ap_centers;

    Vec3 bd_pos{-5.0, 5.0, 10.0};
    Vec3 pu_pos{0.0, 10.0, 10.0};
    Vec3 su_pos{5.0, 5.0, 10.0};
    Vec3 eve_pos{1.0, 9.0, 10.0};

    int paths_per_link = 10;          // L-bar
    double pathloss_ref = 0.01;       // c0, linear
    double pathloss_exponent = 1.2;   // rho

    SwarmParams swarm;
    SolverParams solver;
    std::uint64_t rng_seed = 42;

    double region_width_m() const { return 2.0 * region_halfwidth_m; }

    bool operator==(const ScenarioConfig&) const = default;
};

/// Local antenna coordinates per AP, relative to each AP's region origin.
/// The plane-normal axis is always zero.
struct MALayout {
    std::vector<std::vector<Vec3>> positions;  // [ap][antenna]

    bool operator==(const MALayout&) const = default;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Number of points at pairwise spacing >= d that a hexagonal grid packs
/// into a side-a square; used as the constructive capacity bound.
int hex_packing_capacity(double side, double spacing);

/// Deterministic row-major grid of `count` points over a size x size square
/// perpendicular to the z-axis, centered at `center`.
std::vector<Vec3> uniform_ap_grid(const Vec3& center, double size, int count);

/// Throws ConfigError naming the offending field on any invariant violation.
void validate(const ScenarioConfig& cfg);

/// The reference setup: all baseline parameters and node placements.
ScenarioConfig default_scenario();

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(std::istream& in, const std::string& origin);
void serialize_scenario(std::ostream& out, const ScenarioConfig& cfg);
void save_scenario(const std::string& path, const ScenarioConfig& cfg);

/// BD receive array: half-wavelength ULA along local x, centered.
std::vector<Vec3> bd_fpa_positions(int count, double wavelength_m);

/// Fixed-position baseline: centered square grid at half-wavelength spacing,
/// row-major fill, per AP.
MALayout fpa_baseline_layout(const ScenarioConfig& cfg);

/// Smallest pairwise distance within any single AP's array.
double min_intra_ap_distance(const MALayout& layout);

}  // namespace masr

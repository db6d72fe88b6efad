#include "masr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "masr/errors.hpp"

namespace masr {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

int hex_packing_capacity(double side, double spacing) {
    if (side < 0.0 || spacing <= 0.0) return 0;
    const double row_step = spacing * std::sqrt(3.0) / 2.0;
    int total = 0;
    for (int row = 0;; ++row) {
        const double y = row * row_step;
        if (y > side + 1e-12) break;
        const double offset = (row % 2 == 0) ? 0.0 : spacing / 2.0;
        if (offset > side + 1e-12) continue;
        total += static_cast<int>(std::floor((side - offset) / spacing + 1e-12)) + 1;
    }
    return total;
}

std::vector<Vec3> uniform_ap_grid(const Vec3& center, double size, int count) {
    const int rows = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                      static_cast<double>(count)))));
    const int cols = (count + rows - 1) / rows;
    std::vector<Vec3> out;
    out.reserve(count);
    for (int r = 0; r < rows && static_cast<int>(out.size()) < count; ++r) {
        for (int c = 0; c < cols && static_cast<int>(out.size()) < count; ++c) {
            const double x = center.x - size / 2.0 + (c + 0.5) * size / cols;
            const double y = center.y - size / 2.0 + (r + 0.5) * size / rows;
            out.push_back({x, y, center.z});
        }
    }
    return out;
}

namespace {

void require(bool ok, const std::string& field, const std::string& reason) {
    if (!ok) throw ConfigError(field + " " + reason);
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    require(cfg.num_aps >= 1, "num_aps", "must be >= 1");
    require(cfg.antennas_per_ap >= 1, "antennas_per_ap", "must be >= 1");
    require(cfg.bd_antennas >= 1, "bd_antennas", "must be >= 1");
    require(cfg.paths_per_link >= 1, "paths_per_link", "must be >= 1");
    require(cfg.swarm.particles >= 1, "swarm.particles", "must be >= 1");
    require(cfg.swarm.iterations >= 0, "swarm.iterations", "must be >= 0");
    require(cfg.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
    require(cfg.max_power_w > 0.0, "p_max_dbm", "must convert to positive watts");
    require(cfg.wavelength_m > 0.0, "wavelength_m", "must be > 0");
    require(cfg.min_ma_distance_m > 0.0, "min_ma_distance_m", "must be > 0");
    require(cfg.reflection_coeff >= 0.0 && cfg.reflection_coeff <= 1.0,
            "reflection_coeff", "out of [0,1]");
    require(cfg.noise_pu_w > 0.0 && cfg.noise_eve_w > 0.0 && cfg.noise_su_w > 0.0,
            "noise", "must be positive watts");
    require(cfg.rate_th_primary_bps >= 0.0, "rate_threshold_primary_bps",
            "must be >= 0");
    require(cfg.rate_th_secondary_bps >= 0.0, "rate_threshold_secondary_bps",
            "must be >= 0");
    require(cfg.region_halfwidth_m > 0.0, "region_halfwidth_m", "must be > 0");
    require(cfg.pathloss_ref >= 0.0, "pathloss_ref_db", "must be finite");
    require(cfg.pathloss_exponent >= 0.0, "pathloss_exponent", "must be >= 0");
    require(cfg.swarm.omega_min <= cfg.swarm.omega_max, "swarm.omega_min",
            "must be <= omega_max");
    require(cfg.swarm.p_cs_min <= cfg.swarm.p_cs_max, "swarm.p_cs_min",
            "must be <= p_cs_max");
    require(cfg.swarm.p_mt_min <= cfg.swarm.p_mt_max, "swarm.p_mt_min",
            "must be <= p_mt_max");
    require(cfg.swarm.penalty > 0.0, "swarm.penalty", "must be > 0");
    require(cfg.solver.ao_round_cap >= 1, "solver.ao_round_cap", "must be >= 1");
    require(cfg.solver.bisect_tol > 0.0, "solver.bisect_tol", "must be > 0");

    require(static_cast<int>(cfg.ap_centers.size()) == cfg.num_aps,
            "ap_centers", "must list one center per AP");
    require(static_cast<int>(cfg.ma_region_normal.size()) == cfg.num_aps,
            "ma_region_normal", "must list one axis per AP");
    for (PlaneNormal n : cfg.ma_region_normal)
        require(n == 'x' || n == 'y' || n == 'z', "ma_region_normal",
                "must be one of x, y, z");
    for (const Vec3& p : cfg.ap_centers)
        require(p.finite(), "ap_centers", "must be finite");
    require(cfg.bd_pos.finite() && cfg.pu_pos.finite() && cfg.su_pos.finite() &&
                cfg.eve_pos.finite(),
            "node positions", "must be finite");

    // The square region must admit N antennas at pairwise spacing D.
    const int capacity =
        hex_packing_capacity(cfg.region_width_m(), cfg.min_ma_distance_m);
    require(cfg.antennas_per_ap <= capacity, "min_ma_distance_m",
            "spacing does not admit " + std::to_string(cfg.antennas_per_ap) +
                " antennas in the movable region (capacity " +
                std::to_string(capacity) + ")");
}

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.max_power_w = dbm_to_watt(35.0);
    cfg.noise_pu_w = dbm_to_watt(-40.0);
    cfg.noise_eve_w = dbm_to_watt(-40.0);
    cfg.noise_su_w = dbm_to_watt(-40.0);
    cfg.pathloss_ref = db_to_linear(-20.0);
    cfg.ap_centers =
        uniform_ap_grid(cfg.ap_region_center, cfg.ap_region_size_m, cfg.num_aps);
    cfg.ma_region_normal.assign(cfg.num_aps, 'y');
    cfg.rng_seed = 42;
    validate(cfg);
    return cfg;
}

namespace {

using Section = std::map<std::string, std::string>;
using IniData = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

IniData parse_ini(std::istream& in, const std::string& origin) {
    IniData data;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw IoError(origin + ":" + std::to_string(lineno) +
                              ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            data[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(origin + ":" + std::to_string(lineno) +
                          ": expected key = value");
        data[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return data;
}

class IniReader {
  public:
    IniReader(IniData data, std::string origin)
        : data_(std::move(data)), origin_(std::move(origin)) {}

    double number(const std::string& sec, const std::string& key) {
        const std::string raw = fetch(sec, key);
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw IoError(origin_ + ": " + sec + "." + key +
                          ": not a number: '" + raw + "'");
        }
    }

    int integer(const std::string& sec, const std::string& key) {
        const double v = number(sec, key);
        const int i = static_cast<int>(std::llround(v));
        if (std::abs(v - i) > 1e-9)
            throw IoError(origin_ + ": " + sec + "." + key + ": not an integer");
        return i;
    }

    std::uint64_t unsigned64(const std::string& sec, const std::string& key) {
        const std::string raw = fetch(sec, key);
        try {
            return std::stoull(raw);
        } catch (const std::exception&) {
            throw IoError(origin_ + ": " + sec + "." + key +
                          ": not an unsigned integer: '" + raw + "'");
        }
    }

    Vec3 vec3(const std::string& sec, const std::string& key) {
        const std::string raw = fetch(sec, key);
        std::istringstream ss(raw);
        Vec3 v;
        if (!(ss >> v.x >> v.y >> v.z))
            throw IoError(origin_ + ": " + sec + "." + key +
                          ": expected three numbers");
        return v;
    }

    std::string text(const std::string& sec, const std::string& key) {
        return fetch(sec, key);
    }

    bool has(const std::string& sec, const std::string& key) const {
        const auto it = data_.find(sec);
        return it != data_.end() && it->second.count(key) > 0;
    }

  private:
    std::string fetch(const std::string& sec, const std::string& key) {
        const auto it = data_.find(sec);
        if (it == data_.end() || it->second.find(key) == it->second.end())
            throw IoError(origin_ + ": missing key " + sec + "." + key);
        return it->second.at(key);
    }

    IniData data_;
    std::string origin_;
};

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& origin) {
    IniReader r(parse_ini(in, origin), origin);
    ScenarioConfig cfg;

    cfg.num_aps = r.integer("system", "num_aps");
    cfg.antennas_per_ap = r.integer("system", "antennas_per_ap");
    cfg.bd_antennas = r.integer("system", "bd_antennas");
    cfg.bandwidth_hz = r.number("system", "bandwidth_hz");
    cfg.max_power_w = dbm_to_watt(r.number("system", "p_max_dbm"));
    cfg.wavelength_m = r.number("system", "wavelength_m");
    cfg.min_ma_distance_m = r.number("system", "min_ma_distance_m");
    cfg.reflection_coeff = r.number("system", "reflection_coeff");
    cfg.noise_pu_w = dbm_to_watt(r.number("system", "noise_pu_dbm"));
    cfg.noise_eve_w = dbm_to_watt(r.number("system", "noise_eve_dbm"));
    cfg.noise_su_w = dbm_to_watt(r.number("system", "noise_su_dbm"));
    cfg.rate_th_primary_bps = r.number("system", "rate_threshold_primary_bps");
    cfg.rate_th_secondary_bps = r.number("system", "rate_threshold_secondary_bps");
    cfg.region_halfwidth_m = r.number("system", "region_halfwidth_m");

    cfg.ap_region_center = r.vec3("geometry", "ap_region_center");
    cfg.ap_region_size_m = r.number("geometry", "ap_region_size_m");
    cfg.bd_pos = r.vec3("geometry", "bd_pos");
    cfg.pu_pos = r.vec3("geometry", "pu_pos");
    cfg.su_pos = r.vec3("geometry", "su_pos");
    cfg.eve_pos = r.vec3("geometry", "eve_pos");

    if (r.has("geometry", "ap_center_1")) {
        for (int m = 1; m <= cfg.num_aps; ++m)
            cfg.ap_centers.push_back(
                r.vec3("geometry", "ap_center_" + std::to_string(m)));
    } else {
        cfg.ap_centers = uniform_ap_grid(cfg.ap_region_center,
                                         cfg.ap_region_size_m, cfg.num_aps);
    }

    const std::string normal = r.has("geometry", "ma_region_normal")
                                   ? r.text("geometry", "ma_region_normal")
                                   : "y";
    if (normal.size() != 1)
        throw IoError(origin + ": geometry.ma_region_normal: expected one axis");
    cfg.ma_region_normal.assign(cfg.num_aps, normal[0]);

    cfg.paths_per_link = r.integer("pathloss", "paths_per_link");
    cfg.pathloss_ref = db_to_linear(r.number("pathloss", "pathloss_ref_db"));
    cfg.pathloss_exponent = r.number("pathloss", "pathloss_exponent");

    cfg.swarm.particles = r.integer("swarm", "particles");
    cfg.swarm.iterations = r.integer("swarm", "iterations");
    cfg.swarm.penalty = r.number("swarm", "penalty");
    cfg.swarm.c1 = r.number("swarm", "c1");
    cfg.swarm.c2 = r.number("swarm", "c2");
    cfg.swarm.omega_max = r.number("swarm", "omega_max");
    cfg.swarm.omega_min = r.number("swarm", "omega_min");
    cfg.swarm.p_cs_max = r.number("swarm", "p_cs_max");
    cfg.swarm.p_cs_min = r.number("swarm", "p_cs_min");
    cfg.swarm.p_mt_max = r.number("swarm", "p_mt_max");
    cfg.swarm.p_mt_min = r.number("swarm", "p_mt_min");

    cfg.solver.ao_tol = r.number("solver", "ao_tol");
    cfg.solver.sca_tol = r.number("solver", "sca_tol");
    cfg.solver.bisect_tol = r.number("solver", "bisect_tol");
    cfg.solver.ao_round_cap = r.integer("solver", "ao_round_cap");

    cfg.rng_seed = r.unsigned64("rng", "seed");

    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

namespace {

std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

std::string vec(const Vec3& v) {
    return num(v.x) + " " + num(v.y) + " " + num(v.z);
}

}  // namespace

void serialize_scenario(std::ostream& out, const ScenarioConfig& cfg) {
    out << "[system]\n";
    out << "num_aps = " << cfg.num_aps << "\n";
    out << "antennas_per_ap = " << cfg.antennas_per_ap << "\n";
    out << "bd_antennas = " << cfg.bd_antennas << "\n";
    out << "bandwidth_hz = " << num(cfg.bandwidth_hz) << "\n";
    out << "p_max_dbm = " << num(watt_to_dbm(cfg.max_power_w)) << "\n";
    out << "wavelength_m = " << num(cfg.wavelength_m) << "\n";
    out << "min_ma_distance_m = " << num(cfg.min_ma_distance_m) << "\n";
    out << "reflection_coeff = " << num(cfg.reflection_coeff) << "\n";
    out << "noise_pu_dbm = " << num(watt_to_dbm(cfg.noise_pu_w)) << "\n";
    out << "noise_eve_dbm = " << num(watt_to_dbm(cfg.noise_eve_w)) << "\n";
    out << "noise_su_dbm = " << num(watt_to_dbm(cfg.noise_su_w)) << "\n";
    out << "rate_threshold_primary_bps = " << num(cfg.rate_th_primary_bps) << "\n";
    out << "rate_threshold_secondary_bps = " << num(cfg.rate_th_secondary_bps)
        << "\n";
    out << "region_halfwidth_m = " << num(cfg.region_halfwidth_m) << "\n";
    out << "\n[geometry]\n";
    out << "ap_region_center = " << vec(cfg.ap_region_center) << "\n";
    out << "ap_region_size_m = " << num(cfg.ap_region_size_m) << "\n";
    for (std::size_t m = 0; m < cfg.ap_centers.size(); ++m)
        out << "ap_center_" << (m + 1) << " = " << vec(cfg.ap_centers[m]) << "\n";
    out << "ma_region_normal = " << cfg.ma_region_normal.front() << "\n";
    out << "bd_pos = " << vec(cfg.bd_pos) << "\n";
    out << "pu_pos = " << vec(cfg.pu_pos) << "\n";
    out << "su_pos = " << vec(cfg.su_pos) << "\n";
    out << "eve_pos = " << vec(cfg.eve_pos) << "\n";
    out << "\n[pathloss]\n";
    out << "paths_per_link = " << cfg.paths_per_link << "\n";
    out << "pathloss_ref_db = " << num(linear_to_db(cfg.pathloss_ref)) << "\n";
    out << "pathloss_exponent = " << num(cfg.pathloss_exponent) << "\n";
    out << "\n[swarm]\n";
    out << "particles = " << cfg.swarm.particles << "\n";
    out << "iterations = " << cfg.swarm.iterations << "\n";
    out << "penalty = " << num(cfg.swarm.penalty) << "\n";
    out << "c1 = " << num(cfg.swarm.c1) << "\n";
    out << "c2 = " << num(cfg.swarm.c2) << "\n";
    out << "omega_max = " << num(cfg.swarm.omega_max) << "\n";
    out << "omega_min = " << num(cfg.swarm.omega_min) << "\n";
    out << "p_cs_max = " << num(cfg.swarm.p_cs_max) << "\n";
    out << "p_cs_min = " << num(cfg.swarm.p_cs_min) << "\n";
    out << "p_mt_max = " << num(cfg.swarm.p_mt_max) << "\n";
    out << "p_mt_min = " << num(cfg.swarm.p_mt_min) << "\n";
    out << "\n[solver]\n";
    out << "ao_tol = " << num(cfg.solver.ao_tol) << "\n";
    out << "sca_tol = " << num(cfg.solver.sca_tol) << "\n";
    out << "bisect_tol = " << num(cfg.solver.bisect_tol) << "\n";
    out << "ao_round_cap = " << cfg.solver.ao_round_cap << "\n";
    out << "\n[rng]\n";
    out << "seed = " << cfg.rng_seed << "\n";
}

void save_scenario(const std::string& path, const ScenarioConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario file: " + path);
    serialize_scenario(out, cfg);
}

std::vector<Vec3> bd_fpa_positions(int count, double wavelength_m) {
    std::vector<Vec3> out;
    out.reserve(count);
    const double spacing = wavelength_m / 2.0;
    for (int l = 0; l < count; ++l)
        out.push_back({(l - (count - 1) / 2.0) * spacing, 0.0, 0.0});
    return out;
}

namespace {

// Maps in-plane (u, v) coordinates to a Vec3 with the normal axis zeroed.
Vec3 in_plane(PlaneNormal normal, double u, double v) {
    switch (normal) {
        case 'x': return {0.0, u, v};
        case 'y': return {u, 0.0, v};
        default: return {u, v, 0.0};
    }
}

}  // namespace

MALayout fpa_baseline_layout(const ScenarioConfig& cfg) {
    const int n = cfg.antennas_per_ap;
    const int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const double spacing =
        std::max(cfg.wavelength_m / 2.0, cfg.min_ma_distance_m);
    if ((k - 1) * spacing > cfg.region_width_m() + 1e-12)
        throw ConfigError("fpa_baseline_layout: " + std::to_string(n) +
                          " antennas at grid spacing " + std::to_string(spacing) +
                          " m do not fit the movable region");
    MALayout layout;
    layout.positions.resize(cfg.num_aps);
    for (int m = 0; m < cfg.num_aps; ++m) {
        auto& aps = layout.positions[m];
        aps.reserve(n);
        for (int r = 0; r < k && static_cast<int>(aps.size()) < n; ++r) {
            for (int c = 0; c < k && static_cast<int>(aps.size()) < n; ++c) {
                const double u = (c - (k - 1) / 2.0) * spacing;
                const double v = (r - (k - 1) / 2.0) * spacing;
                aps.push_back(in_plane(cfg.ma_region_normal[m], u, v));
            }
        }
    }
    return layout;
}

double min_intra_ap_distance(const MALayout& layout) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ap : layout.positions)
        for (std::size_t i = 0; i < ap.size(); ++i)
            for (std::size_t j = i + 1; j < ap.size(); ++j)
                best = std::min(best, distance(ap[i], ap[j]));
    return best;
}

}  // namespace masr

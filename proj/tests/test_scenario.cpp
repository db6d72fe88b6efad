#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "masr/errors.hpp"
#include "masr/scenario.hpp"

using namespace masr;

namespace {

std::string default_scenario_path() {
    return std::string(MASR_SOURCE_DIR) + "/data/default.scenario";
}

// Brute-force packing oracle: greedy hexagonal fill, counting points placed.
int hex_count_oracle(double side, double spacing) {
    int total = 0;
    const double dy = spacing * std::sqrt(3.0) / 2.0;
    for (int row = 0; row * dy <= side + 1e-12; ++row) {
        const double x0 = (row % 2 == 0) ? 0.0 : spacing / 2.0;
        for (int col = 0; x0 + col * spacing <= side + 1e-12; ++col) ++total;
    }
    return total;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("unit conversions invert each other") {
    for (double dbm : {-40.0, 0.0, 20.0, 35.0}) {
        CHECK(watt_to_dbm(dbm_to_watt(dbm)) ==
              doctest::Approx(dbm).epsilon(1e-12));
    }
    for (double w : {1e-7, 0.5, 3.1622776601683795}) {
        CHECK(dbm_to_watt(watt_to_dbm(w)) == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(db_to_linear(-20.0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(linear_to_db(db_to_linear(-3.0)) ==
          doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("default scenario matches the reference setup") {
    const ScenarioConfig cfg = default_scenario();
    CHECK(cfg.num_aps == 3);
    CHECK(cfg.antennas_per_ap == 8);
    CHECK(cfg.bd_antennas == 4);
    CHECK(cfg.max_power_w == doctest::Approx(std::pow(10.0, 0.5)).epsilon(1e-12));
    CHECK(cfg.pu_pos == Vec3{0.0, 10.0, 10.0});
    CHECK(cfg.bd_pos == Vec3{-5.0, 5.0, 10.0});
    CHECK(cfg.su_pos == Vec3{5.0, 5.0, 10.0});
    CHECK(cfg.eve_pos == Vec3{1.0, 9.0, 10.0});
    CHECK(cfg.solver.ao_tol == doctest::Approx(0.01));
    CHECK(cfg.solver.sca_tol == doctest::Approx(0.01));
    CHECK(cfg.region_width_m() == doctest::Approx(0.6));  // A = 6 lambda
    CHECK(cfg.swarm.particles == 300);
    CHECK(cfg.swarm.penalty == doctest::Approx(100.0));
    // APs on the uniform grid inside the 100 m square centered (0,-50,10).
    REQUIRE(cfg.ap_centers.size() == 3);
    for (const Vec3& c : cfg.ap_centers) {
        CHECK(std::abs(c.x) <= 50.0);
        CHECK(c.y >= -100.0);
        CHECK(c.y <= 0.0);
        CHECK(c.z == doctest::Approx(10.0));
    }
}

TEST_CASE("shipped scenario file reproduces the default scenario") {
    const ScenarioConfig cfg = load_scenario(default_scenario_path());
    CHECK(cfg == default_scenario());
}

TEST_CASE("serialize then parse is the identity") {
    ScenarioConfig cfg = default_scenario();
    cfg.rng_seed = 777;
    cfg.reflection_coeff = 0.37;
    cfg.pathloss_exponent = 1.35;
    std::stringstream round;
    serialize_scenario(round, cfg);
    const ScenarioConfig again = parse_scenario(round, "roundtrip");
    CHECK(again == cfg);
}

TEST_CASE("invariant violations name the field") {
    ScenarioConfig cfg = default_scenario();
    cfg.reflection_coeff = 1.2;
    CHECK_THROWS_WITH_AS(validate(cfg), "reflection_coeff out of [0,1]",
                         ConfigError);

    cfg = default_scenario();
    cfg.min_ma_distance_m = 0.4;  // 8 antennas cannot fit at 0.4 m spacing
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = default_scenario();
    cfg.swarm.omega_min = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("hex packing capacity matches the constructive oracle") {
    for (const auto& [side, spacing] : std::initializer_list<
             std::pair<double, double>>{{0.6, 0.05}, {0.6, 0.4}, {0.1, 0.05},
                                        {1.0, 0.3}, {0.0, 0.1}}) {
        CHECK(hex_packing_capacity(side, spacing) ==
              hex_count_oracle(side, spacing));
    }
    CHECK(hex_packing_capacity(0.6, 0.4) < 8);   // infeasible default-region case
    CHECK(hex_packing_capacity(0.6, 0.05) >= 8); // feasible reference case
}

TEST_CASE("bd array is a centered half-wavelength ULA") {
    SUBCASE("single antenna sits at the origin") {
        const auto pts = bd_fpa_positions(1, 0.1);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0] == Vec3{0.0, 0.0, 0.0});
    }
    SUBCASE("four antennas, lambda = 0.1") {
        const auto pts = bd_fpa_positions(4, 0.1);
        REQUIRE(pts.size() == 4);
        const double expect[] = {-0.075, -0.025, 0.025, 0.075};
        for (int i = 0; i < 4; ++i) {
            CHECK(pts[i].x == doctest::Approx(expect[i]).epsilon(1e-15));
            CHECK(pts[i].y == 0.0);
            CHECK(pts[i].z == 0.0);
        }
        for (int i = 0; i + 1 < 4; ++i)
            CHECK(pts[i + 1].x - pts[i].x == doctest::Approx(0.05));
    }
}

TEST_CASE("fpa baseline layout is a centered half-wavelength grid") {
    ScenarioConfig cfg = default_scenario();

    SUBCASE("n=4 gives a 2x2 grid at 0.05 m spacing") {
        cfg.antennas_per_ap = 4;
        validate(cfg);
        const MALayout layout = fpa_baseline_layout(cfg);
        REQUIRE(layout.positions[0].size() == 4);
        CHECK(min_intra_ap_distance(layout) == doctest::Approx(0.05));
        for (const Vec3& p : layout.positions[0]) {
            CHECK(std::abs(p.x) == doctest::Approx(0.025));
            CHECK(p.y == 0.0);
            CHECK(std::abs(p.z) == doctest::Approx(0.025));
        }
    }

    SUBCASE("n=8 fills a 3x3 grid row-major, one corner vacant") {
        const MALayout layout = fpa_baseline_layout(cfg);
        REQUIRE(layout.positions[0].size() == 8);
        // Row-major fill: first row complete, last row misses its final slot.
        const auto& pts = layout.positions[0];
        CHECK(pts[0].x == doctest::Approx(-0.05));
        CHECK(pts[0].z == doctest::Approx(-0.05));
        CHECK(pts[1].x == doctest::Approx(0.0));
        CHECK(pts[1].z == doctest::Approx(-0.05));
        CHECK(pts[7].x == doctest::Approx(0.0));
        CHECK(pts[7].z == doctest::Approx(0.05));
    }

    SUBCASE("always satisfies the minimum-distance constraint") {
        for (int n : {2, 3, 5, 8, 9}) {
            cfg.antennas_per_ap = n;
            validate(cfg);
            const MALayout layout = fpa_baseline_layout(cfg);
            CHECK(min_intra_ap_distance(layout) >=
                  cfg.min_ma_distance_m - 1e-12);
        }
    }
}

TEST_CASE("uniform ap grid is deterministic and row-major") {
    const auto three = uniform_ap_grid({0.0, -50.0, 10.0}, 100.0, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0].x < three[1].x);
    CHECK(three[1].x < three[2].x);
    CHECK(three[1].x == doctest::Approx(0.0));
    const auto four = uniform_ap_grid({0.0, -50.0, 10.0}, 100.0, 4);
    REQUIRE(four.size() == 4);
    CHECK(four[0].y == doctest::Approx(-75.0));
    CHECK(four[3].y == doctest::Approx(-25.0));
}

}  // TEST_SUITE

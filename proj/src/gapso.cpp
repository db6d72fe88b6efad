#include "masr/gapso.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "masr/errors.hpp"
#include "masr/rates.hpp"

namespace masr {

int violation_set_size(const MALayout& layout, double min_distance) {
    int count = 0;
    for (const auto& ap : layout.positions)
        for (std::size_t i = 0; i < ap.size(); ++i)
            for (std::size_t j = i + 1; j < ap.size(); ++j)
                if (distance(ap[i], ap[j]) < min_distance) ++count;
    return count;
}

double fitness(const MALayout& layout, const FitnessContext& ctx) {
    const ScenarioConfig& cfg = *ctx.cfg;
    const ChannelSet ch = assemble_channels(*ctx.geometry, layout, cfg);
    const double rate_pu =
        std::log2(1.0 + sinr_primary(ch, ctx.beamformer, Node::Pu, cfg));
    const double rate_eve =
        std::log2(1.0 + sinr_primary(ch, ctx.beamformer, Node::Eve, cfg));
    const double secrecy = std::max(rate_pu - rate_eve, 0.0);

    double value = secrecy;
    value -= cfg.swarm.penalty *
             violation_set_size(layout, cfg.min_ma_distance_m);

    // Secondary-QoS penalty so the swarm cannot settle on a layout the frozen
    // beamformer cannot serve.
    const double beta = snr_secondary(ch, ctx.beamformer, cfg);
    bool qos = beta + 1e-9 * std::max(ctx.beta_star, 1.0) >= ctx.beta_star;
    const double gamma1 = primary_qos_threshold(cfg);
    if (qos && gamma1 > 0.0) {
        const double gamma_su =
            sinr_primary(ch, ctx.beamformer, Node::Su, cfg);
        qos = gamma_su + 1e-9 * std::max(gamma1, 1.0) >= gamma1;
    }
    if (!qos) value -= cfg.swarm.penalty;
    return value;
}

double inertia(int iteration, int total, double omega_max, double omega_min) {
    if (total == 0) return omega_max;
    return omega_max -
           (omega_max - omega_min) * static_cast<double>(iteration) / total;
}

std::pair<double, double> operator_schedules(int iteration, int total,
                                             const SwarmParams& swarm) {
    const double frac =
        total == 0 ? 0.0 : static_cast<double>(iteration) / total;
    return {swarm.p_cs_max - (swarm.p_cs_max - swarm.p_cs_min) * frac,
            swarm.p_mt_max - (swarm.p_mt_max - swarm.p_mt_min) * frac};
}

namespace {

MALayout zero_like(const ScenarioConfig& cfg) {
    MALayout l;
    l.positions.assign(cfg.num_aps,
                       std::vector<Vec3>(cfg.antennas_per_ap, Vec3{}));
    return l;
}

void axpy(MALayout& dst, double a, const MALayout& x) {
    for (std::size_t m = 0; m < dst.positions.size(); ++m)
        for (std::size_t i = 0; i < dst.positions[m].size(); ++i)
            dst.positions[m][i] =
                dst.positions[m][i] + x.positions[m][i] * a;
}

double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

Vec3 clamp_to_plane(const Vec3& p, PlaneNormal normal, double halfwidth) {
    Vec3 out{clamp(p.x, -halfwidth, halfwidth),
             clamp(p.y, -halfwidth, halfwidth),
             clamp(p.z, -halfwidth, halfwidth)};
    switch (normal) {
        case 'x': out.x = 0.0; break;
        case 'y': out.y = 0.0; break;
        default: out.z = 0.0; break;
    }
    return out;
}

Vec3 in_plane(PlaneNormal normal, double u, double v) {
    switch (normal) {
        case 'x': return {0.0, u, v};
        case 'y': return {u, 0.0, v};
        default: return {u, v, 0.0};
    }
}

}  // namespace

MALayout clamp_layout(const MALayout& layout, const ScenarioConfig& cfg) {
    MALayout out = layout;
    for (int m = 0; m < cfg.num_aps; ++m)
        for (auto& p : out.positions[m])
            p = clamp_to_plane(p, cfg.ma_region_normal[m],
                               cfg.region_halfwidth_m);
    return out;
}

MALayout update_velocity(const Particle& p, const MALayout& gbest, double omega,
                         double c1, double c2, Rng& rng) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    MALayout v = p.velocity;
    for (auto& ap : v.positions)
        for (auto& coord : ap) coord = coord * omega;
    axpy(v, c1 * r1, p.pbest);
    axpy(v, -c1 * r1, p.position);
    axpy(v, c2 * r2, gbest);
    axpy(v, -c2 * r2, p.position);
    return v;
}

MALayout update_position(const MALayout& position, const MALayout& velocity,
                         const ScenarioConfig& cfg) {
    MALayout out = position;
    axpy(out, 1.0, velocity);
    return clamp_layout(out, cfg);
}

std::pair<MALayout, MALayout> crossover(const MALayout& a, const MALayout& b,
                                        Rng& rng) {
    const double r3 = rng.uniform();
    MALayout child_a = a;
    MALayout child_b = b;
    for (std::size_t m = 0; m < a.positions.size(); ++m)
        for (std::size_t i = 0; i < a.positions[m].size(); ++i) {
            const Vec3& pa = a.positions[m][i];
            const Vec3& pb = b.positions[m][i];
            child_a.positions[m][i] = pa * r3 + pb * (1.0 - r3);
            child_b.positions[m][i] = pa * (1.0 - r3) + pb * r3;
        }
    return {std::move(child_a), std::move(child_b)};
}

MALayout mutate(const MALayout& layout, const ScenarioConfig& cfg, Rng& rng) {
    MALayout out = layout;
    const int m = static_cast<int>(rng.below(cfg.num_aps));
    const int i = static_cast<int>(rng.below(cfg.antennas_per_ap));
    Vec3& p = out.positions[m][i];
    p = {p.x + rng.normal(), p.y + rng.normal(), p.z + rng.normal()};
    p = clamp_to_plane(p, cfg.ma_region_normal[m], cfg.region_halfwidth_m);
    return out;
}

namespace {

// C4-feasible random placement for one AP; falls back to the deterministic
// baseline grid after the retry budget.
std::vector<Vec3> sample_ap_positions(const ScenarioConfig& cfg, int ap,
                                      const MALayout& fallback, Rng& rng) {
    const double half = cfg.region_halfwidth_m;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<Vec3> pts;
        pts.reserve(cfg.antennas_per_ap);
        for (int i = 0; i < cfg.antennas_per_ap; ++i)
            pts.push_back(in_plane(cfg.ma_region_normal[ap],
                                   rng.uniform(-half, half),
                                   rng.uniform(-half, half)));
        bool ok = true;
        for (std::size_t i = 0; i < pts.size() && ok; ++i)
            for (std::size_t j = i + 1; j < pts.size() && ok; ++j)
                if (distance(pts[i], pts[j]) < cfg.min_ma_distance_m)
                    ok = false;
        if (ok) return pts;
    }
    return fallback.positions[ap];
}

}  // namespace

SwarmResult run_swarm(const FitnessContext& ctx, Rng& rng, SwarmMode mode) {
    const ScenarioConfig& cfg = *ctx.cfg;
    const SwarmParams& sp = cfg.swarm;
    const int population = sp.particles;
    const int total = sp.iterations;
    const double half = cfg.region_halfwidth_m;

    Rng movement = rng.substream(0);
    Rng genetic = rng.substream(1);
    Rng init = rng.substream(2);

    const MALayout grid = fpa_baseline_layout(cfg);
    std::vector<Particle> particles(population);
    for (auto& p : particles) {
        p.position.positions.resize(cfg.num_aps);
        p.velocity = zero_like(cfg);
        for (int m = 0; m < cfg.num_aps; ++m) {
            p.position.positions[m] = sample_ap_positions(cfg, m, grid, init);
            for (auto& v : p.velocity.positions[m])
                v = in_plane(cfg.ma_region_normal[m],
                             init.uniform(-half / 5.0, half / 5.0),
                             init.uniform(-half / 5.0, half / 5.0));
        }
    }

    for (auto& p : particles) {
        p.current_fitness = fitness(p.position, ctx);
        p.pbest = p.position;
        p.pbest_fitness = p.current_fitness;
    }
    int gbest_index = 0;
    for (int q = 1; q < population; ++q)
        if (particles[q].pbest_fitness > particles[gbest_index].pbest_fitness)
            gbest_index = q;
    MALayout gbest = particles[gbest_index].pbest;
    double gbest_fitness = particles[gbest_index].pbest_fitness;

    SwarmResult result;
    const auto record = [&](int iteration) {
        double mean = 0.0;
        for (const auto& p : particles) mean += p.current_fitness;
        mean /= population;
        result.trace.push_back(
            {iteration, gbest_fitness, mean,
             violation_set_size(gbest, cfg.min_ma_distance_m)});
    };
    record(0);

    for (int s = 1; s <= total; ++s) {
        const double omega =
            inertia(s, total, sp.omega_max, sp.omega_min);
        auto [p_cs, p_mt] = operator_schedules(s, total, sp);
        if (mode == SwarmMode::Pso) {
            p_cs = 0.0;
            p_mt = 0.0;
        }
        const MALayout gbest_snapshot = gbest;

        // Movement and genetic operators (crossover acts on a random
        // disjoint pair, in place).
        for (int q = 0; q < population; ++q) {
            Particle& p = particles[q];
            MALayout v = update_velocity(p, gbest_snapshot, omega, sp.c1,
                                         sp.c2, movement);
            for (auto& ap : v.positions)
                for (auto& coord : ap)
                    coord = {clamp(coord.x, -half, half),
                             clamp(coord.y, -half, half),
                             clamp(coord.z, -half, half)};
            p.velocity = v;
            p.position = update_position(p.position, p.velocity, cfg);

            if (p_cs >= genetic.uniform() && population >= 2) {
                const int a = static_cast<int>(genetic.below(population));
                int b = static_cast<int>(genetic.below(population - 1));
                if (b >= a) ++b;
                auto [child_a, child_b] =
                    crossover(particles[a].position, particles[b].position,
                              genetic);
                particles[a].position = std::move(child_a);
                particles[b].position = std::move(child_b);
            }
            if (p_mt >= genetic.uniform())
                p.position = mutate(p.position, cfg, genetic);
        }

        // Fitness evaluations are independent given the frozen state.
        for (auto& p : particles) p.current_fitness = fitness(p.position, ctx);

        // Sequential pbest/gbest reduction.
        for (auto& p : particles) {
            if (p.current_fitness > p.pbest_fitness) {
                p.pbest = p.position;
                p.pbest_fitness = p.current_fitness;
            }
            if (p.current_fitness > gbest_fitness) {
                gbest = p.position;
                gbest_fitness = p.current_fitness;
            }
        }
        record(s);
    }

    result.best = gbest;
    result.best_fitness = gbest_fitness;
    return result;
}

void write_swarm_trace(std::ostream& out, const SwarmResult& result) {
    out << "iteration,gbest_fitness,mean_fitness,violations_in_gbest\n";
    out << std::setprecision(17);
    for (const auto& t : result.trace)
        out << t.iteration << "," << t.gbest_fitness << "," << t.mean_fitness
            << "," << t.violations_in_gbest << "\n";
}

}  // namespace masr

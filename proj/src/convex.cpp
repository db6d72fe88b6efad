#include "masr/convex.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "masr/errors.hpp"
#include "masr/matrix_io.hpp"

namespace masr {

namespace {

// Real trace inner product tr(A B) for Hermitian A, B.
double trace_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.cwiseProduct(b.conjugate()).sum().real();
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) {
    return 0.5 * (m + m.adjoint());
}

bool cholesky(const Eigen::MatrixXcd& w, Eigen::LLT<Eigen::MatrixXcd>& llt) {
    llt.compute(w);
    return llt.info() == Eigen::Success;
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    double sum = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        sum += std::log(l(i, i).real());
    return 2.0 * sum;
}

}  // namespace

double ConeProblem::objective(const Eigen::MatrixXcd& w) const {
    double value = constant;
    for (const LogTerm& t : log_terms)
        value += t.coeff * std::log(t.offset + trace_inner(t.matrix, w));
    if (linear.size() > 0) value += trace_inner(linear, w);
    return value;
}

double ConeProblem::slack(const AffineConstraint& c,
                          const Eigen::MatrixXcd& w) const {
    const double t = trace_inner(c.matrix, w);
    return c.sense == Sense::Geq ? t - c.bound : c.bound - t;
}

double ConeProblem::min_slack(const Eigen::MatrixXcd& w) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints) best = std::min(best, slack(c, w));
    return best;
}

void ConeProblem::dump(std::ostream& out) const {
    Eigen::MatrixXcd scalar(1, 1);
    std::vector<NamedMatrix> ms;
    scalar(0, 0) = static_cast<double>(dim);
    ms.emplace_back("dim", scalar);
    scalar(0, 0) = static_cast<double>(block_size);
    ms.emplace_back("block_size", scalar);
    scalar(0, 0) = constant;
    ms.emplace_back("constant", scalar);
    if (linear.size() > 0) ms.emplace_back("C", linear);
    for (std::size_t i = 0; i < log_terms.size(); ++i) {
        const std::string idx = std::to_string(i + 1);
        scalar(0, 0) = log_terms[i].coeff;
        ms.emplace_back("log_coeff_" + idx, scalar);
        scalar(0, 0) = log_terms[i].offset;
        ms.emplace_back("log_offset_" + idx, scalar);
        ms.emplace_back("log_matrix_" + idx, log_terms[i].matrix);
    }
    for (std::size_t j = 0; j < constraints.size(); ++j) {
        const std::string idx = std::to_string(j + 1);
        scalar(0, 0) = constraints[j].bound;
        ms.emplace_back("con_bound_" + idx, scalar);
        scalar(0, 0) = constraints[j].sense == Sense::Geq ? 1.0 : -1.0;
        ms.emplace_back("con_sense_" + idx, scalar);
        ms.emplace_back("con_matrix_" + idx, constraints[j].matrix);
    }
    write_matrices(out, ms);
}

namespace {

// Barrier for one mu stage:
//   minimize -objective(W) - mu log det W - mu sum_j log slack_j(W)
// Newton directions are computed with Sherman-Morrison-Woodbury against the
// log-det Hessian mu W^-1 (.) W^-1, whose inverse applies W (.) W / mu; the
// remaining curvature (log terms and constraint barriers) is a handful of
// rank-one factors. Cost per step is a few dense n^3 products.
class BarrierSolver {
  public:
    BarrierSolver(const ConeProblem& prob) : prob_(prob) {}

    double phi(const Eigen::MatrixXcd& w, double mu, bool* ok) const {
        *ok = false;
        Eigen::LLT<Eigen::MatrixXcd> llt;
        if (!cholesky(w, llt)) return 0.0;
        double value = -prob_.objective(w) - mu * log_det_from_llt(llt);
        for (const auto& c : prob_.constraints) {
            const double s = prob_.slack(c, w);
            if (s <= 0.0) return 0.0;
            value -= mu * std::log(s);
        }
        *ok = true;
        return value;
    }

    // One centering run; returns Newton steps taken, updates w in place.
    int center(Eigen::MatrixXcd& w, double mu, int max_steps) const {
        const Eigen::Index n = w.rows();
        Eigen::LLT<Eigen::MatrixXcd> llt;
        for (int step = 0; step < max_steps; ++step) {
            if (!cholesky(w, llt)) return step;  // should not happen
            const Eigen::MatrixXcd identity =
                Eigen::MatrixXcd::Identity(n, n);
            const Eigen::MatrixXcd winv = llt.solve(identity);

            // Gradient of phi and the rank-one curvature factors.
            Eigen::MatrixXcd grad = -mu * winv;
            if (prob_.linear.size() > 0) grad -= prob_.linear;
            std::vector<const Eigen::MatrixXcd*> factors;
            std::vector<double> weights;
            for (const auto& t : prob_.log_terms) {
                const double d = t.offset + trace_inner(t.matrix, w);
                grad -= (t.coeff / d) * t.matrix;
                factors.push_back(&t.matrix);
                weights.push_back(t.coeff / (d * d));
            }
            for (const auto& c : prob_.constraints) {
                const double s = prob_.slack(c, w);
                const double sign = c.sense == Sense::Geq ? 1.0 : -1.0;
                grad -= (mu * sign / s) * c.matrix;
                factors.push_back(&c.matrix);
                weights.push_back(mu / (s * s));
            }

            const Eigen::MatrixXcd rhs = -grad;
            const auto apply_pinv = [&](const Eigen::MatrixXcd& x) {
                return Eigen::MatrixXcd((w * x * w) / mu);
            };
            const Eigen::MatrixXcd r0 = apply_pinv(rhs);

            Eigen::MatrixXcd delta;
            const int m = static_cast<int>(factors.size());
            if (m == 0) {
                delta = r0;
            } else {
                std::vector<Eigen::MatrixXcd> v;
                v.reserve(m);
                for (int k = 0; k < m; ++k) v.push_back(apply_pinv(*factors[k]));
                Eigen::MatrixXd gram(m, m);
                Eigen::VectorXd small_rhs(m);
                for (int k = 0; k < m; ++k) {
                    small_rhs(k) = trace_inner(*factors[k], r0);
                    for (int l = 0; l < m; ++l)
                        gram(k, l) = trace_inner(*factors[k], v[l]);
                }
                Eigen::MatrixXd system = gram;
                for (int k = 0; k < m; ++k) system(k, k) += 1.0 / weights[k];
                const Eigen::VectorXd beta = system.ldlt().solve(small_rhs);
                delta = r0;
                for (int k = 0; k < m; ++k) delta -= beta(k) * v[k];
            }
            delta = hermitian_part(delta);

            const double decrement = trace_inner(rhs, delta);
            if (!(decrement > 2e-11)) return step;

            // Backtracking line search; keeps the PSD cone and all slacks.
            bool ok = false;
            const double phi0 = phi(w, mu, &ok);
            if (!ok) return step;
            const double directional = -decrement;
            double t = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                const Eigen::MatrixXcd cand = w + t * delta;
                bool cand_ok = false;
                const double phi1 = phi(cand, mu, &cand_ok);
                if (cand_ok && phi1 <= phi0 + 0.25 * t * directional) {
                    w = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) return step;
        }
        return max_steps;
    }

  private:
    const ConeProblem& prob_;
};

double barrier_complexity(const ConeProblem& prob) {
    return static_cast<double>(prob.dim + prob.constraints.size());
}

// Linear-objective helper used by phase 1: maximize tr(objective W) over the
// PSD cone intersected with the problem's Leq constraints.
Eigen::MatrixXcd push_solve(const ConeProblem& prob,
                            const Eigen::MatrixXcd& objective,
                            const Eigen::MatrixXcd& start) {
    ConeProblem push;
    push.dim = prob.dim;
    push.linear = objective;
    for (const auto& c : prob.constraints)
        if (c.sense == Sense::Leq) push.constraints.push_back(c);
    const ConeSolution sol = solve(push, 1e-5, start);
    return sol.w;
}

double constraint_scale(const AffineConstraint& c) {
    return std::max({std::abs(c.bound), c.matrix.norm() * 1e-6, 1e-300});
}

}  // namespace

std::optional<Eigen::MatrixXcd> feasibility_seed(const ConeProblem& prob) {
    const Eigen::Index n = prob.dim;
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
    if (prob.constraints.empty()) return Eigen::MatrixXcd(1e-3 * identity);

    // Scaled identity with >= 50% slack on every trace cap.
    double scale = std::numeric_limits<double>::infinity();
    for (const auto& c : prob.constraints) {
        if (c.sense != Sense::Leq) continue;
        const double tr = trace_inner(c.matrix, identity);
        if (tr <= 0.0) continue;
        if (c.bound <= 0.0) return std::nullopt;
        scale = std::min(scale, c.bound / (2.0 * tr));
    }
    if (!std::isfinite(scale)) scale = 1e-3;
    Eigen::MatrixXcd base = scale * identity;

    std::vector<int> qos;  // >= constraints needing a lift
    for (std::size_t j = 0; j < prob.constraints.size(); ++j)
        if (prob.constraints[j].sense == Sense::Geq) qos.push_back(static_cast<int>(j));

    const auto strictly_feasible = [&](const Eigen::MatrixXcd& w) {
        Eigen::LLT<Eigen::MatrixXcd> llt;
        if (!cholesky(Eigen::MatrixXcd(w), llt)) return false;
        for (const auto& c : prob.constraints)
            if (prob.slack(c, w) <= 1e-9 * constraint_scale(c)) return false;
        return true;
    };

    if (strictly_feasible(base)) return base;

    // Rank-one lifts along each unmet >= constraint's dominant eigenvector.
    std::vector<int> violated;
    for (int j : qos)
        if (prob.slack(prob.constraints[j], base) <=
            1e-9 * constraint_scale(prob.constraints[j]))
            violated.push_back(j);
    if (!violated.empty()) {
        std::vector<Eigen::VectorXcd> dirs;
        bool liftable = true;
        for (int j : violated) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
                prob.constraints[j].matrix);
            const Eigen::Index top = es.eigenvalues().size() - 1;
            if (es.eigenvalues()(top) <= 0.0) {
                liftable = false;
                break;
            }
            dirs.push_back(es.eigenvectors().col(top));
        }
        if (liftable) {
            const int k = static_cast<int>(violated.size());
            Eigen::MatrixXd system(k, k);
            Eigen::VectorXd rhs(k);
            for (int i = 0; i < k; ++i) {
                const auto& ci = prob.constraints[violated[i]];
                rhs(i) = ci.bound + 0.1 * constraint_scale(ci) -
                         trace_inner(ci.matrix, base);
                for (int j = 0; j < k; ++j)
                    system(i, j) =
                        (dirs[j].adjoint() * ci.matrix * dirs[j])(0).real();
            }
            const Eigen::VectorXd t =
                system.fullPivLu().solve(rhs).cwiseMax(0.0);
            Eigen::MatrixXcd lifted = base;
            for (int j = 0; j < k; ++j)
                lifted += t(j) * (dirs[j] * dirs[j].adjoint());
            if (strictly_feasible(lifted)) return lifted;
        }
    }

    if (qos.empty()) return std::nullopt;

    // Max-min slack search: push weighted combinations of the unmet >=
    // functionals over the {PSD, Leq} region and keep the best joint slack.
    const auto min_scaled_slack = [&](const Eigen::MatrixXcd& w) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : prob.constraints)
            best = std::min(best, prob.slack(c, w) / constraint_scale(c));
        return best;
    };
    Eigen::MatrixXcd best;
    double best_slack = -std::numeric_limits<double>::infinity();
    const int grid = qos.size() == 1 ? 1 : 11;
    for (int g = 0; g < grid; ++g) {
        Eigen::MatrixXcd objective = Eigen::MatrixXcd::Zero(n, n);
        if (qos.size() == 1) {
            objective = prob.constraints[qos[0]].matrix /
                        constraint_scale(prob.constraints[qos[0]]);
        } else {
            const double theta = static_cast<double>(g) / (grid - 1);
            const double weight_first = theta;
            for (std::size_t i = 0; i < qos.size(); ++i) {
                const auto& c = prob.constraints[qos[i]];
                const double weight =
                    (i == 0) ? weight_first
                             : (1.0 - weight_first) /
                                   static_cast<double>(qos.size() - 1);
                objective += (weight / constraint_scale(c)) * c.matrix;
            }
        }
        const Eigen::MatrixXcd cand = push_solve(prob, objective, base);
        const double s = min_scaled_slack(cand);
        if (s > best_slack) {
            best_slack = s;
            best = cand;
        }
    }
    if (best_slack <= 0.0) return std::nullopt;

    // Pull slightly toward the interior identity for strict PSD margin.
    const Eigen::MatrixXcd mixed = 0.95 * best + 0.05 * base;
    if (strictly_feasible(mixed) && min_scaled_slack(mixed) > 0.0) return mixed;
    if (strictly_feasible(best)) return best;
    return std::nullopt;
}

ConeSolution solve(const ConeProblem& prob, double tol,
                   const std::optional<Eigen::MatrixXcd>& start) {
    ConeSolution sol;
    const Eigen::Index n = prob.dim;

    Eigen::MatrixXcd w;
    if (start) {
        w = hermitian_part(*start);
        Eigen::LLT<Eigen::MatrixXcd> llt;
        const bool interior =
            cholesky(w, llt) && prob.min_slack(w) > 0.0;
        if (!interior) {
            const auto seed = feasibility_seed(prob);
            if (!seed) {
                sol.feasible = false;
                sol.failure = "no strictly feasible point";
                return sol;
            }
            w = *seed;
        }
    } else {
        const auto seed = feasibility_seed(prob);
        if (!seed) {
            sol.feasible = false;
            sol.failure = "no strictly feasible point";
            return sol;
        }
        w = *seed;
    }

    const BarrierSolver barrier(prob);
    const double nu = barrier_complexity(prob);
    const double mu_final = std::max(tol / nu, 1e-14);
    const double norm0 = w.norm();
    double mu = 1.0;
    int total_steps = 0;
    bool diverged = false;
    for (; mu > mu_final; mu /= 10.0) {
        total_steps += barrier.center(w, mu, 50);
        sol.stage_objectives.push_back(prob.objective(w));
        if (w.norm() > 1e10 * (1.0 + norm0)) {
            diverged = true;
            break;
        }
    }
    if (!diverged) {
        total_steps += barrier.center(w, mu_final, 50);
        sol.stage_objectives.push_back(prob.objective(w));
    }

    sol.w = w;
    sol.objective = prob.objective(w);
    sol.iterations = total_steps;
    sol.converged = !diverged;
    if (diverged) sol.failure = "iterates diverged (objective unbounded?)";
    sol.slacks.reserve(prob.constraints.size());
    for (const auto& c : prob.constraints)
        sol.slacks.push_back(prob.slack(c, w));
    (void)n;
    return sol;
}

}  // namespace masr

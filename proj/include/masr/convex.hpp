#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace masr {

/// coeff * ln(offset + tr(matrix W)) in the maximization objective.
/// Requires coeff > 0, offset > 0 and a Hermitian PSD matrix, so the term is
/// concave and defined on the whole PSD cone.
struct LogTerm {
    double coeff = 1.0;
    double offset = 1.0;
    Eigen::MatrixXcd matrix;
};

enum class Sense { Geq, Leq };

/// tr(matrix W) >= bound (Geq) or <= bound (Leq); matrix Hermitian.
struct AffineConstraint {
    Eigen::MatrixXcd matrix;
    double bound = 0.0;
    Sense sense = Sense::Leq;
    std::string label;
};

/// maximize  sum_i coeff_i ln(offset_i + tr(A_i W)) + tr(C W) + constant
/// over Hermitian PSD W subject to affine trace inequalities.
struct ConeProblem {
    int dim = 0;
    std::vector<LogTerm> log_terms;
    Eigen::MatrixXcd linear;  // C; zero matrix when absent
    double constant = 0.0;
    std::vector<AffineConstraint> constraints;
    /// Diagonal block width when the variable has per-AP structure (N); 0
    /// when unstructured.
    int block_size = 0;

    double objective(const Eigen::MatrixXcd& w) const;
    /// Signed slack of one constraint (>= 0 when satisfied).
    double slack(const AffineConstraint& c, const Eigen::MatrixXcd& w) const;
    double min_slack(const Eigen::MatrixXcd& w) const;

    void dump(std::ostream& out) const;
};

struct ConeSolution {
    Eigen::MatrixXcd w;
    double objective = 0.0;
    std::vector<double> slacks;
    /// Objective after each barrier stage; non-decreasing along the path.
    std::vector<double> stage_objectives;
    int iterations = 0;  // Newton steps across all barrier stages
    bool converged = false;
    bool feasible = true;
    std::string failure;
};

/// Strictly feasible interior point. Starts from scaled identity plus
/// rank-one loads on the >= constraints; falls back to a max-min slack
/// search when the heuristic misses. Returns nullopt when phase 1 certifies
/// no strictly feasible point was found.
std::optional<Eigen::MatrixXcd> feasibility_seed(const ConeProblem& prob);

/// Log-barrier interior-point solve. `start`, when given, must be strictly
/// feasible; otherwise a seed is computed internally.
ConeSolution solve(const ConeProblem& prob, double tol = 1e-6,
                   const std::optional<Eigen::MatrixXcd>& start = {});

}  // namespace masr

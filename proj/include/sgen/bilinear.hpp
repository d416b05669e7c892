#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sgen/qp.hpp"
#include "sgen/solver_options.hpp"

namespace sgen::opt {

// Alternating minimization for problems that are bilinear in a share vector
// alpha and a continuous block u, but convex in each block when the other is
// held fixed. The caller supplies builders for the two sub-QPs plus an
// evaluator of the combined objective; the iteration keeps the objective
// non-increasing (exact block minimization, with midpoint backtracking on
// alpha when a fresh u sub-problem comes out infeasible).
enum class BilinearStatus { Converged, Stalled, MaxAlternations, InfeasibleStart };

const char* to_string(BilinearStatus s);

struct BilinearResult {
    BilinearStatus status = BilinearStatus::InfeasibleStart;
    Eigen::VectorXd alpha;
    QpResult u_solution;                  // last successful u-block solve
    double objective = 0.0;
    int alternations = 0;
    std::vector<double> objective_trace;  // combined objective per alternation
};

struct BilinearCallbacks {
    std::function<QpProblem(const Eigen::VectorXd& alpha)> build_u_qp;
    std::function<QpProblem(const Eigen::VectorXd& u)> build_alpha_qp;
    std::function<double(const Eigen::VectorXd& alpha, const Eigen::VectorXd& u)> objective;
};

BilinearResult solve_bilinear_alternating(const BilinearCallbacks& cb,
                                          const Eigen::VectorXd& alpha0,
                                          int max_alternations, double tol,
                                          const SolverOptions& opts = default_options());

}  // namespace sgen::opt

#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "sgen/solver_options.hpp"

namespace sgen::opt {

// Convex quadratic program
//   min 0.5 x'Hx + c'x  s.t.  A_eq x = b_eq,  A_in x <= b_in,  lb <= x <= ub.
// H must be symmetric positive semidefinite (checked by factorization).
struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd c;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd A_in;
    Eigen::VectorXd b_in;
    Eigen::VectorXd lb;  // optional, may be empty
    Eigen::VectorXd ub;

    int num_vars() const { return static_cast<int>(c.size()); }
    void validate() const;
};

enum class QpStatus { Optimal, Infeasible, MaxIter };

const char* to_string(QpStatus s);

struct QpResult {
    QpStatus status = QpStatus::MaxIter;
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::VectorXd lambda_eq;   // multipliers of A_eq rows
    Eigen::VectorXd lambda_in;   // multipliers of A_in rows (bounds folded in)
    double kkt_residual = 0.0;
    int iterations = 0;
};

// Primal active-set method. `warm_x`, if given and feasible, seeds the
// initial point and working set; otherwise an LP feasibility phase runs.
QpResult solve_qp(const QpProblem& p, const SolverOptions& opts = default_options(),
                  const Eigen::VectorXd* warm_x = nullptr);

void dump_qp(const QpProblem& p, std::ostream& os);
QpProblem load_qp(std::istream& is);

}  // namespace sgen::opt

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <string>

#include "sgen/solver_options.hpp"

namespace sgen::opt {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear program
//   min c'x  s.t.  A_eq x = b_eq,  A_in x <= b_in,  lb <= x <= ub.
// Empty matrices stand for "no such constraints"; lb/ub may be +-inf.
struct LpProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd A_in;
    Eigen::VectorXd b_in;
    Eigen::VectorXd lb;
    Eigen::VectorXd ub;

    int num_vars() const { return static_cast<int>(c.size()); }
    void validate() const;  // throws DimensionMismatch

    // Unbounded variables by default.
    static LpProblem with_free_bounds(int n);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
};

LpResult solve_lp(const LpProblem& p, const SolverOptions& opts = default_options());

// Plain-text round trip used for regression fixtures.
void dump_lp(const LpProblem& p, std::ostream& os);
LpProblem load_lp(std::istream& is);

}  // namespace sgen::opt

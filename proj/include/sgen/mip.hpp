#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgen/lp.hpp"
#include "sgen/solver_options.hpp"

namespace sgen::opt {

// Mixed-integer linear program: an LP core plus a set of variables
// constrained to {0,1}.
struct MipProblem {
    LpProblem lp;
    std::vector<int> binaries;

    void validate() const;
};

enum class MipStatus { Optimal, Infeasible, NodeCapReached, IterationTrouble };

const char* to_string(MipStatus s);

struct MipResult {
    MipStatus status = MipStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;   // incumbent objective (valid unless Infeasible)
    double bound = 0.0;       // global lower bound
    double gap = 0.0;         // (objective - bound) / max(1, |objective|)
    long nodes = 0;
    bool has_incumbent = false;
};

// Branch and bound over LP relaxations with best-bound node selection,
// most-fractional branching and activity-based bound tightening at every
// node. Deterministic: all ties break on the lowest index / oldest node.
MipResult solve_mip(const MipProblem& p, double gap_tol, long node_cap,
                    const SolverOptions& opts = default_options(),
                    const Eigen::VectorXd* incumbent_hint = nullptr);

}  // namespace sgen::opt

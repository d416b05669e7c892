#pragma once

namespace sgen::opt {

// All numerical tolerances of the optimization kernels live here so that
// they can be adjusted in one place and logged with results.
struct SolverOptions {
    double feas_tol = 1e-9;        // row/bound feasibility
    double opt_tol = 1e-9;         // reduced-cost / multiplier threshold
    double pivot_tol = 1e-10;      // minimum acceptable simplex pivot
    double kkt_tol = 1e-8;         // QP stationarity target
    double int_tol = 1e-6;         // MIP integrality tolerance
    double mip_gap_tol = 1e-9;     // default relative optimality gap
    int max_lp_iterations = 50000;
    int max_qp_iterations = 1000;
    long max_mip_nodes = 1000000;
    int refactor_interval = 100;   // simplex basis refactorization period
    int bland_trigger = 30;        // degenerate steps before Bland's rule
};

inline const SolverOptions& default_options() {
    static const SolverOptions opts{};
    return opts;
}

}  // namespace sgen::opt

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgen/local_control.hpp"

namespace sgen {

// Identified discrete-time affine model
//   y(k) = [sum_j b_j z^-j / (1 + sum_j f_j z^-j)] u(k) + gamma
// at sampling period T_M.
struct AffineModel {
    Eigen::VectorXd b;  // b_1..b_nb
    Eigen::VectorXd f;  // f_1..f_nf
    double gamma = 0.0; // output bias at u = 0, kg/s
    double T_M = 40.0;  // s

    int nb() const { return static_cast<int>(b.size()); }
    int nf() const { return static_cast<int>(f.size()); }
    double static_gain() const { return b.sum() / (1.0 + f.sum()); }

    // All roots of 1 + sum f_j z^-j strictly inside the unit circle.
    bool is_schur(double margin = 1e-9) const;
    void validate() const;  // throws UnstableFit / SchemaError

    // Free-run simulation with pre-history in steady state at u(0).
    Eigen::VectorXd simulate(const Eigen::VectorXd& u) const;
};

// State-space realization in the canonical structure with state
// [dy(k) .. dy(k-nf+1), u(k-1) .. u(k-nb+1)], dy = y - gamma.
struct CanonicalSS {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double gamma = 0.0;
    int nf = 0;
    int nb = 0;

    int order() const { return static_cast<int>(A.rows()); }
    double static_gain() const;  // C (I - A)^{-1} B
};

CanonicalSS realize(const AffineModel& model);

// Exact coefficient read-back from the canonical matrices.
AffineModel read_back(const CanonicalSS& ss, double T_M = 40.0);

// Multi-step excitation design for closed-loop identification.
struct StepDesign {
    std::vector<double> levels;  // steam-demand levels, each held hold_s
    double hold_s = 400.0;       // per-level hold, must exceed settling
    double T_M = 40.0;           // sampling period, s
};

struct Dataset {
    Eigen::VectorXd u;
    Eigen::VectorXd y;
    double T_M = 40.0;
};

// Simulates the closed-loop boiler under the step design with the input held
// constant between T_M samples; returns synchronized (u, y) sequences.
Dataset excite_and_collect(ClosedLoopBoiler boiler, const StepDesign& design,
                           double h_f = 420.0);

struct IdentifyOptions {
    int max_refine_iterations = 150;
    double objective_tol = 1e-14;
    double schur_margin = 1e-9;
};

struct IdentifyResult {
    AffineModel model;
    double fit = 0.0;  // NRMSE fit of the free-run simulation, 1 = perfect
};

// Simulation-error (output-error) identification: affine equation-error
// least squares for the initial guess, then finite-difference gradient
// descent on the free-run residual. Throws UnstableFit / RankDeficient.
IdentifyResult identify(const Dataset& data, int nb, int nf,
                        const IdentifyOptions& opts = {});

// Order sweep over nb, nf in {1..max_order}^2, picking the best fit on a
// held-out tail of the dataset.
IdentifyResult identify_best_order(const Dataset& data, int max_order = 3,
                                   const IdentifyOptions& opts = {});

}  // namespace sgen

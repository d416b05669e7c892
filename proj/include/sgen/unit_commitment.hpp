#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgen/hybrid.hpp"
#include "sgen/mip.hpp"

namespace sgen {

// Forecast of the cumulative steam demand on the slow grid.
struct DemandProfile {
    Eigen::VectorXd demand;  // kg/s per step
    double T_H = 600.0;      // s

    int horizon() const { return static_cast<int>(demand.size()); }
    void validate() const;
};

struct UcCosts {
    double c_gas = 0.5;       // currency per kg of fuel
    double c_start = 50.0;    // currency per OFF->ST firing
    double c_slack = 1.0e4;   // currency per kg/s of demand imbalance per step
    // Deterministic lowest-index-first preference among equal-cost schedules;
    // excluded from the reported objective.
    double c_tiebreak = 1.0e-6;
};

struct UcGenerator {
    HybridGenModel model;
    MLDModel mld;
};

// Column/row bookkeeping of the stacked per-generator MLD program.
class UcLayout {
  public:
    UcLayout() = default;
    UcLayout(int n_gen, int horizon);

    int n_gen() const { return n_gen_; }
    int horizon() const { return nh_; }
    int num_vars() const { return total_; }

    int x(int gen, int step, int comp) const;      // step in 0..N_H
    int u(int gen, int step, int comp) const;      // step in 0..N_H-1
    int delta(int gen, int step, int comp) const;  // comp in 0..6
    int z(int gen, int step) const;
    int slack_pos(int step) const;
    int slack_neg(int step) const;

  private:
    int n_gen_ = 0, nh_ = 0, stride_ = 0, total_ = 0;
};

struct UcMipInstance {
    opt::MipProblem mip;
    UcLayout layout;
    UcCosts costs;
    double T_H = 0.0;
};

// Stacks the generators' MLD dynamics and E-systems over the horizon with
// the demand balance as equality-with-slack. Objective: gas cost + start-up
// cost + L1 slack penalty (+ the tie-break term on start-ups).
UcMipInstance build_uc_mip(const std::vector<UcGenerator>& gens, const DemandProfile& demand,
                           const std::vector<HybridState>& initial, const UcCosts& costs);

enum class UcStatus { Optimal, Infeasible, Timeout };

struct UCSolution {
    UcStatus status = UcStatus::Infeasible;
    // Per generator, per step (n_gen x N_H).
    std::vector<std::vector<Mode>> mode;
    Eigen::MatrixXd beta;
    Eigen::MatrixXd q_s;
    Eigen::MatrixXd q_g;
    Eigen::VectorXd u_ss;      // sum_i q_s_i(h)
    Eigen::MatrixXd alpha;     // q_s_i(h) / u_ss(h); all-zero when u_ss = 0
    Eigen::VectorXd fuel_ref;  // r(h) = sum_i q_g_i(h)
    Eigen::VectorXd slack;     // signed demand imbalance per step
    double objective = 0.0;    // true cost, tie-break term excluded
    double bound = 0.0;
    double gap = 0.0;
    long nodes = 0;
    Eigen::VectorXd raw;       // full variable vector (warm-start carrier)
};

UCSolution solve_uc(const UcMipInstance& inst, double gap_tol = 1e-9,
                    long node_cap = 200000, const Eigen::VectorXd* incumbent = nullptr);

// Builds a feasible variable vector from explicit switching commands by
// rolling the automata forward and keeping the given dispatch; demand
// mismatch lands on the slack variables. Used for warm starts and oracles.
Eigen::VectorXd assemble_assignment(const std::vector<UcGenerator>& gens,
                                    const std::vector<HybridState>& initial,
                                    const Eigen::MatrixXd& beta,
                                    const Eigen::MatrixXd& q_s,
                                    const DemandProfile& demand, const UcLayout& layout);

// Receding-horizon driver: solves the UC at the current step, extracts the
// first-step plan, and shifts the previous solution into a warm start.
class RecedingUc {
  public:
    RecedingUc(std::vector<UcGenerator> gens, UcCosts costs, double gap_tol = 1e-6,
               long node_cap = 200000);

    UCSolution solve(const DemandProfile& window, const std::vector<HybridState>& states);

    const std::vector<UcGenerator>& generators() const { return gens_; }

  private:
    std::vector<UcGenerator> gens_;
    UcCosts costs_;
    double gap_tol_;
    long node_cap_;
    UCSolution last_;
    bool has_last_ = false;
};

}  // namespace sgen

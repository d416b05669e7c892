#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>

#include "sgen/solver_options.hpp"

namespace sgen {

enum class Mode : int { OFF = 0, ST = 1, ON = 2 };

const char* to_string(Mode m);

// High-level generator automaton: modes OFF / ST (start-up) / ON with a
// dwell counter chi and guarded transitions driven by the binary command
// beta. The output map is static per mode.
struct HybridGenModel {
    int chi_off_st = 1;   // dwell needed before OFF -> ST (with beta = 1)
    int chi_st_on = 2;    // dwell needed before ST -> ON (automatic)
    int chi_on_off = 2;   // dwell needed before ON -> OFF (with beta = 1)
    int chi_cap = 64;     // saturation of the dwell counter (keeps big-M finite)

    double g = 0.05;         // static gain of the closed loop, (kg/s)/(kg/s)
    double gamma_on = 0.0;   // constant gas term in production, kg/s
    double gamma_st = 0.02;  // constant gas burn during start-up, kg/s
    double q_s_min = 0.4;    // steam bounds when ON, kg/s
    double q_s_max = 2.0;

    void validate() const;  // throws SchemaError
};

struct HybridState {
    Mode mode = Mode::OFF;
    int chi = 0;
};

// One automaton step: returns the new state and the gas output of the
// current step. q_s must be inside [q_s_min, q_s_max] when ON and zero
// otherwise (InvalidInput).
struct DhaResult {
    HybridState state;
    double q_g = 0.0;
};

DhaResult dha_step(const HybridGenModel& model, const HybridState& state, bool beta,
                   double q_s);

// Mixed logical dynamical form of the automaton:
//   x(h+1) = A x + B_u u + B_z z + B_delta delta
//   y(h)   = C x + D_u u + D_z z + D_delta delta
//   E_x x + E_u u + E_z z + E_delta delta <= E_aff
// with x = [chi, x_OFF, x_ST, x_ON], u = [beta, q_s], y = q_g.
// delta = [over-threshold flags (3 guards + cap), transition flags (3)],
// z = [dwell counter carried across a no-transition step].
struct MLDModel {
    static constexpr int kNx = 4;
    static constexpr int kNu = 2;
    static constexpr int kNdelta = 7;
    static constexpr int kNz = 1;

    Eigen::MatrixXd A, B_u, B_z, B_delta;
    Eigen::RowVectorXd C, D_u, D_z, D_delta;
    Eigen::MatrixXd E_x, E_u, E_z, E_delta;
    Eigen::VectorXd E_aff;

    // Variable domains used by optimizers built on this model.
    Eigen::VectorXd x_lb, x_ub;  // chi in [0, cap], mode flags in [0,1]
    Eigen::VectorXd u_lb, u_ub;  // beta in [0,1], q_s in [0, q_s_max]
    double z_lb = 0.0, z_ub = 0.0;

    double chi_cap = 0.0;
};

MLDModel to_mld(const HybridGenModel& model);

// Solves the per-step completion: given (x, u) admissible, find the unique
// (delta, z) satisfying the E-system (binary deltas), then advance.
// Uniqueness is cross-checked by re-solving under a reversed objective.
// Throws BigMTooSmall when no or ambiguous completion exists.
struct MldStep {
    Eigen::VectorXd x_next;
    double y = 0.0;
    Eigen::VectorXd delta;
    double z = 0.0;
};

MldStep mld_step(const MLDModel& mld, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                 const opt::SolverOptions& opts = opt::default_options());

Eigen::VectorXd encode_state(const HybridState& s);
HybridState decode_state(const Eigen::VectorXd& x);  // throws BigMTooSmall on non-one-hot

// Direct evaluation of the auxiliary variables from the automaton logic
// (threshold flags, transition ANDs, dwell carry). Agrees with mld_step's
// optimization-based completion on every admissible point.
struct LogicCompletion {
    Eigen::VectorXd delta;
    double z = 0.0;
};
LogicCompletion logic_completion(const HybridGenModel& model, const HybridState& state,
                                 bool beta);

// Trajectory equivalence self-test between dha_step and the MLD completion
// on random admissible input sequences; returns the number of mismatching
// steps (0 when the conversion is sound).
int mld_equivalence_mismatches(const HybridGenModel& model, int sequences, int steps,
                               std::uint64_t seed);

// Plain-text export of all MLD matrices (row-major, dimension header).
void dump_mld(const MLDModel& mld, std::ostream& os);

}  // namespace sgen

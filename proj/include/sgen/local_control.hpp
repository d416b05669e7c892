#pragma once

#include <vector>

#include "sgen/boiler.hpp"

namespace sgen {

// Embedded PI pressure regulator acting on fuel flow.
struct PIConfig {
    double k_p = 0.1;     // (kg/s)/bar
    double k_i = 0.003;   // (kg/s)/(bar s)
    double p_sp = 10.0;   // pressure set-point, bar
    double u_min = 0.0;   // gas-flow actuator limits, kg/s
    double u_max = 0.2;

    void validate() const;
};

// Open-loop feed-water compensator: q_f = gain * q_s.
struct CompensatorConfig {
    double gain = 1.0;

    void validate() const;
};

// One boiler under its embedded regulators; a sequential state machine
// advanced by cl_step at period tau.
struct ClosedLoopBoiler {
    BoilerState plant;
    double integrator = 0.0;  // bar*s
    PIConfig pi;
    CompensatorConfig comp;
    BoilerParams params;
    double tau = 1.0;  // s

    // Fuel command currently held by the actuator (for logging).
    double last_q_g = 0.0;
    double last_q_f = 0.0;
};

// Advances the closed loop one tau with the steam draw and feed-water
// enthalpy held constant; returns the applied fuel flow. Conditional
// anti-windup: the integrator freezes while the actuator is saturated in
// the error's direction.
double cl_step(ClosedLoopBoiler& sys, double q_s, double h_f);

struct StaticMapPoint {
    double q_s = 0.0;
    double q_g = 0.0;
};

struct StaticMapOptions {
    double h_f = 420.0;
    double settle_band_frac = 2e-4;   // |dq_g| band over the window, fraction of u_max
    double window_s = 120.0;          // settling detection window
    double max_horizon_s = 20000.0;   // NoSettling beyond this
};

// Steady-state input/output map over a steam-demand grid: each level is
// simulated until the fuel command settles. Throws NoSettling.
std::vector<StaticMapPoint> static_map(const ClosedLoopBoiler& sys_template,
                                       const std::vector<double>& q_s_grid,
                                       const StaticMapOptions& opts = {});

// Loop-shaping PI tuning on the linearized pressure dynamics at the
// set-point: the plant from fuel flow to pressure is an integrator with
// slope eta*lambda_H/phi0, the proportional gain places the crossover at
// 2*pi/T_cross and the integral time is five periods of it.
PIConfig tune_pi(const BoilerParams& params, const BoilerState& nominal, double p_sp,
                 double u_max, double T_cross = 40.0);

}  // namespace sgen

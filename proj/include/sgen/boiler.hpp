#pragma once

#include <memory>

#include "sgen/steam_table.hpp"

namespace sgen {

// Physical constants of one water-tube boiler. The property table is shared
// (immutable) so boiler banks can reference a single copy.
struct BoilerParams {
    double eta = 0.9;          // burner efficiency (0,1]
    double lambda_H = 50000.0; // gas low heat value, kJ/kg
    double V_T = 1.5;          // total tube internal volume, m^3
    double M_T = 5000.0;       // metal mass, kg
    double c_p = 0.5;          // metal specific heat, kJ/(kg K)
    std::shared_ptr<const SaturationTable> table;

    void validate() const;  // throws SchemaError on violated invariants
};

struct BoilerState {
    double p = 10.0;   // internal pressure, bar
    double V_w = 1.0;  // water volume, m^3
};

struct BoilerInputs {
    double q_f = 0.0;   // feed-water flow, kg/s
    double q_g = 0.0;   // fuel gas flow, kg/s
    double q_s = 0.0;   // steam draw, kg/s
    double h_f = 420.0; // feed-water enthalpy, kJ/kg (measured disturbance)
};

// Liquid outflow from the instantaneous mass balance q_f = q_s + q_w.
// Reported alongside the state, never stored.
inline double reported_q_w(const BoilerInputs& in) { return in.q_f - in.q_s; }

// Energy-capacity coefficient of the pressure dynamics, kJ/bar.
// Throws PressureOutOfTable / NonPositivePhi.
double eval_phi(const BoilerState& state, const BoilerParams& params);

struct BoilerDerivatives {
    double dp_dt = 0.0;   // bar/s
    double dV_w_dt = 0.0; // m^3/s
};

BoilerDerivatives derivatives(const BoilerState& state, const BoilerInputs& inputs,
                              const BoilerParams& params);

// One fixed step of the classical 4th-order integrator with inputs held
// constant over [t, t+tau). Throws IntegrationDiverged when an internal
// stage leaves the state invariants.
BoilerState step(const BoilerState& state, const BoilerInputs& inputs,
                 const BoilerParams& params, double tau);

}  // namespace sgen

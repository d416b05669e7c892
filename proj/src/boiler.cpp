#include "sgen/boiler.hpp"

#include <cmath>
#include <string>

#include "sgen/errors.hpp"

namespace sgen {

namespace {
// p·V work term conversion: 1 m^3·bar = 100 kJ. The table works in bar and
// kJ, so the bare tube-volume term of the capacity coefficient carries this
// factor.
constexpr double kKjPerM3Bar = 100.0;
}  // namespace

void BoilerParams::validate() const {
    auto fail = [](const std::string& what) { throw SchemaError("BoilerParams: " + what); };
    if (!(eta > 0.0 && eta <= 1.0)) fail("eta must be in (0, 1]");
    if (!(lambda_H > 0.0)) fail("lambda_H must be positive");
    if (!(V_T > 0.0)) fail("V_T must be positive");
    if (!(M_T > 0.0)) fail("M_T must be positive");
    if (!(c_p > 0.0)) fail("c_p must be positive");
    if (!table) fail("missing property table");
}

double eval_phi(const BoilerState& state, const BoilerParams& params) {
    const SaturationSample s = params.table->at(state.p);
    const double V_s = params.V_T - state.V_w;
    const double vapor = V_s * (s.h_s * s.drho_s_dp + s.rho_s * s.dh_s_dp);
    const double liquid = state.V_w * (s.h_w * s.drho_w_dp + s.rho_w * s.dh_w_dp);
    const double pv_work = kKjPerM3Bar * params.V_T;
    const double metal = params.M_T * params.c_p * s.dT_s_dp;
    const double redistribution = -(s.drho_w_dp * state.V_w + s.drho_s_dp * V_s) *
                                  (s.rho_w * s.h_w - s.rho_s * s.h_s) / (s.rho_w - s.rho_s);
    const double phi = vapor + liquid + pv_work + metal + redistribution;
    if (!(phi > 0.0))
        throw NonPositivePhi("phi = " + std::to_string(phi) + " kJ/bar at p = " +
                             std::to_string(state.p) + " bar, V_w = " +
                             std::to_string(state.V_w) + " m^3");
    return phi;
}

BoilerDerivatives derivatives(const BoilerState& state, const BoilerInputs& inputs,
                              const BoilerParams& params) {
    const SaturationSample s = params.table->at(state.p);
    const double phi = eval_phi(state, params);
    const double V_s = params.V_T - state.V_w;
    BoilerDerivatives d;
    d.dp_dt = (params.eta * params.lambda_H * inputs.q_g + inputs.q_f * (inputs.h_f - s.h_w) -
               inputs.q_s * (s.h_s - s.h_w)) /
              phi;
    d.dV_w_dt = (s.drho_w_dp * state.V_w + s.drho_s_dp * V_s) / (s.rho_w - s.rho_s) * d.dp_dt;
    return d;
}

BoilerState step(const BoilerState& state, const BoilerInputs& inputs,
                 const BoilerParams& params, double tau) {
    if (!(tau > 0.0)) throw SchemaError("boiler step: tau must be positive");

    auto advance = [&](const BoilerState& s, const BoilerDerivatives& d, double h) {
        BoilerState n;
        n.p = s.p + h * d.dp_dt;
        n.V_w = s.V_w + h * d.dV_w_dt;
        return n;
    };
    auto stage_derivs = [&](const BoilerState& s) -> BoilerDerivatives {
        if (!std::isfinite(s.p) || !std::isfinite(s.V_w) || s.p < params.table->p_min() ||
            s.p > params.table->p_max() || s.V_w < 0.0 || s.V_w > params.V_T)
            throw IntegrationDiverged("state left invariants mid-step (p = " +
                                      std::to_string(s.p) + " bar, V_w = " +
                                      std::to_string(s.V_w) + " m^3)");
        try {
            return derivatives(s, inputs, params);
        } catch (const NonPositivePhi& e) {
            throw IntegrationDiverged(std::string("mid-step: ") + e.what());
        }
    };

    const BoilerDerivatives k1 = derivatives(state, inputs, params);  // initial-state errors pass through
    const BoilerDerivatives k2 = stage_derivs(advance(state, k1, 0.5 * tau));
    const BoilerDerivatives k3 = stage_derivs(advance(state, k2, 0.5 * tau));
    const BoilerDerivatives k4 = stage_derivs(advance(state, k3, tau));

    BoilerState out;
    out.p = state.p + tau / 6.0 * (k1.dp_dt + 2.0 * k2.dp_dt + 2.0 * k3.dp_dt + k4.dp_dt);
    out.V_w =
        state.V_w + tau / 6.0 * (k1.dV_w_dt + 2.0 * k2.dV_w_dt + 2.0 * k3.dV_w_dt + k4.dV_w_dt);
    if (!std::isfinite(out.p) || !std::isfinite(out.V_w) || out.p < params.table->p_min() ||
        out.p > params.table->p_max() || out.V_w < 0.0 || out.V_w > params.V_T)
        throw IntegrationDiverged("state left invariants after step (p = " +
                                  std::to_string(out.p) + " bar)");
    return out;
}

}  // namespace sgen

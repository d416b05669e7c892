#include "sgen/local_control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgen/errors.hpp"

namespace sgen {

void PIConfig::validate() const {
    auto fail = [](const std::string& what) { throw SchemaError("PIConfig: " + what); };
    if (k_p < 0.0) fail("k_p must be >= 0");
    if (k_i < 0.0) fail("k_i must be >= 0");
    if (!(u_min < u_max)) fail("u_min must be < u_max");
}

void CompensatorConfig::validate() const {
    if (!(gain > 0.0)) throw SchemaError("CompensatorConfig: gain must be positive");
}

double cl_step(ClosedLoopBoiler& sys, double q_s, double h_f) {
    if (q_s < 0.0) throw SchemaError("cl_step: q_s must be nonnegative");

    const double q_f = sys.comp.gain * q_s;  // open-loop feedforward
    const double err = sys.pi.p_sp - sys.plant.p;
    const double raw = sys.pi.k_p * err + sys.pi.k_i * sys.integrator;
    const double q_g = std::clamp(raw, sys.pi.u_min, sys.pi.u_max);

    BoilerInputs in;
    in.q_f = q_f;
    in.q_g = q_g;
    in.q_s = q_s;
    in.h_f = h_f;
    sys.plant = step(sys.plant, in, sys.params, sys.tau);

    // Conditional anti-windup: integrate only when not pushing further into
    // the active saturation.
    const bool sat_hi = raw > sys.pi.u_max && err > 0.0;
    const bool sat_lo = raw < sys.pi.u_min && err < 0.0;
    if (!sat_hi && !sat_lo) sys.integrator += err * sys.tau;

    sys.last_q_g = q_g;
    sys.last_q_f = q_f;
    return q_g;
}

std::vector<StaticMapPoint> static_map(const ClosedLoopBoiler& sys_template,
                                       const std::vector<double>& q_s_grid,
                                       const StaticMapOptions& opts) {
    std::vector<StaticMapPoint> out;
    out.reserve(q_s_grid.size());
    for (double q_s : q_s_grid) {
        ClosedLoopBoiler sys = sys_template;
        const int window = std::max(2, static_cast<int>(opts.window_s / sys.tau));
        const long max_steps = static_cast<long>(opts.max_horizon_s / sys.tau);
        const double band =
            opts.settle_band_frac * (sys.pi.u_max - sys.pi.u_min);

        double w_min = 0.0, w_max = 0.0;
        int in_window = 0;
        bool settled = false;
        double settled_q_g = 0.0;
        for (long n = 0; n < max_steps; ++n) {
            const double q_g = cl_step(sys, q_s, opts.h_f);
            if (in_window == 0) {
                w_min = w_max = q_g;
            } else {
                w_min = std::min(w_min, q_g);
                w_max = std::max(w_max, q_g);
            }
            if (++in_window >= window) {
                if (w_max - w_min <= band &&
                    std::abs(sys.plant.p - sys.pi.p_sp) < 0.005 * sys.pi.p_sp) {
                    settled = true;
                    settled_q_g = q_g;
                    break;
                }
                in_window = 0;
            }
        }
        if (!settled)
            throw NoSettling("static_map: q_s = " + std::to_string(q_s) +
                             " kg/s did not settle within " +
                             std::to_string(opts.max_horizon_s) + " s");
        out.push_back({q_s, settled_q_g});
    }
    return out;
}

PIConfig tune_pi(const BoilerParams& params, const BoilerState& nominal, double p_sp,
                 double u_max, double T_cross) {
    const double phi0 = eval_phi(nominal, params);
    const double k0 = params.eta * params.lambda_H / phi0;  // (bar/s)/(kg/s)
    const double wc = 2.0 * std::numbers::pi / T_cross;
    PIConfig pi;
    pi.k_p = wc / k0;
    pi.k_i = pi.k_p * wc / 5.0;  // integral time = 5/wc
    pi.p_sp = p_sp;
    pi.u_min = 0.0;
    pi.u_max = u_max;
    return pi;
}

}  // namespace sgen

#include "sgen/bilinear.hpp"

#include <cmath>

namespace sgen::opt {

const char* to_string(BilinearStatus s) {
    switch (s) {
        case BilinearStatus::Converged: return "Converged";
        case BilinearStatus::Stalled: return "Stalled";
        case BilinearStatus::MaxAlternations: return "MaxAlternations";
        case BilinearStatus::InfeasibleStart: return "InfeasibleStart";
    }
    return "?";
}

BilinearResult solve_bilinear_alternating(const BilinearCallbacks& cb,
                                          const Eigen::VectorXd& alpha0,
                                          int max_alternations, double tol,
                                          const SolverOptions& opts) {
    BilinearResult res;
    res.alpha = alpha0;

    QpResult u_sol = solve_qp(cb.build_u_qp(alpha0), opts);
    if (u_sol.status != QpStatus::Optimal) {
        res.status = BilinearStatus::InfeasibleStart;
        return res;
    }
    double J = cb.objective(alpha0, u_sol.x);
    res.objective_trace.push_back(J);
    res.u_solution = u_sol;
    res.objective = J;

    Eigen::VectorXd alpha = alpha0;
    for (int t = 0; t < max_alternations; ++t) {
        res.alternations = t + 1;

        QpResult a_sol = solve_qp(cb.build_alpha_qp(u_sol.x), opts, &alpha);
        if (a_sol.status != QpStatus::Optimal) {
            res.status = BilinearStatus::Stalled;
            return res;
        }
        Eigen::VectorXd alpha_next = a_sol.x;

        // Refit u for the new shares; midpoint back toward the last accepted
        // alpha while the u sub-problem is infeasible or the combined
        // objective regressed (keeps the trace non-increasing).
        QpResult u_next;
        double J_next = 0.0;
        bool ok = false;
        for (int bt = 0; bt < 8; ++bt) {
            u_next = solve_qp(cb.build_u_qp(alpha_next), opts, &u_sol.x);
            if (u_next.status == QpStatus::Optimal) {
                J_next = cb.objective(alpha_next, u_next.x);
                if (J_next <= J + 1e-12 * (1.0 + std::abs(J))) {
                    ok = true;
                    break;
                }
            }
            alpha_next = 0.5 * (alpha_next + alpha);
        }
        if (!ok) {
            res.status = BilinearStatus::Stalled;
            return res;
        }

        const double drop = J - J_next;
        alpha = alpha_next;
        u_sol = u_next;
        J = J_next;
        res.alpha = alpha;
        res.u_solution = u_sol;
        res.objective = J;
        res.objective_trace.push_back(J);

        if (drop <= tol * (1.0 + std::abs(J))) {
            res.status = BilinearStatus::Converged;
            return res;
        }
    }
    res.status = BilinearStatus::MaxAlternations;
    return res;
}

}  // namespace sgen::opt

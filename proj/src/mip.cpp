#include "sgen/mip.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "sgen/errors.hpp"

namespace sgen::opt {

namespace {

// Activity-based bound tightening on lb/ub in place.
// Returns false when a bound conflict proves infeasibility.
bool propagate_bounds(const LpProblem& base, Eigen::VectorXd& lb, Eigen::VectorXd& ub,
                      const std::vector<int>& binaries, double int_tol) {
    const int n = base.num_vars();
    struct Row {
        const Eigen::MatrixXd* A;
        int r;
        double b;
        double sign;  // +1: row'x <= b, applied to sign*row
    };
    std::vector<Row> rows;
    for (int i = 0; i < base.A_in.rows(); ++i) rows.push_back({&base.A_in, i, base.b_in(i), 1.0});
    for (int i = 0; i < base.A_eq.rows(); ++i) {
        rows.push_back({&base.A_eq, i, base.b_eq(i), 1.0});
        rows.push_back({&base.A_eq, i, -base.b_eq(i), -1.0});
    }

    for (int pass = 0; pass < 6; ++pass) {
        bool changed = false;
        for (const Row& row : rows) {
            // min activity of sign*row'x given current bounds
            double minact = 0.0;
            int inf_count = 0;
            int inf_var = -1;
            for (int j = 0; j < n; ++j) {
                const double a = row.sign * (*row.A)(row.r, j);
                if (a == 0.0) continue;
                const double v = (a > 0) ? lb(j) : ub(j);
                if (!std::isfinite(v)) {
                    ++inf_count;
                    inf_var = j;
                    continue;
                }
                minact += a * v;
            }
            if (inf_count > 1) continue;
            for (int j = 0; j < n; ++j) {
                const double a = row.sign * (*row.A)(row.r, j);
                if (std::abs(a) < 1e-12) continue;
                if (inf_count == 1 && j != inf_var) continue;
                double rest;
                if (inf_count == 1) {
                    rest = minact;  // j is the lone infinite contributor
                } else {
                    const double v = (a > 0) ? lb(j) : ub(j);
                    rest = minact - a * v;
                }
                const double room = row.b - rest;
                if (a > 0) {
                    const double new_ub = room / a;
                    if (new_ub < ub(j) - 1e-12) {
                        ub(j) = new_ub;
                        changed = true;
                    }
                } else {
                    const double new_lb = room / a;
                    if (new_lb > lb(j) + 1e-12) {
                        lb(j) = new_lb;
                        changed = true;
                    }
                }
            }
        }
        for (int j : binaries) {
            if (lb(j) > int_tol && lb(j) < 1.0) { lb(j) = 1.0; changed = true; }
            if (ub(j) < 1.0 - int_tol && ub(j) > 0.0) { ub(j) = 0.0; changed = true; }
            if (lb(j) < 0.0) lb(j) = 0.0;
            if (ub(j) > 1.0) ub(j) = 1.0;
        }
        for (int j = 0; j < n; ++j)
            if (lb(j) > ub(j) + 1e-9) return false;
        if (!changed) break;
    }
    return true;
}

struct Node {
    Eigen::VectorXd lb, ub;
    double bound;  // parent LP objective (lower bound)
    int depth;
    long id;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        if (a.depth != b.depth) return a.depth < b.depth;  // deeper first
        return a.id > b.id;                                // older first
    }
};

}  // namespace

void MipProblem::validate() const {
    lp.validate();
    for (int j : binaries)
        if (j < 0 || j >= lp.num_vars())
            throw DimensionMismatch("MipProblem: binary index out of range");
}

const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return "Optimal";
        case MipStatus::Infeasible: return "Infeasible";
        case MipStatus::NodeCapReached: return "NodeCapReached";
        case MipStatus::IterationTrouble: return "IterationTrouble";
    }
    return "?";
}

MipResult solve_mip(const MipProblem& p, double gap_tol, long node_cap,
                    const SolverOptions& opts, const Eigen::VectorXd* incumbent_hint) {
    p.validate();
    const int n = p.lp.num_vars();
    MipResult res;

    auto integral = [&](const Eigen::VectorXd& x) {
        for (int j : p.binaries) {
            const double v = x(j);
            if (std::abs(v - std::round(v)) > opts.int_tol) return false;
        }
        return true;
    };
    auto feasible_point = [&](const Eigen::VectorXd& x) {
        if (x.size() != n) return false;
        const double tol = 1e-7;
        if (p.lp.A_eq.rows() > 0 && (p.lp.A_eq * x - p.lp.b_eq).cwiseAbs().maxCoeff() > tol)
            return false;
        if (p.lp.A_in.rows() > 0 && ((p.lp.A_in * x - p.lp.b_in).array() > tol).any())
            return false;
        for (int j = 0; j < n; ++j)
            if (x(j) < p.lp.lb(j) - tol || x(j) > p.lp.ub(j) + tol) return false;
        return integral(x);
    };

    double incumbent_obj = kInf;
    Eigen::VectorXd incumbent_x;
    if (incumbent_hint && feasible_point(*incumbent_hint)) {
        incumbent_x = *incumbent_hint;
        incumbent_obj = p.lp.c.dot(incumbent_x);
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    open.push({p.lp.lb, p.lp.ub, -kInf, 0, next_id++});

    long nodes = 0;
    bool trouble = false;
    bool early_exit = false;
    double best_open_bound = -kInf;

    while (!open.empty()) {
        if (nodes >= node_cap) {
            res.status = MipStatus::NodeCapReached;
            early_exit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        best_open_bound = node.bound;
        if (incumbent_obj < kInf) {
            const double gap = (incumbent_obj - node.bound) / std::max(1.0, std::abs(incumbent_obj));
            if (gap <= gap_tol) {
                early_exit = true;
                break;  // best-bound order: remaining nodes cannot improve enough
            }
        }
        ++nodes;

        Eigen::VectorXd lb = node.lb, ub = node.ub;
        if (!propagate_bounds(p.lp, lb, ub, p.binaries, opts.int_tol)) continue;

        LpProblem sub = p.lp;
        sub.lb = lb;
        sub.ub = ub;
        LpResult rel = solve_lp(sub, opts);
        if (rel.status == LpStatus::Infeasible) continue;
        if (rel.status == LpStatus::Unbounded)
            throw Error("solve_mip: LP relaxation unbounded (instance precondition violated)");
        if (rel.status == LpStatus::IterationLimit) {
            trouble = true;
            continue;
        }
        if (rel.objective >= incumbent_obj - 1e-12 * std::max(1.0, std::abs(incumbent_obj)))
            continue;

        if (integral(rel.x)) {
            Eigen::VectorXd x = rel.x;
            for (int j : p.binaries) x(j) = std::round(x(j));
            const double obj = p.lp.c.dot(x);
            if (obj < incumbent_obj) {
                incumbent_obj = obj;
                incumbent_x = x;
            }
            continue;
        }

        // Branch on the most fractional binary (lowest index on ties).
        int var = -1;
        double best_frac = -1.0;
        for (int j : p.binaries) {
            const double v = rel.x(j);
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > opts.int_tol && frac > best_frac + 1e-12) {
                best_frac = frac;
                var = j;
            }
        }
        if (var < 0) continue;  // only continuous fractionality; treat as leaf

        Node down{lb, ub, rel.objective, node.depth + 1, next_id++};
        down.ub(var) = 0.0;
        Node up{lb, ub, rel.objective, node.depth + 1, next_id++};
        up.lb(var) = 1.0;
        open.push(std::move(down));
        open.push(std::move(up));
    }

    res.nodes = nodes;
    res.has_incumbent = incumbent_obj < kInf;
    if (res.has_incumbent) {
        res.x = incumbent_x;
        res.objective = incumbent_obj;
        double bound = incumbent_obj;
        if (early_exit) {
            // Unexplored subtrees still carry the global bound.
            bound = std::min(bound, best_open_bound);
            if (!open.empty()) bound = std::min(bound, open.top().bound);
        }
        res.bound = bound;
        res.gap = (res.objective - res.bound) / std::max(1.0, std::abs(res.objective));
        if (res.status != MipStatus::NodeCapReached)
            res.status = MipStatus::Optimal;
    } else {
        if (res.status != MipStatus::NodeCapReached)
            res.status = trouble ? MipStatus::IterationTrouble : MipStatus::Infeasible;
        res.bound = -kInf;
        res.gap = kInf;
    }
    return res;
}

}  // namespace sgen::opt

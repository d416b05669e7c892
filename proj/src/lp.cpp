#include "sgen/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <vector>

#include "sgen/errors.hpp"

namespace sgen::opt {

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

// Bounded-variable two-phase primal simplex with a dense explicit basis
// inverse. Columns are: structural variables, one slack per inequality row,
// one artificial per row (phase 1 only). All tie-breaks are by lowest index
// so the solver is deterministic.
class Simplex {
  public:
    Simplex(const LpProblem& p, const SolverOptions& opts) : opts_(opts) {
        n_orig_ = p.num_vars();
        const int m_eq = static_cast<int>(p.b_eq.size());
        const int m_in = static_cast<int>(p.b_in.size());
        m_ = m_eq + m_in;
        n_struct_ = n_orig_ + m_in;
        n_total_ = n_struct_ + m_;

        A_.setZero(m_, n_total_);
        if (m_eq > 0) A_.block(0, 0, m_eq, n_orig_) = p.A_eq;
        if (m_in > 0) A_.block(m_eq, 0, m_in, n_orig_) = p.A_in;
        for (int i = 0; i < m_in; ++i) A_(m_eq + i, n_orig_ + i) = 1.0;

        b_.resize(m_);
        if (m_eq > 0) b_.head(m_eq) = p.b_eq;
        if (m_in > 0) b_.tail(m_in) = p.b_in;

        lo_.setConstant(n_total_, -kInf);
        hi_.setConstant(n_total_, kInf);
        lo_.head(n_orig_) = p.lb;
        hi_.head(n_orig_) = p.ub;
        for (int i = 0; i < m_in; ++i) {
            lo_(n_orig_ + i) = 0.0;
            hi_(n_orig_ + i) = kInf;
        }

        cost_.setZero(n_total_);
        cost_.head(n_orig_) = p.c;

        x_.setZero(n_total_);
        state_.assign(n_total_, VarState::AtLower);
        for (int j = 0; j < n_struct_; ++j) {
            if (std::isfinite(lo_(j))) {
                state_[j] = VarState::AtLower;
                x_(j) = lo_(j);
            } else if (std::isfinite(hi_(j))) {
                state_[j] = VarState::AtUpper;
                x_(j) = hi_(j);
            } else {
                state_[j] = VarState::FreeZero;
                x_(j) = 0.0;
            }
        }

        // Row residuals determine the sign of each artificial column.
        Eigen::VectorXd r = b_;
        for (int j = 0; j < n_struct_; ++j)
            if (x_(j) != 0.0) r -= A_.col(j) * x_(j);

        basis_.resize(m_);
        binv_ = Eigen::MatrixXd::Identity(m_, m_);
        for (int i = 0; i < m_; ++i) {
            const int aj = n_struct_ + i;
            const double s = (r(i) >= 0.0) ? 1.0 : -1.0;
            A_(i, aj) = s;
            lo_(aj) = 0.0;
            hi_(aj) = kInf;
            x_(aj) = std::abs(r(i));
            state_[aj] = VarState::Basic;
            basis_[i] = aj;
            binv_(i, i) = s;  // inverse of diag(signs)
        }
    }

    LpResult run() {
        LpResult res;

        // Phase 1: minimize the sum of artificials.
        Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n_total_);
        for (int j = n_struct_; j < n_total_; ++j) phase1_cost(j) = 1.0;
        LpStatus st = iterate(phase1_cost, /*phase1=*/true);
        if (st == LpStatus::IterationLimit) {
            res.status = st;
            res.iterations = iterations_;
            return res;
        }
        double infeas = 0.0;
        for (int j = n_struct_; j < n_total_; ++j) infeas += x_(j);
        const double bscale = (m_ > 0) ? b_.cwiseAbs().maxCoeff() : 0.0;
        if (infeas > 100.0 * opts_.feas_tol * (1.0 + bscale)) {
            res.status = LpStatus::Infeasible;
            res.iterations = iterations_;
            return res;
        }
        purge_artificials();
        for (int j = n_struct_; j < n_total_; ++j) hi_(j) = 0.0;

        // Phase 2: original objective.
        st = iterate(cost_, /*phase1=*/false);
        res.status = st;
        res.iterations = iterations_;
        if (st == LpStatus::Optimal) {
            refresh_basic_values();
            res.x = x_.head(n_orig_);
        }
        return res;
    }

  private:
    const SolverOptions& opts_;
    int n_orig_ = 0, m_ = 0, n_struct_ = 0, n_total_ = 0;
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_, lo_, hi_, cost_, x_;
    std::vector<VarState> state_;
    std::vector<int> basis_;
    Eigen::MatrixXd binv_;
    int iterations_ = 0;
    int degen_streak_ = 0;
    int since_refactor_ = 0;

    LpStatus iterate(const Eigen::VectorXd& c, bool phase1) {
        while (iterations_ < opts_.max_lp_iterations) {
            ++iterations_;
            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb(i) = c(basis_[i]);
            Eigen::RowVectorXd y = cb.transpose() * binv_;

            const bool bland = degen_streak_ > opts_.bland_trigger;
            int q = -1;
            int dir = 0;
            double best = 0.0;
            for (int j = 0; j < n_total_; ++j) {
                if (state_[j] == VarState::Basic) continue;
                if (lo_(j) >= hi_(j)) continue;  // fixed
                const double d = c(j) - y.dot(A_.col(j));
                int cand_dir = 0;
                if (state_[j] == VarState::AtLower && d < -opts_.opt_tol) cand_dir = +1;
                else if (state_[j] == VarState::AtUpper && d > opts_.opt_tol) cand_dir = -1;
                else if (state_[j] == VarState::FreeZero && std::abs(d) > opts_.opt_tol)
                    cand_dir = d < 0.0 ? +1 : -1;
                if (cand_dir == 0) continue;
                if (bland) { q = j; dir = cand_dir; break; }
                if (std::abs(d) > best + 1e-15) { best = std::abs(d); q = j; dir = cand_dir; }
            }
            if (q < 0) return LpStatus::Optimal;

            Eigen::VectorXd w = binv_ * A_.col(q);

            // Ratio test. The entering variable moves by t >= 0 in direction
            // dir; basic variable on row i changes by -dir*w(i)*t.
            double own_range = hi_(q) - lo_(q);
            double t_best = std::isfinite(own_range) ? own_range : kInf;
            int leave_row = -1;  // stays -1 for a bound flip
            int leave_bound = 0;
            for (int i = 0; i < m_; ++i) {
                const double delta = -dir * w(i);
                if (std::abs(delta) < opts_.pivot_tol) continue;
                const int bi = basis_[i];
                double limit;
                int bnd;
                if (delta > 0) {
                    if (!std::isfinite(hi_(bi))) continue;
                    limit = (hi_(bi) - x_(bi)) / delta;
                    bnd = +1;
                } else {
                    if (!std::isfinite(lo_(bi))) continue;
                    limit = (lo_(bi) - x_(bi)) / delta;
                    bnd = -1;
                }
                if (limit < 0.0) limit = 0.0;  // clamp tiny negative drift
                bool take = false;
                if (limit < t_best - 1e-12) {
                    take = true;
                } else if (limit <= t_best + 1e-12 && leave_row >= 0) {
                    // Tie: prefer the larger pivot, then the lower var index.
                    const double cur = std::abs(w(leave_row));
                    if (std::abs(w(i)) > cur + 1e-12) take = true;
                    else if (std::abs(w(i)) > cur - 1e-12 && basis_[i] < basis_[leave_row])
                        take = true;
                }
                if (take) {
                    t_best = std::min(t_best, limit);
                    leave_row = i;
                    leave_bound = bnd;
                }
            }

            if (!std::isfinite(t_best)) {
                return phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
            }

            degen_streak_ = (t_best <= opts_.feas_tol) ? degen_streak_ + 1 : 0;

            for (int i = 0; i < m_; ++i) x_(basis_[i]) += -dir * w(i) * t_best;
            x_(q) += dir * t_best;

            if (leave_row < 0) {
                // Bound flip of the entering variable; basis unchanged.
                state_[q] = (dir > 0) ? VarState::AtUpper : VarState::AtLower;
                x_(q) = (dir > 0) ? hi_(q) : lo_(q);
                continue;
            }

            const int leaving = basis_[leave_row];
            state_[leaving] = (leave_bound > 0) ? VarState::AtUpper : VarState::AtLower;
            x_(leaving) = (leave_bound > 0) ? hi_(leaving) : lo_(leaving);
            state_[q] = VarState::Basic;
            basis_[leave_row] = q;

            // Product-form update of the basis inverse.
            const double piv = w(leave_row);
            binv_.row(leave_row) /= piv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave_row) continue;
                const double f = w(i);
                if (f != 0.0) binv_.row(i) -= f * binv_.row(leave_row);
            }

            if (++since_refactor_ >= opts_.refactor_interval) refactorize();
        }
        return LpStatus::IterationLimit;
    }

    void refactorize() {
        since_refactor_ = 0;
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basis_[i]);
        binv_ = B.partialPivLu().inverse();
        refresh_basic_values();
    }

    void refresh_basic_values() {
        if (m_ == 0) return;
        Eigen::VectorXd rhs = b_;
        for (int j = 0; j < n_total_; ++j)
            if (state_[j] != VarState::Basic && x_(j) != 0.0) rhs -= A_.col(j) * x_(j);
        Eigen::VectorXd xb = binv_ * rhs;
        for (int i = 0; i < m_; ++i) x_(basis_[i]) = xb(i);
    }

    // Pivot zero-valued basic artificials out of the basis where possible so
    // phase 2 cannot move them. Rows with no eligible pivot are redundant and
    // keep their artificial fixed at zero.
    void purge_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_struct_) continue;
            Eigen::RowVectorXd row = binv_.row(i) * A_.leftCols(n_struct_);
            int q = -1;
            for (int j = 0; j < n_struct_; ++j) {
                if (state_[j] == VarState::Basic) continue;
                if (std::abs(row(j)) > 1e-7) { q = j; break; }
            }
            if (q < 0) continue;
            const int art = basis_[i];
            Eigen::VectorXd w = binv_ * A_.col(q);
            const double piv = w(i);
            state_[art] = VarState::AtLower;
            x_(art) = 0.0;
            state_[q] = VarState::Basic;
            basis_[i] = q;
            binv_.row(i) /= piv;
            for (int r = 0; r < m_; ++r) {
                if (r == i) continue;
                const double f = w(r);
                if (f != 0.0) binv_.row(r) -= f * binv_.row(i);
            }
            refresh_basic_values();
        }
    }
};

}  // namespace

void LpProblem::validate() const {
    const int n = num_vars();
    auto fail = [](const std::string& what) { throw DimensionMismatch("LpProblem: " + what); };
    if (A_eq.size() > 0 && (A_eq.cols() != n || A_eq.rows() != b_eq.size()))
        fail("A_eq/b_eq shape");
    if (A_eq.size() == 0 && b_eq.size() > 0) fail("b_eq without A_eq");
    if (A_in.size() > 0 && (A_in.cols() != n || A_in.rows() != b_in.size()))
        fail("A_in/b_in shape");
    if (A_in.size() == 0 && b_in.size() > 0) fail("b_in without A_in");
    if (lb.size() != n || ub.size() != n) fail("bound length");
    for (int j = 0; j < n; ++j)
        if (lb(j) > ub(j)) fail("lb > ub at variable " + std::to_string(j));
}

LpProblem LpProblem::with_free_bounds(int n) {
    LpProblem p;
    p.c = Eigen::VectorXd::Zero(n);
    p.lb = Eigen::VectorXd::Constant(n, -kInf);
    p.ub = Eigen::VectorXd::Constant(n, kInf);
    return p;
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::IterationLimit: return "IterationLimit";
    }
    return "?";
}

LpResult solve_lp(const LpProblem& p, const SolverOptions& opts) {
    p.validate();
    const int n = p.num_vars();
    if (n == 0) {
        LpResult r;
        r.status = LpStatus::Optimal;
        r.x.resize(0);
        r.objective = 0.0;
        return r;
    }
    Simplex s(p, opts);
    LpResult r = s.run();
    if (r.status == LpStatus::Optimal) r.objective = p.c.dot(r.x);
    return r;
}

namespace {
void dump_matrix(std::ostream& os, const char* tag, const Eigen::MatrixXd& M) {
    os << tag << " " << M.rows() << " " << M.cols() << "\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << M(i, j) << (j + 1 < M.cols() ? " " : "");
        os << "\n";
    }
}
// Token-based double parsing: istream's operator>> rejects "inf".
double read_double(std::istream& is) {
    std::string tok;
    is >> tok;
    if (!is) throw IOError("matrix dump: truncated");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw IOError("matrix dump: bad number '" + tok + "'");
    return v;
}

Eigen::MatrixXd load_matrix(std::istream& is, const std::string& expect) {
    std::string tag;
    Eigen::Index r = 0, c = 0;
    is >> tag >> r >> c;
    if (tag != expect) throw IOError("lp dump: expected '" + expect + "', got '" + tag + "'");
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = read_double(is);
    return M;
}
}  // namespace

void dump_lp(const LpProblem& p, std::ostream& os) {
    os << "lp 1\n";
    dump_matrix(os, "c", p.c);
    dump_matrix(os, "A_eq", p.A_eq);
    dump_matrix(os, "b_eq", p.b_eq);
    dump_matrix(os, "A_in", p.A_in);
    dump_matrix(os, "b_in", p.b_in);
    dump_matrix(os, "lb", p.lb);
    dump_matrix(os, "ub", p.ub);
}

LpProblem load_lp(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "lp" || version != 1) throw IOError("lp dump: bad header");
    LpProblem p;
    p.c = load_matrix(is, "c");
    p.A_eq = load_matrix(is, "A_eq");
    p.b_eq = load_matrix(is, "b_eq");
    p.A_in = load_matrix(is, "A_in");
    p.b_in = load_matrix(is, "b_in");
    p.lb = load_matrix(is, "lb");
    p.ub = load_matrix(is, "ub");
    return p;
}

}  // namespace sgen::opt

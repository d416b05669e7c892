#include "sgen/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <vector>

#include "sgen/errors.hpp"
#include "sgen/lp.hpp"

namespace sgen::opt {

namespace {

// Inequality system with bounds folded into explicit rows.
struct Folded {
    Eigen::MatrixXd A_in;
    Eigen::VectorXd b_in;
    int orig_rows = 0;  // rows coming from p.A_in (multipliers reported for these)
};

Folded fold_bounds(const QpProblem& p) {
    const int n = p.num_vars();
    Folded f;
    f.orig_rows = static_cast<int>(p.b_in.size());
    std::vector<std::pair<Eigen::RowVectorXd, double>> extra;
    if (p.lb.size() == n) {
        for (int j = 0; j < n; ++j)
            if (std::isfinite(p.lb(j))) {
                Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
                r(j) = -1.0;
                extra.emplace_back(r, -p.lb(j));
            }
    }
    if (p.ub.size() == n) {
        for (int j = 0; j < n; ++j)
            if (std::isfinite(p.ub(j))) {
                Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
                r(j) = 1.0;
                extra.emplace_back(r, p.ub(j));
            }
    }
    const int m = f.orig_rows + static_cast<int>(extra.size());
    f.A_in.resize(m, n);
    f.b_in.resize(m);
    if (f.orig_rows > 0) {
        f.A_in.topRows(f.orig_rows) = p.A_in;
        f.b_in.head(f.orig_rows) = p.b_in;
    }
    for (size_t i = 0; i < extra.size(); ++i) {
        f.A_in.row(f.orig_rows + static_cast<int>(i)) = extra[i].first;
        f.b_in(f.orig_rows + static_cast<int>(i)) = extra[i].second;
    }
    return f;
}

Eigen::VectorXd find_feasible_point(const QpProblem& p, const SolverOptions& opts) {
    LpProblem lp;
    const int n = p.num_vars();
    lp.c = Eigen::VectorXd::Zero(n);
    lp.A_eq = p.A_eq;
    lp.b_eq = p.b_eq;
    lp.A_in = p.A_in;
    lp.b_in = p.b_in;
    lp.lb = (p.lb.size() == n) ? p.lb : Eigen::VectorXd::Constant(n, -kInf);
    lp.ub = (p.ub.size() == n) ? p.ub : Eigen::VectorXd::Constant(n, kInf);
    LpResult r = solve_lp(lp, opts);
    if (r.status != LpStatus::Optimal) return Eigen::VectorXd();
    return r.x;
}

}  // namespace

void QpProblem::validate() const {
    const int n = num_vars();
    auto fail = [](const char* what) { throw DimensionMismatch(std::string("QpProblem: ") + what); };
    if (H.rows() != n || H.cols() != n) fail("H shape");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + H.cwiseAbs().maxCoeff()))
        fail("H not symmetric");
    if (A_eq.size() > 0 && (A_eq.cols() != n || A_eq.rows() != b_eq.size())) fail("A_eq shape");
    if (A_in.size() > 0 && (A_in.cols() != n || A_in.rows() != b_in.size())) fail("A_in shape");
    if (lb.size() != 0 && lb.size() != n) fail("lb length");
    if (ub.size() != 0 && ub.size() != n) fail("ub length");
    // PSD check by factorization of H + tiny shift.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H + 1e-12 * Eigen::MatrixXd::Identity(n, n));
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() < -1e-8).any())
        fail("H not positive semidefinite");
}

const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "Optimal";
        case QpStatus::Infeasible: return "Infeasible";
        case QpStatus::MaxIter: return "MaxIter";
    }
    return "?";
}

QpResult solve_qp(const QpProblem& p, const SolverOptions& opts, const Eigen::VectorXd* warm_x) {
    p.validate();
    const int n = p.num_vars();
    const Folded f = fold_bounds(p);
    const int m_eq = static_cast<int>(p.b_eq.size());
    const int m_in = static_cast<int>(f.b_in.size());

    QpResult res;

    auto feasible = [&](const Eigen::VectorXd& x) {
        const double tol = 1e-8;
        if (m_eq > 0 && (p.A_eq * x - p.b_eq).cwiseAbs().maxCoeff() > tol) return false;
        if (m_in > 0 && ((f.A_in * x - f.b_in).array() > tol).any()) return false;
        return true;
    };

    Eigen::VectorXd x;
    if (warm_x && warm_x->size() == n && feasible(*warm_x)) {
        x = *warm_x;
    } else {
        x = find_feasible_point(p, opts);
        if (x.size() == 0) {
            res.status = QpStatus::Infeasible;
            return res;
        }
    }

    // Working set: all equalities plus a rank-preserving subset of the
    // active inequalities.
    std::vector<int> work;  // indices into folded inequality rows
    std::vector<char> in_work(m_in, 0);

    auto stacked = [&](const std::vector<int>& w) {
        Eigen::MatrixXd W(m_eq + static_cast<int>(w.size()), n);
        if (m_eq > 0) W.topRows(m_eq) = p.A_eq;
        for (size_t i = 0; i < w.size(); ++i) W.row(m_eq + static_cast<int>(i)) = f.A_in.row(w[i]);
        return W;
    };

    auto rank_of = [&](const Eigen::MatrixXd& M) {
        if (M.rows() == 0) return 0;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M.transpose());
        qr.setThreshold(1e-10);
        return static_cast<int>(qr.rank());
    };

    for (int i = 0; i < m_in; ++i) {
        if (std::abs(f.A_in.row(i).dot(x) - f.b_in(i)) < 1e-9) {
            work.push_back(i);
            if (rank_of(stacked(work)) < m_eq + static_cast<int>(work.size())) work.pop_back();
            else in_work[i] = 1;
        }
    }

    Eigen::VectorXd lambda_work;
    int iter = 0;
    for (; iter < opts.max_qp_iterations; ++iter) {
        const Eigen::MatrixXd W = stacked(work);
        const int mw = static_cast<int>(W.rows());
        const Eigen::VectorXd g = p.H * x + p.c;

        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        if (mw < n) {
            Eigen::MatrixXd Z;
            if (mw == 0) {
                Z = Eigen::MatrixXd::Identity(n, n);
            } else {
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> cqr(W.transpose());
                cqr.setThreshold(1e-10);
                const int r = static_cast<int>(cqr.rank());
                Eigen::MatrixXd Q = cqr.householderQ();
                Z = Q.rightCols(n - r);
            }
            Eigen::MatrixXd Hr = Z.transpose() * p.H * Z;
            Eigen::VectorXd gr = Z.transpose() * g;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
            Eigen::VectorXd pz;
            if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 1e-12).all()) {
                pz = ldlt.solve(-gr);
            } else {
                // PSD-singular reduced Hessian: regularize mildly.
                double shift = 1e-10 * (1.0 + Hr.trace() / std::max(1, (int)Hr.rows()));
                pz = (Hr + shift * Eigen::MatrixXd::Identity(Hr.rows(), Hr.cols())).ldlt().solve(-gr);
            }
            step = Z * pz;
        }

        if (step.cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + x.cwiseAbs().maxCoeff())) {
            // Stationary on the working set: check multipliers.
            Eigen::VectorXd lam;
            if (mw > 0) {
                lam = W.transpose().colPivHouseholderQr().solve(-g);
            }
            int drop = -1;
            double most_neg = -opts.opt_tol * (1.0 + g.cwiseAbs().maxCoeff());
            for (size_t i = 0; i < work.size(); ++i) {
                const double l = lam(m_eq + static_cast<int>(i));
                if (l < most_neg) {
                    most_neg = l;
                    drop = static_cast<int>(i);
                }
            }
            if (drop < 0) {
                res.status = QpStatus::Optimal;
                res.x = x;
                res.objective = 0.5 * x.dot(p.H * x) + p.c.dot(x);
                res.lambda_eq = (m_eq > 0) ? Eigen::VectorXd(lam.head(m_eq)) : Eigen::VectorXd();
                res.lambda_in = Eigen::VectorXd::Zero(f.orig_rows);
                for (size_t i = 0; i < work.size(); ++i)
                    if (work[i] < f.orig_rows) res.lambda_in(work[i]) = lam(m_eq + static_cast<int>(i));
                // KKT residual: stationarity + feasibility + complementarity.
                Eigen::VectorXd stat = g;
                if (mw > 0) stat += W.transpose() * lam;
                double r_stat = (n > 0) ? stat.cwiseAbs().maxCoeff() : 0.0;
                double r_feas = 0.0;
                if (m_eq > 0) r_feas = (p.A_eq * x - p.b_eq).cwiseAbs().maxCoeff();
                if (m_in > 0)
                    r_feas = std::max(r_feas, (f.A_in * x - f.b_in).cwiseMax(0.0).maxCoeff());
                res.kkt_residual = std::max(r_stat, r_feas);
                res.iterations = iter + 1;
                return res;
            }
            in_work[work[drop]] = 0;
            work.erase(work.begin() + drop);
            continue;
        }

        // Ratio test against inactive inequalities.
        double alpha = 1.0;
        int blocking = -1;
        for (int i = 0; i < m_in; ++i) {
            if (in_work[i]) continue;
            const double ap = f.A_in.row(i).dot(step);
            if (ap <= 1e-12) continue;
            const double slack = f.b_in(i) - f.A_in.row(i).dot(x);
            const double a = std::max(slack, 0.0) / ap;
            if (a < alpha - 1e-14) {
                alpha = a;
                blocking = i;
            }
        }
        x += alpha * step;
        if (blocking >= 0) {
            work.push_back(blocking);
            in_work[blocking] = 1;
        }
    }

    res.status = QpStatus::MaxIter;
    res.x = x;
    res.objective = 0.5 * x.dot(p.H * x) + p.c.dot(x);
    res.iterations = iter;
    return res;
}

void dump_qp(const QpProblem& p, std::ostream& os) {
    os << "qp 1\n";
    auto put = [&os](const char* tag, const Eigen::MatrixXd& M) {
        os << tag << " " << M.rows() << " " << M.cols() << "\n";
        os.precision(17);
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                os << M(i, j) << (j + 1 < M.cols() ? " " : "");
            os << "\n";
        }
    };
    put("H", p.H);
    put("c", p.c);
    put("A_eq", p.A_eq);
    put("b_eq", p.b_eq);
    put("A_in", p.A_in);
    put("b_in", p.b_in);
    put("lb", p.lb);
    put("ub", p.ub);
}

QpProblem load_qp(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "qp" || version != 1) throw IOError("qp dump: bad header");
    auto get = [&is](const std::string& expect) {
        std::string t;
        Eigen::Index r = 0, c = 0;
        is >> t >> r >> c;
        if (t != expect) throw IOError("qp dump: expected '" + expect + "'");
        Eigen::MatrixXd M(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) {
                std::string tok;
                is >> tok;
                if (!is) throw IOError("qp dump: truncated matrix " + expect);
                char* end = nullptr;
                M(i, j) = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str()) throw IOError("qp dump: bad number '" + tok + "'");
            }
        return M;
    };
    QpProblem p;
    p.H = get("H");
    p.c = get("c");
    p.A_eq = get("A_eq");
    p.b_eq = get("b_eq");
    p.A_in = get("A_in");
    p.b_in = get("b_in");
    p.lb = get("lb");
    p.ub = get("ub");
    return p;
}

}  // namespace sgen::opt

#include "sgen/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sgen/errors.hpp"

namespace sgen {

namespace {

double max_root_modulus(const Eigen::VectorXd& f) {
    const int nf = static_cast<int>(f.size());
    if (nf == 0) return 0.0;
    // Roots of z^nf + f_1 z^{nf-1} + ... + f_nf via the companion matrix.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(nf, nf);
    for (int j = 0; j < nf; ++j) comp(0, j) = -f(j);
    for (int i = 1; i < nf; ++i) comp(i, i - 1) = 1.0;
    return comp.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

bool AffineModel::is_schur(double margin) const {
    return max_root_modulus(f) < 1.0 - margin;
}

void AffineModel::validate() const {
    if (nb() < 1 || nf() < 1) throw SchemaError("AffineModel: need nb >= 1 and nf >= 1");
    if (!(T_M > 0.0)) throw SchemaError("AffineModel: T_M must be positive");
    if (!is_schur())
        throw UnstableFit("AffineModel: denominator not Schur stable (max |root| = " +
                          std::to_string(max_root_modulus(f)) + ")");
    if (std::abs(static_gain()) < 1e-12)
        throw SchemaError("AffineModel: static gain must be nonzero");
}

Eigen::VectorXd AffineModel::simulate(const Eigen::VectorXd& u) const {
    const int N = static_cast<int>(u.size());
    const int nbb = nb(), nff = nf();
    const double g = static_gain();
    Eigen::VectorXd dy(N);
    auto dy_at = [&](int k) { return k < 0 ? g * u(0) : dy(k); };
    auto u_at = [&](int k) { return k < 0 ? u(0) : u(k); };
    for (int k = 0; k < N; ++k) {
        double v = 0.0;
        for (int j = 1; j <= nff; ++j) v -= f(j - 1) * dy_at(k - j);
        for (int j = 1; j <= nbb; ++j) v += b(j - 1) * u_at(k - j);
        dy(k) = v;
    }
    return dy.array() + gamma;
}

double CanonicalSS::static_gain() const {
    const int n = order();
    return (C * (Eigen::MatrixXd::Identity(n, n) - A).partialPivLu().solve(B))(0);
}

CanonicalSS realize(const AffineModel& m) {
    m.validate();
    const int nf = m.nf(), nb = m.nb();
    const int n = nf + nb - 1;
    CanonicalSS ss;
    ss.nf = nf;
    ss.nb = nb;
    ss.gamma = m.gamma;
    ss.A = Eigen::MatrixXd::Zero(n, n);
    ss.B = Eigen::VectorXd::Zero(n);
    ss.C = Eigen::RowVectorXd::Zero(n);
    ss.C(0) = 1.0;

    for (int j = 0; j < nf; ++j) ss.A(0, j) = -m.f(j);
    for (int j = 2; j <= nb; ++j) ss.A(0, nf + j - 2) = m.b(j - 1);
    for (int i = 1; i < nf; ++i) ss.A(i, i - 1) = 1.0;       // dy lag shift
    for (int i = nf + 1; i < n; ++i) ss.A(i, i - 1) = 1.0;   // u lag shift
    ss.B(0) = m.b(0);
    if (nb >= 2) ss.B(nf) = 1.0;  // stores u(k) into the u(k-1) slot
    return ss;
}

AffineModel read_back(const CanonicalSS& ss, double T_M) {
    AffineModel m;
    m.T_M = T_M;
    m.gamma = ss.gamma;
    m.f.resize(ss.nf);
    for (int j = 0; j < ss.nf; ++j) m.f(j) = -ss.A(0, j);
    m.b.resize(ss.nb);
    m.b(0) = ss.B(0);
    for (int j = 2; j <= ss.nb; ++j) m.b(j - 1) = ss.A(0, ss.nf + j - 2);
    return m;
}

Dataset excite_and_collect(ClosedLoopBoiler boiler, const StepDesign& design, double h_f) {
    if (design.levels.empty()) throw SchemaError("excite_and_collect: empty step design");
    if (!(design.T_M > 0.0) || !(design.hold_s > 0.0))
        throw SchemaError("excite_and_collect: T_M and hold_s must be positive");
    const int per_sample = static_cast<int>(std::round(design.T_M / boiler.tau));
    if (per_sample < 1 || std::abs(per_sample * boiler.tau - design.T_M) > 1e-9)
        throw SchemaError("excite_and_collect: T_M must be an integer multiple of tau");
    const int samples_per_level = static_cast<int>(std::round(design.hold_s / design.T_M));

    const int N = samples_per_level * static_cast<int>(design.levels.size());
    Dataset data;
    data.T_M = design.T_M;
    data.u.resize(N);
    data.y.resize(N);
    int k = 0;
    double q_g = boiler.last_q_g;
    for (double level : design.levels) {
        for (int s = 0; s < samples_per_level; ++s) {
            // y(k) is the fuel command at the sample instant; the level is
            // then held for the whole T_M interval.
            data.u(k) = level;
            data.y(k) = q_g;
            for (int i = 0; i < per_sample; ++i) q_g = cl_step(boiler, level, h_f);
            ++k;
        }
    }
    return data;
}

namespace {

struct Regression {
    Eigen::VectorXd theta;  // [b_1..b_nb, f_1..f_nf, gamma]
    int nb, nf;
};

AffineModel unpack(const Eigen::VectorXd& theta, int nb, int nf, double T_M) {
    AffineModel m;
    m.b = theta.segment(0, nb);
    m.f = theta.segment(nb, nf);
    m.gamma = theta(nb + nf);
    m.T_M = T_M;
    return m;
}

double sim_error(const Eigen::VectorXd& theta, int nb, int nf, const Dataset& d) {
    AffineModel m = unpack(theta, nb, nf, d.T_M);
    if (max_root_modulus(m.f) >= 1.0) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd yhat = m.simulate(d.u);
    return (d.y - yhat).squaredNorm();
}

}  // namespace

IdentifyResult identify(const Dataset& data, int nb, int nf, const IdentifyOptions& opts) {
    const int N = static_cast<int>(data.u.size());
    if (data.y.size() != N) throw DimensionMismatch("identify: u/y length mismatch");
    if (nb < 1 || nf < 1) throw SchemaError("identify: nb and nf must be >= 1");
    if (N <= 10 * (nb + nf))
        throw RankDeficient("identify: dataset shorter than 10*(nb+nf) samples");
    {
        std::set<long long> levels;
        for (int k = 0; k < N; ++k)
            levels.insert(static_cast<long long>(std::llround(data.u(k) * 1e9)));
        if (static_cast<int>(levels.size()) < std::min(nb + nf, 2))
            throw RankDeficient("identify: input not persistently exciting (needs >= " +
                                std::to_string(nb + nf) + " distinct levels)");
    }

    // Equation-error least squares: y(k) on [-y(k-1..nf), u(k-1..nb), 1].
    const int k0 = std::max(nb, nf);
    const int rows = N - k0;
    const int cols = nb + nf + 1;
    Eigen::MatrixXd Phi(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (int k = k0; k < N; ++k) {
        const int r = k - k0;
        for (int j = 1; j <= nb; ++j) Phi(r, j - 1) = data.u(k - j);
        for (int j = 1; j <= nf; ++j) Phi(r, nb + j - 1) = -data.y(k - j);
        Phi(r, nb + nf) = 1.0;
        rhs(r) = data.y(k);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Phi);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols)
        throw RankDeficient("identify: regressor rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(cols));
    Eigen::VectorXd ls = qr.solve(rhs);

    Eigen::VectorXd theta(cols);
    theta.segment(0, nb) = ls.segment(0, nb);
    theta.segment(nb, nf) = ls.segment(nb, nf);
    const double one_plus_f = 1.0 + theta.segment(nb, nf).sum();
    theta(nb + nf) = (std::abs(one_plus_f) > 1e-12) ? ls(nb + nf) / one_plus_f : 0.0;

    if (max_root_modulus(theta.segment(nb, nf)) >= 1.0 - opts.schur_margin)
        throw UnstableFit("identify: equation-error fit has a pole on/outside the unit circle");

    // Output-error refinement by finite-difference gradient descent with
    // backtracking; steps that leave the Schur region are rejected.
    double J = sim_error(theta, nb, nf, data);
    double step_scale = 1.0;
    for (int it = 0; it < opts.max_refine_iterations; ++it) {
        Eigen::VectorXd grad(cols);
        for (int i = 0; i < cols; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(theta(i)));
            Eigen::VectorXd tp = theta, tm = theta;
            tp(i) += h;
            tm(i) -= h;
            grad(i) = (sim_error(tp, nb, nf, data) - sim_error(tm, nb, nf, data)) / (2.0 * h);
        }
        const double gn = grad.norm();
        if (gn < 1e-14) break;
        double alpha = step_scale * std::max(1.0, theta.norm()) / gn * 0.1;
        bool accepted = false;
        for (int bt = 0; bt < 20; ++bt) {
            Eigen::VectorXd cand = theta - alpha * grad;
            const double Jc = sim_error(cand, nb, nf, data);
            if (Jc < J - 1e-15) {
                theta = cand;
                J = Jc;
                accepted = true;
                step_scale = std::min(step_scale * 2.0, 1.0);
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        if (J < opts.objective_tol * rows) break;
    }

    AffineModel m = unpack(theta, nb, nf, data.T_M);
    if (!m.is_schur(opts.schur_margin))
        throw UnstableFit("identify: refined model not Schur stable");
    m.validate();

    IdentifyResult out;
    out.model = m;
    const Eigen::VectorXd yhat = m.simulate(data.u);
    const double denom = (data.y.array() - data.y.mean()).matrix().norm();
    out.fit = (denom > 0) ? 1.0 - (data.y - yhat).norm() / denom : 1.0;
    return out;
}

IdentifyResult identify_best_order(const Dataset& data, int max_order,
                                   const IdentifyOptions& opts) {
    const int N = static_cast<int>(data.u.size());
    const int split = (3 * N) / 4;
    Dataset train{data.u.head(split), data.y.head(split), data.T_M};

    IdentifyResult best;
    best.fit = -std::numeric_limits<double>::infinity();
    for (int nf = 1; nf <= max_order; ++nf) {
        for (int nb = 1; nb <= max_order; ++nb) {
            IdentifyResult r;
            try {
                r = identify(train, nb, nf, opts);
            } catch (const Error&) {
                continue;
            }
            // Validation fit on the held-out tail (free run over everything).
            const Eigen::VectorXd yhat = r.model.simulate(data.u);
            const Eigen::VectorXd ytail = data.y.tail(N - split);
            const Eigen::VectorXd etail = (data.y - yhat).tail(N - split);
            const double denom = (ytail.array() - ytail.mean()).matrix().norm();
            const double vfit = (denom > 0) ? 1.0 - etail.norm() / denom : 1.0;
            if (vfit > best.fit + 1e-9) {
                best = r;
                best.fit = vfit;
            }
        }
    }
    if (!std::isfinite(best.fit) || best.fit == -std::numeric_limits<double>::infinity())
        throw UnstableFit("identify_best_order: no stable model in the sweep");
    return best;
}

}  // namespace sgen

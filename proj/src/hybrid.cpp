#include "sgen/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "sgen/errors.hpp"
#include "sgen/mip.hpp"

namespace sgen {

namespace {
// delta layout
constexpr int D_OFFST = 0;  // [chi >= chi_off_st]
constexpr int D_STON = 1;   // [chi >= chi_st_on]
constexpr int D_ONOFF = 2;  // [chi >= chi_on_off]
constexpr int D_CAP = 3;    // [chi >= chi_cap]
constexpr int T_OFFST = 4;  // OFF -> ST fires
constexpr int T_STON = 5;   // ST -> ON fires
constexpr int T_ONOFF = 6;  // ON -> OFF fires
// x layout
constexpr int X_CHI = 0;
constexpr int X_OFF = 1;
constexpr int X_ST = 2;
constexpr int X_ON = 3;
// u layout
constexpr int U_BETA = 0;
constexpr int U_QS = 1;
}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::OFF: return "OFF";
        case Mode::ST: return "ST";
        case Mode::ON: return "ON";
    }
    return "?";
}

void HybridGenModel::validate() const {
    auto fail = [](const std::string& w) { throw SchemaError("HybridGenModel: " + w); };
    if (chi_off_st < 0 || chi_st_on < 0 || chi_on_off < 0) fail("thresholds must be >= 0");
    if (chi_cap < std::max({chi_off_st, chi_st_on, chi_on_off}) + 1)
        fail("chi_cap must exceed every threshold");
    if (gamma_st < 0.0) fail("gamma_st must be >= 0");
    if (!(q_s_min <= q_s_max)) fail("q_s_min must be <= q_s_max");
    if (q_s_min < 0.0) fail("q_s_min must be >= 0");
    if (g == 0.0) fail("g must be nonzero");
}

DhaResult dha_step(const HybridGenModel& m, const HybridState& s, bool beta, double q_s) {
    if (s.mode == Mode::ON) {
        if (q_s < m.q_s_min - 1e-9 || q_s > m.q_s_max + 1e-9)
            throw InvalidInput("dha_step: q_s outside ON bounds");
    } else if (q_s != 0.0) {
        throw InvalidInput("dha_step: q_s must be zero outside ON");
    }

    DhaResult r;
    switch (s.mode) {
        case Mode::ON: r.q_g = m.g * q_s + m.gamma_on; break;
        case Mode::ST: r.q_g = m.gamma_st; break;
        case Mode::OFF: r.q_g = 0.0; break;
    }

    bool fires = false;
    Mode next = s.mode;
    switch (s.mode) {
        case Mode::OFF:
            if (s.chi >= m.chi_off_st && beta) { fires = true; next = Mode::ST; }
            break;
        case Mode::ST:
            if (s.chi >= m.chi_st_on) { fires = true; next = Mode::ON; }
            break;
        case Mode::ON:
            if (s.chi >= m.chi_on_off && beta) { fires = true; next = Mode::OFF; }
            break;
    }
    r.state.mode = next;
    r.state.chi = fires ? 0 : std::min(s.chi + 1, m.chi_cap);
    return r;
}

namespace {

MLDModel build_mld(const HybridGenModel& m) {
    MLDModel mld;
    const double cap = static_cast<double>(m.chi_cap);
    mld.chi_cap = cap;

    // Dynamics. The +1 of the dwell update rides on the mode one-hot sum so
    // the state update stays strictly linear (no affine term in this form).
    mld.A.setZero(4, 4);
    mld.A(X_CHI, X_CHI) = 1.0;
    mld.A(X_CHI, X_OFF) = 1.0;
    mld.A(X_CHI, X_ST) = 1.0;
    mld.A(X_CHI, X_ON) = 1.0;
    mld.A(X_OFF, X_OFF) = 1.0;
    mld.A(X_ST, X_ST) = 1.0;
    mld.A(X_ON, X_ON) = 1.0;
    mld.B_u.setZero(4, 2);
    mld.B_z.setZero(4, 1);
    mld.B_z(X_CHI, 0) = -1.0;
    mld.B_delta.setZero(4, 7);
    mld.B_delta(X_CHI, D_CAP) = -1.0;
    mld.B_delta(X_OFF, T_OFFST) = -1.0;
    mld.B_delta(X_OFF, T_ONOFF) = 1.0;
    mld.B_delta(X_ST, T_OFFST) = 1.0;
    mld.B_delta(X_ST, T_STON) = -1.0;
    mld.B_delta(X_ON, T_STON) = 1.0;
    mld.B_delta(X_ON, T_ONOFF) = -1.0;

    // Output: q_g = g q_s + gamma_on x_ON + gamma_st x_ST.
    mld.C.setZero(4);
    mld.C(X_ST) = m.gamma_st;
    mld.C(X_ON) = m.gamma_on;
    mld.D_u.setZero(2);
    mld.D_u(U_QS) = m.g;
    mld.D_z.setZero(1);
    mld.D_delta.setZero(7);

    // Inequality system.
    std::vector<Eigen::VectorXd> ex, eu, ez, ed;
    std::vector<double> aff;
    auto row = [&](double rhs) {
        ex.push_back(Eigen::VectorXd::Zero(4));
        eu.push_back(Eigen::VectorXd::Zero(2));
        ez.push_back(Eigen::VectorXd::Zero(1));
        ed.push_back(Eigen::VectorXd::Zero(7));
        aff.push_back(rhs);
        return static_cast<int>(aff.size()) - 1;
    };

    // One-hot mode partition.
    {
        int r = row(1.0);
        ex[r](X_OFF) = ex[r](X_ST) = ex[r](X_ON) = 1.0;
        r = row(-1.0);
        ex[r](X_OFF) = ex[r](X_ST) = ex[r](X_ON) = -1.0;
    }

    // Threshold indicators: delta = [chi >= tau] on the integer dwell grid.
    auto threshold = [&](int d, int tau) {
        int r = row(0.0);  // tau*delta - chi <= 0
        ed[r](d) = static_cast<double>(tau);
        ex[r](X_CHI) = -1.0;
        r = row(static_cast<double>(tau) - 1.0);  // chi - (cap-tau+1)*delta <= tau-1
        ex[r](X_CHI) = 1.0;
        ed[r](d) = -(cap - static_cast<double>(tau) + 1.0);
    };
    threshold(D_OFFST, m.chi_off_st);
    threshold(D_STON, m.chi_st_on);
    threshold(D_ONOFF, m.chi_on_off);
    threshold(D_CAP, m.chi_cap);

    // Transition flags as exact ANDs of mode, threshold and (where guarded)
    // the binary command.
    auto and3 = [&](int t, int xmode, int d, bool with_beta) {
        int r = row(0.0);
        ed[r](t) = 1.0;
        ex[r](xmode) = -1.0;
        r = row(0.0);
        ed[r](t) = 1.0;
        ed[r](d) = -1.0;
        if (with_beta) {
            r = row(0.0);
            ed[r](t) = 1.0;
            eu[r](U_BETA) = -1.0;
        }
        r = row(with_beta ? 2.0 : 1.0);
        ex[r](xmode) = 1.0;
        ed[r](d) = 1.0;
        if (with_beta) eu[r](U_BETA) = 1.0;
        ed[r](t) += -1.0;
    };
    and3(T_OFFST, X_OFF, D_OFFST, true);
    and3(T_STON, X_ST, D_STON, false);
    and3(T_ONOFF, X_ON, D_ONOFF, true);

    // z = (t1+t2+t3) * (chi + 1 - delta_cap); the saturated successor dwell
    // chi+1-delta_cap lies in [1, cap]. McCormick envelope is exact here.
    {
        const double L = 1.0, U = cap;
        int r = row(0.0);  // z <= U * t_any
        ez[r](0) = 1.0;
        ed[r](T_OFFST) = ed[r](T_STON) = ed[r](T_ONOFF) = -U;
        r = row(0.0);  // L * t_any <= z
        ez[r](0) = -1.0;
        ed[r](T_OFFST) = ed[r](T_STON) = ed[r](T_ONOFF) = L;
        r = row(0.0);  // z <= v - L(1 - t_any), v = chi + 1 - delta_cap
        ez[r](0) = 1.0;
        ex[r](X_CHI) = -1.0;
        ed[r](D_CAP) = 1.0;
        ed[r](T_OFFST) = ed[r](T_STON) = ed[r](T_ONOFF) = -L;
        r = row(U - 1.0);  // v - z + U t_any <= U  (i.e. z >= v - U(1-t_any)); v constant +1 moved right
        ez[r](0) = -1.0;
        ex[r](X_CHI) = 1.0;
        ed[r](D_CAP) = -1.0;
        ed[r](T_OFFST) = ed[r](T_STON) = ed[r](T_ONOFF) = U;
    }

    // Steam draw is confined to the ON mode.
    {
        int r = row(0.0);  // q_s <= q_max * x_ON
        eu[r](U_QS) = 1.0;
        ex[r](X_ON) = -m.q_s_max;
        r = row(0.0);  // q_min * x_ON <= q_s
        eu[r](U_QS) = -1.0;
        ex[r](X_ON) = m.q_s_min;
        r = row(0.0);  // q_s >= 0
        eu[r](U_QS) = -1.0;
    }

    // Dwell-counter and command domains.
    {
        int r = row(0.0);  // -chi <= 0
        ex[r](X_CHI) = -1.0;
        r = row(cap);  // chi <= cap
        ex[r](X_CHI) = 1.0;
        r = row(1.0);  // beta <= 1
        eu[r](U_BETA) = 1.0;
        r = row(0.0);  // -beta <= 0
        eu[r](U_BETA) = -1.0;
    }

    const int rows = static_cast<int>(aff.size());
    mld.E_x.resize(rows, 4);
    mld.E_u.resize(rows, 2);
    mld.E_z.resize(rows, 1);
    mld.E_delta.resize(rows, 7);
    mld.E_aff.resize(rows);
    for (int i = 0; i < rows; ++i) {
        mld.E_x.row(i) = ex[i].transpose();
        mld.E_u.row(i) = eu[i].transpose();
        mld.E_z.row(i) = ez[i].transpose();
        mld.E_delta.row(i) = ed[i].transpose();
        mld.E_aff(i) = aff[i];
    }

    mld.x_lb.resize(4);
    mld.x_ub.resize(4);
    mld.x_lb << 0, 0, 0, 0;
    mld.x_ub << cap, 1, 1, 1;
    mld.u_lb.resize(2);
    mld.u_ub.resize(2);
    mld.u_lb << 0, 0;
    mld.u_ub << 1, m.q_s_max;
    mld.z_lb = 0.0;
    mld.z_ub = cap;
    return mld;
}

int equivalence_mismatches(const HybridGenModel& m, const MLDModel& mld, int sequences,
                           int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> qs_draw(m.q_s_min, m.q_s_max);
    std::bernoulli_distribution beta_draw(0.35);

    int mismatches = 0;
    for (int s = 0; s < sequences; ++s) {
        HybridState st;
        st.mode = static_cast<Mode>(rng() % 3);
        st.chi = static_cast<int>(rng() % (m.chi_cap / 2 + 1));
        Eigen::VectorXd x = encode_state(st);
        for (int k = 0; k < steps; ++k) {
            const bool beta = beta_draw(rng);
            const double q_s = (st.mode == Mode::ON) ? qs_draw(rng) : 0.0;
            DhaResult ref = dha_step(m, st, beta, q_s);
            Eigen::VectorXd u(2);
            u << (beta ? 1.0 : 0.0), q_s;
            MldStep ms = mld_step(mld, x, u);
            HybridState mld_state = decode_state(ms.x_next);
            if (mld_state.mode != ref.state.mode || mld_state.chi != ref.state.chi ||
                std::abs(ms.y - ref.q_g) > 1e-9)
                ++mismatches;
            st = ref.state;
            x = encode_state(st);
        }
    }
    return mismatches;
}

}  // namespace

MLDModel to_mld(const HybridGenModel& m) {
    m.validate();
    MLDModel mld = build_mld(m);
    // Conversion self-test: the trajectory equivalence must hold, otherwise
    // a big-M bound is too small for the given thresholds/cap.
    if (equivalence_mismatches(m, mld, 12, 16, 0x5eed) != 0)
        throw BigMTooSmall("to_mld: completion disagrees with dha_step");
    return mld;
}

Eigen::VectorXd encode_state(const HybridState& s) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x(X_CHI) = static_cast<double>(s.chi);
    x(1 + static_cast<int>(s.mode)) = 1.0;
    return x;
}

HybridState decode_state(const Eigen::VectorXd& x) {
    HybridState s;
    s.chi = static_cast<int>(std::llround(x(X_CHI)));
    int hits = 0;
    for (int m = 0; m < 3; ++m) {
        if (std::abs(x(1 + m) - 1.0) < 1e-6) {
            s.mode = static_cast<Mode>(m);
            ++hits;
        } else if (std::abs(x(1 + m)) > 1e-6) {
            throw BigMTooSmall("decode_state: fractional mode indicator");
        }
    }
    if (hits != 1) throw BigMTooSmall("decode_state: mode indicators not one-hot");
    return s;
}

LogicCompletion logic_completion(const HybridGenModel& m, const HybridState& s, bool beta) {
    LogicCompletion lc;
    lc.delta = Eigen::VectorXd::Zero(7);
    lc.delta(D_OFFST) = s.chi >= m.chi_off_st ? 1.0 : 0.0;
    lc.delta(D_STON) = s.chi >= m.chi_st_on ? 1.0 : 0.0;
    lc.delta(D_ONOFF) = s.chi >= m.chi_on_off ? 1.0 : 0.0;
    lc.delta(D_CAP) = s.chi >= m.chi_cap ? 1.0 : 0.0;
    lc.delta(T_OFFST) =
        (s.mode == Mode::OFF && lc.delta(D_OFFST) > 0.5 && beta) ? 1.0 : 0.0;
    lc.delta(T_STON) = (s.mode == Mode::ST && lc.delta(D_STON) > 0.5) ? 1.0 : 0.0;
    lc.delta(T_ONOFF) =
        (s.mode == Mode::ON && lc.delta(D_ONOFF) > 0.5 && beta) ? 1.0 : 0.0;
    const double t_any = lc.delta(T_OFFST) + lc.delta(T_STON) + lc.delta(T_ONOFF);
    const double succ = s.chi + 1.0 - lc.delta(D_CAP);
    lc.z = t_any * succ;
    return lc;
}

MldStep mld_step(const MLDModel& mld, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                 const opt::SolverOptions& opts) {
    // Completion variables: [delta(7), z(1)].
    const int n = 8;
    opt::MipProblem p;
    p.lp = opt::LpProblem::with_free_bounds(n);
    p.lp.c = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < 7; ++j) {
        p.lp.c(j) = 1.0;  // prefer the lexicographically smallest completion
        p.lp.lb(j) = 0.0;
        p.lp.ub(j) = 1.0;
        p.binaries.push_back(j);
    }
    p.lp.lb(7) = mld.z_lb;
    p.lp.ub(7) = mld.z_ub;
    const int rows = static_cast<int>(mld.E_aff.size());
    p.lp.A_in.resize(rows, n);
    p.lp.A_in.leftCols(7) = mld.E_delta;
    p.lp.A_in.rightCols(1) = mld.E_z;
    p.lp.b_in = mld.E_aff - mld.E_x * x - mld.E_u * u;

    opt::MipResult r1 = opt::solve_mip(p, opts.mip_gap_tol, 10000, opts);
    if (r1.status != opt::MipStatus::Optimal)
        throw BigMTooSmall("mld_step: no (delta, z) completion for an admissible point");
    // Uniqueness cross-check under the reversed preference.
    p.lp.c = -p.lp.c;
    opt::MipResult r2 = opt::solve_mip(p, opts.mip_gap_tol, 10000, opts);
    if (r2.status != opt::MipStatus::Optimal ||
        (r1.x.head(7) - r2.x.head(7)).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(r1.x(7) - r2.x(7)) > 1e-6)
        throw BigMTooSmall("mld_step: completion not unique");

    MldStep out;
    out.delta = r1.x.head(7);
    out.z = r1.x(7);
    out.x_next = mld.A * x + mld.B_u * u + mld.B_z.col(0) * out.z + mld.B_delta * out.delta;
    out.y = mld.C.dot(x) + mld.D_u.dot(u) + mld.D_z(0) * out.z + mld.D_delta.dot(out.delta);
    return out;
}

int mld_equivalence_mismatches(const HybridGenModel& model, int sequences, int steps,
                               std::uint64_t seed) {
    model.validate();
    const MLDModel mld = build_mld(model);
    return equivalence_mismatches(model, mld, sequences, steps, seed);
}

void dump_mld(const MLDModel& mld, std::ostream& os) {
    auto put = [&os](const char* tag, const Eigen::MatrixXd& M) {
        os << tag << " " << M.rows() << " " << M.cols() << "\n";
        os.precision(17);
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                os << M(i, j) << (j + 1 < M.cols() ? " " : "");
            os << "\n";
        }
    };
    os << "mld 1\n";
    put("A", mld.A);
    put("B_u", mld.B_u);
    put("B_z", mld.B_z);
    put("B_delta", mld.B_delta);
    put("C", mld.C);
    put("D_u", mld.D_u);
    put("D_z", mld.D_z);
    put("D_delta", mld.D_delta);
    put("E_x", mld.E_x);
    put("E_u", mld.E_u);
    put("E_z", mld.E_z);
    put("E_delta", mld.E_delta);
    put("E_aff", mld.E_aff);
}

}  // namespace sgen

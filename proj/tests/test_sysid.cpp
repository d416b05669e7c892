#include "sgen/sysid.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "sgen/errors.hpp"
#include "test_helpers.hpp"

using namespace sgen;

namespace {

AffineModel random_stable_model(std::mt19937_64& rng, int nb, int nf, double T_M = 40.0) {
    std::uniform_real_distribution<double> pole(-0.85, 0.85), coef(-1.0, 1.0), bias(-0.5, 0.5);
    AffineModel m;
    m.T_M = T_M;
    for (;;) {
        // Build the denominator from random real poles (guaranteed Schur).
        Eigen::VectorXd poly(1);
        poly << 1.0;
        for (int i = 0; i < nf; ++i) {
            const double p = pole(rng);
            Eigen::VectorXd next = Eigen::VectorXd::Zero(poly.size() + 1);
            for (int j = 0; j < poly.size(); ++j) {
                next(j) += poly(j);
                next(j + 1) -= p * poly(j);
            }
            poly = next;
        }
        m.f = poly.tail(nf);
        m.b.resize(nb);
        for (int j = 0; j < nb; ++j) m.b(j) = coef(rng);
        m.gamma = bias(rng);
        if (std::abs(m.static_gain()) > 0.05 && m.is_schur(1e-6)) return m;
    }
}

Eigen::VectorXd multistep_input(std::mt19937_64& rng, int levels, int hold, double lo,
                                double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd out(levels * hold);
    for (int l = 0; l < levels; ++l) {
        const double v = u(rng);
        for (int k = 0; k < hold; ++k) out(l * hold + k) = v;
    }
    return out;
}

}  // namespace

TEST_SUITE("sysid") {

TEST_CASE("realize smallest canonical case nf=nb=1") {
    AffineModel m;
    m.b.resize(1);
    m.b << 0.4;
    m.f.resize(1);
    m.f << -0.5;
    m.gamma = 0.1;
    auto ss = realize(m);
    REQUIRE(ss.order() == 1);
    CHECK(ss.A(0, 0) == doctest::Approx(0.5));
    CHECK(ss.B(0) == doctest::Approx(0.4));
    CHECK(ss.C(0) == 1.0);
    CHECK(ss.static_gain() == doctest::Approx(0.4 / (1.0 - 0.5)).epsilon(1e-12));
}

TEST_CASE("impulse responses of polynomial and state-space forms agree") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int nb = 1 + static_cast<int>(rng() % 3);
        const int nf = 1 + static_cast<int>(rng() % 3);
        AffineModel m = random_stable_model(rng, nb, nf);
        m.gamma = 0.0;
        auto ss = realize(m);

        // Impulse via the difference equation (zero pre-history).
        const int L = 50;
        Eigen::VectorXd h_poly = Eigen::VectorXd::Zero(L);
        for (int k = 0; k < L; ++k) {
            double v = 0.0;
            for (int j = 1; j <= nf; ++j)
                if (k - j >= 0) v -= m.f(j - 1) * h_poly(k - j);
            if (k >= 1 && k <= nb) v += m.b(k - 1);
            h_poly(k) = v;
        }
        // Impulse via the state space: u(0) = 1 then zero.
        Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.order());
        Eigen::VectorXd h_ss(L);
        h_ss(0) = (ss.C * x)(0);
        for (int k = 1; k < L; ++k) {
            x = ss.A * x + ss.B * (k == 1 ? 1.0 : 0.0);
            h_ss(k) = (ss.C * x)(0);
        }
        CHECK((h_poly - h_ss).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("state-space gain equals (sum b)/(1 + sum f) on 100 random models") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int nb = 1 + static_cast<int>(rng() % 3);
        const int nf = 1 + static_cast<int>(rng() % 3);
        AffineModel m = random_stable_model(rng, nb, nf);
        auto ss = realize(m);
        CHECK(std::abs(ss.static_gain() - m.static_gain()) < 1e-10);
    }
}

TEST_CASE("realization round trip reproduces coefficients exactly") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int nb = 1 + static_cast<int>(rng() % 3);
        const int nf = 1 + static_cast<int>(rng() % 3);
        AffineModel m = random_stable_model(rng, nb, nf);
        AffineModel back = read_back(realize(m), m.T_M);
        CHECK((back.b - m.b).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.f - m.f).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.gamma == m.gamma);
    }
}

TEST_CASE("identify recovers a known 2nd-order model from noise-free data") {
    std::mt19937_64 rng(3);
    AffineModel truth = random_stable_model(rng, 2, 2);
    Eigen::VectorXd u = multistep_input(rng, 12, 12, 0.5, 2.0);
    Dataset d{u, truth.simulate(u), truth.T_M};
    auto r = identify(d, 2, 2);
    CHECK((r.model.b - truth.b).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((r.model.f - truth.f).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(r.model.gamma - truth.gamma) < 1e-6);
    CHECK(r.fit > 0.999);
}

TEST_CASE("integrating data is rejected as UnstableFit") {
    // y(k) = y(k-1) + u(k-1): a pole at exactly 1.
    std::mt19937_64 rng(4);
    Eigen::VectorXd u = multistep_input(rng, 10, 10, -1.0, 1.0);
    const int N = static_cast<int>(u.size());
    Eigen::VectorXd y(N);
    y(0) = 0.0;
    for (int k = 1; k < N; ++k) y(k) = y(k - 1) + u(k - 1);
    Dataset d{u, y, 40.0};
    CHECK_THROWS_AS((void)identify(d, 1, 1), UnstableFit);
}

TEST_CASE("too-short and non-exciting datasets are rejected") {
    Dataset d;
    d.u = Eigen::VectorXd::Ones(15);
    d.y = Eigen::VectorXd::Ones(15);
    CHECK_THROWS_AS((void)identify(d, 1, 1), RankDeficient);  // 15 <= 10*(1+1)
    Dataset flat;
    flat.u = Eigen::VectorXd::Ones(200);
    flat.y = Eigen::VectorXd::Ones(200);
    CHECK_THROWS_AS((void)identify(flat, 1, 1), RankDeficient);  // single level
}

TEST_CASE("excite_and_collect produces settled, periodic data") {
    auto sys = test::default_closed_loop();
    for (int i = 0; i < 3000; ++i) cl_step(sys, 1.0, 420.0);  // pre-settle

    StepDesign design;
    design.levels = {1.0, 1.0, 1.0, 1.0};
    design.hold_s = 200.0;
    design.T_M = 40.0;
    auto d = excite_and_collect(sys, design);
    CHECK(d.u.size() == 4 * 5);
    CHECK(d.T_M == 40.0);
    // Constant input: after the transient the output is flat.
    const auto tail = d.y.tail(8);
    CHECK(tail.maxCoeff() - tail.minCoeff() < 1e-5);
}

TEST_CASE("identified gain matches the static map slope within 5 percent") {
    auto sys = test::default_closed_loop();
    for (int i = 0; i < 3000; ++i) cl_step(sys, 1.2, 420.0);

    StepDesign design;
    design.levels = {1.2, 0.8, 1.6, 0.6, 1.4, 1.0, 1.8, 0.9, 1.5, 1.1};
    design.hold_s = 400.0;
    design.T_M = 40.0;
    auto d = excite_and_collect(sys, design);
    auto r = identify_best_order(d, 2);
    CHECK(r.fit > 0.9);

    auto pts = static_map(sys, {0.6, 1.0, 1.4, 1.8});
    Eigen::MatrixXd X(4, 2);
    Eigen::VectorXd y(4);
    for (int i = 0; i < 4; ++i) {
        X(i, 0) = pts[i].q_s;
        X(i, 1) = 1.0;
        y(i) = pts[i].q_g;
    }
    Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK(std::abs(r.model.static_gain() - beta(0)) < 0.05 * std::abs(beta(0)));
}

}  // TEST_SUITE

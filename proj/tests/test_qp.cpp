#include "sgen/qp.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sgen/errors.hpp"

using namespace sgen::opt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE("qp") {

TEST_CASE("min x^2 subject to x >= 1") {
    QpProblem p;
    p.H.resize(1, 1);
    p.H << 2.0;  // 0.5*x'Hx = x^2
    p.c.resize(1);
    p.c << 0.0;
    p.A_in.resize(1, 1);
    p.A_in << -1.0;
    p.b_in.resize(1);
    p.b_in << -1.0;
    auto r = solve_qp(p);
    REQUIRE(r.status == QpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.kkt_residual < 1e-8);
}

TEST_CASE("contradictory bounds are infeasible") {
    QpProblem p;
    p.H = MatrixXd::Identity(1, 1);
    p.c = VectorXd::Zero(1);
    p.A_in.resize(2, 1);
    p.A_in << -1.0, 1.0;  // x >= 1 and x <= 0
    p.b_in.resize(2);
    p.b_in << -1.0, 0.0;
    auto r = solve_qp(p);
    CHECK(r.status == QpStatus::Infeasible);
}

TEST_CASE("equality constrained matches direct KKT solve") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4, me = 2;
        MatrixXd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
        QpProblem p;
        p.H = M.transpose() * M + 0.5 * MatrixXd::Identity(n, n);
        p.c.resize(n);
        for (int j = 0; j < n; ++j) p.c(j) = gauss(rng);
        p.A_eq.resize(me, n);
        for (int i = 0; i < me; ++i)
            for (int j = 0; j < n; ++j) p.A_eq(i, j) = gauss(rng);
        p.b_eq.resize(me);
        for (int i = 0; i < me; ++i) p.b_eq(i) = gauss(rng);

        auto r = solve_qp(p);
        REQUIRE(r.status == QpStatus::Optimal);

        MatrixXd KKT(n + me, n + me);
        KKT.setZero();
        KKT.topLeftCorner(n, n) = p.H;
        KKT.topRightCorner(n, me) = p.A_eq.transpose();
        KKT.bottomLeftCorner(me, n) = p.A_eq;
        VectorXd rhs(n + me);
        rhs.head(n) = -p.c;
        rhs.tail(me) = p.b_eq;
        VectorXd sol = KKT.partialPivLu().solve(rhs);
        CHECK((r.x - sol.head(n)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(r.kkt_residual < 1e-8);
    }
}

TEST_CASE("random inequality QPs satisfy KKT and beat random feasible points") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3, mi = 5;
        MatrixXd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
        QpProblem p;
        p.H = M.transpose() * M + 0.2 * MatrixXd::Identity(n, n);
        p.c.resize(n);
        for (int j = 0; j < n; ++j) p.c(j) = gauss(rng);
        p.A_in.resize(mi, n);
        p.b_in.resize(mi);
        for (int i = 0; i < mi; ++i) {
            for (int j = 0; j < n; ++j) p.A_in(i, j) = gauss(rng);
            p.b_in(i) = unif(rng);  // origin strictly feasible
        }
        auto r = solve_qp(p);
        REQUIRE(r.status == QpStatus::Optimal);
        CHECK(r.kkt_residual < 1e-8);
        // No feasible sampled point does better.
        auto obj = [&](const VectorXd& x) { return 0.5 * x.dot(p.H * x) + p.c.dot(x); };
        for (int s = 0; s < 200; ++s) {
            VectorXd x(n);
            for (int j = 0; j < n; ++j) x(j) = gauss(rng);
            if (((p.A_in * x - p.b_in).array() <= 0.0).all())
                CHECK(obj(x) >= r.objective - 1e-9);
        }
    }
}

TEST_CASE("bounds are honored") {
    QpProblem p;
    p.H = 2.0 * MatrixXd::Identity(2, 2);
    p.c.resize(2);
    p.c << -10.0, -10.0;  // unconstrained minimum at (5,5)
    p.lb = VectorXd::Constant(2, 0.0);
    p.ub = VectorXd::Constant(2, 2.0);
    auto r = solve_qp(p);
    REQUIRE(r.status == QpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(2.0));
    CHECK(r.x(1) == doctest::Approx(2.0));
}

TEST_CASE("warm start reaches the same optimum") {
    QpProblem p;
    p.H = MatrixXd::Identity(2, 2);
    p.c.resize(2);
    p.c << -1.0, 0.0;
    p.A_in.resize(1, 2);
    p.A_in << 1.0, 1.0;
    p.b_in.resize(1);
    p.b_in << 1.0;
    auto cold = solve_qp(p);
    REQUIRE(cold.status == QpStatus::Optimal);
    VectorXd w(2);
    w << 0.2, 0.1;
    auto warm = solve_qp(p, default_options(), &w);
    REQUIRE(warm.status == QpStatus::Optimal);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-10));
}

TEST_CASE("dump/load round trip") {
    QpProblem p;
    p.H = 2.0 * MatrixXd::Identity(2, 2);
    p.c.resize(2);
    p.c << 1.0, -2.0;
    p.A_in.resize(1, 2);
    p.A_in << 1.0, 1.0;
    p.b_in.resize(1);
    p.b_in << 3.0;
    std::stringstream ss;
    dump_qp(p, ss);
    QpProblem q = load_qp(ss);
    auto r1 = solve_qp(p);
    auto r2 = solve_qp(q);
    CHECK(r1.objective == r2.objective);
}

}  // TEST_SUITE

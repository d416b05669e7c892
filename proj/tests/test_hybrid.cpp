#include "sgen/hybrid.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "sgen/errors.hpp"

using namespace sgen;

namespace {
HybridGenModel small_model() {
    HybridGenModel m;
    m.chi_off_st = 1;
    m.chi_st_on = 2;
    m.chi_on_off = 2;
    m.chi_cap = 12;
    m.g = 0.05;
    m.gamma_on = 0.01;
    m.gamma_st = 0.02;
    m.q_s_min = 0.4;
    m.q_s_max = 2.0;
    return m;
}
}  // namespace

TEST_SUITE("hybrid") {

TEST_CASE("guard OFF->ST needs dwell and beta") {
    auto m = small_model();
    HybridState s{Mode::OFF, 1};
    auto r = dha_step(m, s, true, 0.0);
    CHECK(r.state.mode == Mode::ST);
    CHECK(r.state.chi == 0);
    CHECK(r.q_g == 0.0);  // output reflects the pre-transition mode
    auto r2 = dha_step(m, r.state, false, 0.0);
    CHECK(r2.q_g == doctest::Approx(m.gamma_st));
}

TEST_CASE("guard unmet keeps the mode and counts the dwell") {
    auto m = small_model();
    HybridState s{Mode::ST, 0};
    auto r = dha_step(m, s, true, 0.0);  // chi < chi_st_on
    CHECK(r.state.mode == Mode::ST);
    CHECK(r.state.chi == 1);
}

TEST_CASE("ON output map and OFF->ST never skips ST") {
    auto m = small_model();
    HybridState s{Mode::ON, 3};
    auto r = dha_step(m, s, false, 1.5);
    CHECK(r.q_g == doctest::Approx(m.g * 1.5 + m.gamma_on));
    CHECK(r.state.mode == Mode::ON);

    // From OFF a single command can only reach ST.
    HybridState off{Mode::OFF, 5};
    auto t = dha_step(m, off, true, 0.0);
    CHECK(t.state.mode == Mode::ST);
}

TEST_CASE("steam draw outside ON is rejected") {
    auto m = small_model();
    HybridState s{Mode::OFF, 0};
    CHECK_THROWS_AS((void)dha_step(m, s, false, 0.5), InvalidInput);
    HybridState on{Mode::ON, 0};
    CHECK_THROWS_AS((void)dha_step(m, on, false, 5.0), InvalidInput);
}

TEST_CASE("dwell strictly increases until a transition then resets") {
    auto m = small_model();
    HybridState s{Mode::ST, 0};
    int prev = s.chi;
    for (int k = 0; k < 5; ++k) {
        const double q_s = (s.mode == Mode::ON) ? 1.0 : 0.0;
        auto r = dha_step(m, s, false, q_s);
        if (r.state.mode == s.mode) {
            CHECK(r.state.chi == std::min(prev + 1, m.chi_cap));
        } else {
            CHECK(r.state.chi == 0);
        }
        prev = r.state.chi;
        s = r.state;
    }
    CHECK(s.mode == Mode::ON);
}

TEST_CASE("dwell saturates at the cap") {
    auto m = small_model();
    HybridState s{Mode::ON, m.chi_cap};
    auto r = dha_step(m, s, false, 1.0);
    CHECK(r.state.chi == m.chi_cap);
}

TEST_CASE("mld one-hot rows hold and beta=0 from OFF stays silent") {
    auto m = small_model();
    auto mld = to_mld(m);
    HybridState s{Mode::OFF, 0};
    Eigen::VectorXd x = encode_state(s);
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd u(2);
        u << 0.0, 0.0;
        auto step = mld_step(mld, x, u);
        CHECK(step.y == 0.0);
        CHECK(step.x_next(1) + step.x_next(2) + step.x_next(3) == doctest::Approx(1.0));
        x = step.x_next;
    }
}

TEST_CASE("trajectory equivalence dha vs mld completion") {
    auto m = small_model();
    CHECK(mld_equivalence_mismatches(m, 60, 40, 2024) == 0);
}

TEST_CASE("equivalence holds with zero thresholds and larger caps") {
    auto m = small_model();
    m.chi_off_st = 0;
    m.chi_st_on = 1;
    m.chi_on_off = 0;
    m.chi_cap = 30;
    CHECK(mld_equivalence_mismatches(m, 30, 30, 7) == 0);
}

TEST_CASE("matrix dump has the dimension header") {
    auto mld = to_mld(small_model());
    std::stringstream ss;
    dump_mld(mld, ss);
    std::string tag;
    int version;
    ss >> tag >> version;
    CHECK(tag == "mld");
    ss >> tag;
    CHECK(tag == "A");
    int r, c;
    ss >> r >> c;
    CHECK(r == 4);
    CHECK(c == 4);
}

}  // TEST_SUITE

#include "sgen/steam_table.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sgen/errors.hpp"

namespace sgen {

SaturationTable SaturationTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("SaturationTable: cannot open '" + path + "'");
    std::string line;
    bool header_seen = false;
    std::vector<std::array<double, 6>> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!header_seen) {
            std::string c0;
            if (!(ls >> c0)) continue;  // blank/comment line
            static const char* expected[6] = {"p_bar", "rho_w", "rho_s", "h_w", "h_s", "T_s"};
            if (c0 != expected[0])
                throw SchemaError("SaturationTable: line " + std::to_string(lineno) +
                                  ": header must start with p_bar");
            for (int i = 1; i < 6; ++i) {
                std::string c;
                if (!(ls >> c) || c != expected[i])
                    throw SchemaError("SaturationTable: line " + std::to_string(lineno) +
                                      ": expected column '" + expected[i] + "'");
            }
            header_seen = true;
            continue;
        }
        std::array<double, 6> row{};
        if (!(ls >> row[0])) continue;
        for (int i = 1; i < 6; ++i)
            if (!(ls >> row[i]))
                throw SchemaError("SaturationTable: line " + std::to_string(lineno) +
                                  ": expected 6 numeric columns");
        rows.push_back(row);
    }
    if (!header_seen) throw SchemaError("SaturationTable: missing header row");
    if (rows.size() < 2) throw SchemaError("SaturationTable: need at least 2 grid points");

    const int n = static_cast<int>(rows.size());
    Eigen::VectorXd p(n), rw(n), rs(n), hw(n), hs(n), ts(n);
    for (int i = 0; i < n; ++i) {
        p(i) = rows[i][0];
        rw(i) = rows[i][1];
        rs(i) = rows[i][2];
        hw(i) = rows[i][3];
        hs(i) = rows[i][4];
        ts(i) = rows[i][5];
    }
    return from_columns(p, rw, rs, hw, hs, ts);
}

SaturationTable SaturationTable::from_columns(Eigen::VectorXd p_bar, Eigen::VectorXd rho_w,
                                              Eigen::VectorXd rho_s, Eigen::VectorXd h_w,
                                              Eigen::VectorXd h_s, Eigen::VectorXd T_s) {
    SaturationTable t;
    t.p_ = std::move(p_bar);
    t.rho_w_ = std::move(rho_w);
    t.rho_s_ = std::move(rho_s);
    t.h_w_ = std::move(h_w);
    t.h_s_ = std::move(h_s);
    t.T_s_ = std::move(T_s);
    t.check_invariants();
    t.build_derivatives();
    return t;
}

void SaturationTable::check_invariants() const {
    const int n = size();
    auto fail = [](const std::string& what) { throw SchemaError("SaturationTable: " + what); };
    if (rho_w_.size() != n || rho_s_.size() != n || h_w_.size() != n || h_s_.size() != n ||
        T_s_.size() != n)
        fail("column lengths differ");
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(p_(i)) || p_(i) <= 0.0) fail("non-positive pressure grid point");
        if (i > 0 && p_(i) <= p_(i - 1)) fail("pressure grid not strictly increasing");
        if (rho_w_(i) <= rho_s_(i))
            fail("rho_w <= rho_s at p = " + std::to_string(p_(i)) + " bar");
        if (h_s_(i) <= h_w_(i)) fail("h_s <= h_w at p = " + std::to_string(p_(i)) + " bar");
        if (rho_s_(i) <= 0.0 || T_s_(i) <= 0.0) fail("non-physical column value");
    }
}

void SaturationTable::build_derivatives() {
    const int n = size();
    auto diff = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd d(n);
        d(0) = (v(1) - v(0)) / (p_(1) - p_(0));
        d(n - 1) = (v(n - 1) - v(n - 2)) / (p_(n - 1) - p_(n - 2));
        for (int i = 1; i < n - 1; ++i) d(i) = (v(i + 1) - v(i - 1)) / (p_(i + 1) - p_(i - 1));
        return d;
    };
    d_rho_w_ = diff(rho_w_);
    d_rho_s_ = diff(rho_s_);
    d_h_w_ = diff(h_w_);
    d_h_s_ = diff(h_s_);
    d_T_s_ = diff(T_s_);
}

SaturationSample SaturationTable::at(double p_bar) const {
    if (!(p_bar >= p_min() && p_bar <= p_max()))
        throw PressureOutOfTable("pressure " + std::to_string(p_bar) + " bar outside table [" +
                                 std::to_string(p_min()) + ", " + std::to_string(p_max()) + "]");
    // Locate the segment; exact hits return stored values.
    int hi = 1;
    while (p_(hi) < p_bar) ++hi;
    const int lo = hi - 1;
    const double t = (p_bar - p_(lo)) / (p_(hi) - p_(lo));
    auto lerp = [&](const Eigen::VectorXd& v) { return v(lo) + t * (v(hi) - v(lo)); };
    SaturationSample s;
    s.rho_w = lerp(rho_w_);
    s.rho_s = lerp(rho_s_);
    s.h_w = lerp(h_w_);
    s.h_s = lerp(h_s_);
    s.T_s = lerp(T_s_);
    s.drho_w_dp = lerp(d_rho_w_);
    s.drho_s_dp = lerp(d_rho_s_);
    s.dh_w_dp = lerp(d_h_w_);
    s.dh_s_dp = lerp(d_h_s_);
    s.dT_s_dp = lerp(d_T_s_);
    return s;
}

}  // namespace sgen

#pragma once

#include <Eigen/Dense>
#include <string>

namespace sgen {

// Interpolated saturated-water/steam properties at one pressure.
// Densities kg/m^3, enthalpies kJ/kg, temperature K, derivatives per bar.
struct SaturationSample {
    double rho_w = 0, rho_s = 0, h_w = 0, h_s = 0, T_s = 0;
    double drho_w_dp = 0, drho_s_dp = 0, dh_w_dp = 0, dh_s_dp = 0, dT_s_dp = 0;
};

// Saturation-line property table on a strictly increasing pressure grid
// (bar). Values and their pressure derivatives (precomputed at load by
// central differences, one-sided at the ends) are interpolated piecewise
// linearly; at a grid node the stored value is returned exactly.
class SaturationTable {
  public:
    // Plain-text columnar file: header row naming the columns
    // (p_bar rho_w rho_s h_w h_s T_s), one row per grid point, '#' comments.
    static SaturationTable load(const std::string& path);
    static SaturationTable from_columns(Eigen::VectorXd p_bar, Eigen::VectorXd rho_w,
                                        Eigen::VectorXd rho_s, Eigen::VectorXd h_w,
                                        Eigen::VectorXd h_s, Eigen::VectorXd T_s);

    SaturationSample at(double p_bar) const;  // throws PressureOutOfTable

    double p_min() const { return p_(0); }
    double p_max() const { return p_(p_.size() - 1); }
    int size() const { return static_cast<int>(p_.size()); }

    const Eigen::VectorXd& pressure_grid() const { return p_; }
    const Eigen::VectorXd& rho_w() const { return rho_w_; }
    const Eigen::VectorXd& rho_s() const { return rho_s_; }
    const Eigen::VectorXd& h_w() const { return h_w_; }
    const Eigen::VectorXd& h_s() const { return h_s_; }
    const Eigen::VectorXd& T_s() const { return T_s_; }
    const Eigen::VectorXd& drho_w_dp() const { return d_rho_w_; }
    const Eigen::VectorXd& drho_s_dp() const { return d_rho_s_; }
    const Eigen::VectorXd& dh_w_dp() const { return d_h_w_; }
    const Eigen::VectorXd& dh_s_dp() const { return d_h_s_; }
    const Eigen::VectorXd& dT_s_dp() const { return d_T_s_; }

  private:
    void check_invariants() const;
    void build_derivatives();

    Eigen::VectorXd p_, rho_w_, rho_s_, h_w_, h_s_, T_s_;
    Eigen::VectorXd d_rho_w_, d_rho_s_, d_h_w_, d_h_s_, d_T_s_;
};

}  // namespace sgen

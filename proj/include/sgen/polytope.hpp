#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sgen/solver_options.hpp"

namespace sgen {

// Convex polytope in H-representation { x : H x <= k }. Intended for the
// low-dimensional set computations of the medium-level controller (d <= 6).
// Instances are immutable values; all operations return new polytopes.
class Polytope {
  public:
    Polytope() = default;
    static Polytope from_inequalities(Eigen::MatrixXd H, Eigen::VectorXd k);
    static Polytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
    static Polytope interval(double lo, double hi);  // 1-D box
    static Polytope singleton(const Eigen::VectorXd& x);
    // Convex hull of a point cloud. Exact for d <= 2; for d >= 3 an outer
    // approximation on a fixed direction template is returned (the template
    // size is kHullTemplateDirections per axis pair plus the axes).
    static Polytope convex_hull(const std::vector<Eigen::VectorXd>& points);

    int dim() const { return static_cast<int>(H_.cols()); }
    int num_rows() const { return static_cast<int>(H_.rows()); }
    const Eigen::MatrixXd& H() const { return H_; }
    const Eigen::VectorXd& k() const { return k_; }

    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
    bool is_empty(double tol = 1e-9) const;            // LP feasibility test
    double support(const Eigen::VectorXd& dir) const;  // throws Unbounded
    Eigen::VectorXd support_point(const Eigen::VectorXd& dir) const;

    Polytope minkowski_sum(const Polytope& other) const;
    Polytope pontryagin_diff(const Polytope& other) const;  // throws EmptyResult
    Polytope linear_image(const Eigen::MatrixXd& M) const;
    Polytope scale(double lambda) const;
    Polytope translate(const Eigen::VectorXd& t) const;
    Polytope remove_redundant() const;

    // Axis-aligned bounding intervals (lo, hi per axis).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> interval_hull() const;

    // Vertex enumeration, exact for d <= 2.
    std::vector<Eigen::VectorXd> vertices() const;

    static constexpr int kHullTemplateDirections = 16;  // per coordinate plane

  private:
    Eigen::MatrixXd H_;
    Eigen::VectorXd k_;
};

}  // namespace sgen

#include "sgen/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgen/errors.hpp"
#include "sgen/lp.hpp"

namespace sgen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<VectorXd> template_directions(int d) {
    std::vector<VectorXd> dirs;
    for (int i = 0; i < d; ++i) {
        VectorXd e = VectorXd::Zero(d);
        e(i) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            for (int a = 0; a < Polytope::kHullTemplateDirections; ++a) {
                const double ang =
                    2.0 * std::numbers::pi * (a + 0.5) / Polytope::kHullTemplateDirections;
                VectorXd v = VectorXd::Zero(d);
                v(i) = std::cos(ang);
                v(j) = std::sin(ang);
                dirs.push_back(v);
            }
        }
    }
    return dirs;
}

void append_unique_direction(std::vector<VectorXd>& dirs, const VectorXd& v) {
    const double n = v.norm();
    if (n < 1e-12) return;
    VectorXd u = v / n;
    for (const auto& w : dirs)
        if ((w - u).norm() < 1e-9) return;
    dirs.push_back(u);
}

// 2-D convex hull, Andrew monotone chain; returns CCW vertices without
// repetition of the first point. Handles collinear sets (returns endpoints).
std::vector<VectorXd> hull_2d(std::vector<VectorXd> pts) {
    std::sort(pts.begin(), pts.end(), [](const VectorXd& a, const VectorXd& b) {
        return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const VectorXd& a, const VectorXd& b) {
                              return (a - b).norm() < 1e-12;
                          }),
              pts.end());
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;
    auto cross = [](const VectorXd& o, const VectorXd& a, const VectorXd& b) {
        return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
    };
    std::vector<VectorXd> h(2 * n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        while (m >= 2 && cross(h[m - 2], h[m - 1], pts[i]) <= 1e-14) --m;
        h[m++] = pts[i];
    }
    const int lower = m + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (m >= lower && cross(h[m - 2], h[m - 1], pts[i]) <= 1e-14) --m;
        h[m++] = pts[i];
    }
    h.resize(m - 1);
    return h;
}

}  // namespace

Polytope Polytope::from_inequalities(MatrixXd H, VectorXd k) {
    if (H.rows() != k.size()) throw DimensionMismatch("Polytope: H rows != k size");
    Polytope p;
    p.H_ = std::move(H);
    p.k_ = std::move(k);
    return p;
}

Polytope Polytope::box(const VectorXd& lo, const VectorXd& hi) {
    const int d = static_cast<int>(lo.size());
    if (hi.size() != d) throw DimensionMismatch("Polytope::box: bound lengths differ");
    MatrixXd H(2 * d, d);
    VectorXd k(2 * d);
    H.topRows(d) = MatrixXd::Identity(d, d);
    H.bottomRows(d) = -MatrixXd::Identity(d, d);
    k.head(d) = hi;
    k.tail(d) = -lo;
    return from_inequalities(std::move(H), std::move(k));
}

Polytope Polytope::interval(double lo, double hi) {
    VectorXd l(1), h(1);
    l << lo;
    h << hi;
    return box(l, h);
}

Polytope Polytope::singleton(const VectorXd& x) { return box(x, x); }

Polytope Polytope::convex_hull(const std::vector<VectorXd>& points) {
    if (points.empty()) throw DegenerateHull("convex_hull: no points");
    const int d = static_cast<int>(points.front().size());
    for (const auto& p : points)
        if (p.size() != d) throw DimensionMismatch("convex_hull: mixed dimensions");

    VectorXd mean = VectorXd::Zero(d);
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    MatrixXd centered(d, points.size());
    for (size_t i = 0; i < points.size(); ++i) centered.col(i) = points[i] - mean;
    double scale = std::max(1.0, centered.cwiseAbs().maxCoeff());
    Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeFullU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-9 * scale) ++rank;

    if (rank == 0) return singleton(points.front());

    if (rank == 1) {
        // Segment: bound it along every principal direction; the orthogonal
        // complement rows act as paired equalities.
        const MatrixXd U = svd.matrixU();
        MatrixXd H(2 * d, d);
        VectorXd k(2 * d);
        for (int i = 0; i < d; ++i) {
            const VectorXd u = U.col(i);
            double tmax = -opt::kInf, tmin = opt::kInf;
            for (const auto& p : points) {
                const double t = u.dot(p);
                tmax = std::max(tmax, t);
                tmin = std::min(tmin, t);
            }
            H.row(2 * i) = u.transpose();
            k(2 * i) = tmax;
            H.row(2 * i + 1) = -u.transpose();
            k(2 * i + 1) = -tmin;
        }
        return from_inequalities(std::move(H), std::move(k));
    }

    if (d == 1) {
        double lo = points.front()(0), hi = lo;
        for (const auto& p : points) {
            lo = std::min(lo, p(0));
            hi = std::max(hi, p(0));
        }
        return interval(lo, hi);
    }

    if (d == 2) {
        auto h = hull_2d(points);
        const int n = static_cast<int>(h.size());
        if (n == 2) {
            std::vector<VectorXd> seg = {h[0], h[1]};
            return convex_hull(seg);  // handled by flat branch above
        }
        MatrixXd H(n, 2);
        VectorXd k(n);
        for (int i = 0; i < n; ++i) {
            const VectorXd& a = h[i];
            const VectorXd& b = h[(i + 1) % n];
            VectorXd dir = b - a;
            VectorXd nrm(2);
            nrm << dir(1), -dir(0);  // outward for CCW order
            const double len = nrm.norm();
            H.row(i) = (nrm / len).transpose();
            k(i) = H.row(i).dot(a);
        }
        return from_inequalities(std::move(H), std::move(k));
    }

    // d >= 3, full rank: outer approximation on the direction template.
    auto dirs = template_directions(d);
    MatrixXd H(dirs.size(), d);
    VectorXd k(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) {
        double s = -opt::kInf;
        for (const auto& p : points) s = std::max(s, dirs[i].dot(p));
        H.row(static_cast<int>(i)) = dirs[i].transpose();
        k(static_cast<int>(i)) = s;
    }
    return from_inequalities(std::move(H), std::move(k));
}

bool Polytope::contains(const VectorXd& x, double tol) const {
    if (x.size() != dim()) throw DimensionMismatch("Polytope::contains: dimension");
    if (num_rows() == 0) return true;
    const double scale = 1.0 + k_.cwiseAbs().maxCoeff();
    return ((H_ * x - k_).array() <= tol * scale).all();
}

bool Polytope::is_empty(double tol) const {
    opt::LpProblem lp = opt::LpProblem::with_free_bounds(dim());
    lp.A_in = H_;
    lp.b_in = k_;
    opt::SolverOptions o;
    o.feas_tol = tol;
    return opt::solve_lp(lp, o).status == opt::LpStatus::Infeasible;
}

double Polytope::support(const VectorXd& dir) const {
    return dir.dot(support_point(dir));
}

Eigen::VectorXd Polytope::support_point(const VectorXd& dir) const {
    if (dir.size() != dim()) throw DimensionMismatch("Polytope::support: dimension");
    opt::LpProblem lp = opt::LpProblem::with_free_bounds(dim());
    lp.c = -dir;  // maximize dir'x
    lp.A_in = H_;
    lp.b_in = k_;
    const opt::LpResult r = opt::solve_lp(lp);
    if (r.status == opt::LpStatus::Unbounded)
        throw Unbounded("Polytope::support: unbounded direction");
    if (r.status != opt::LpStatus::Optimal)
        throw EmptyResult("Polytope::support: empty or ill-posed polytope");
    return r.x;
}

Polytope Polytope::minkowski_sum(const Polytope& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("minkowski_sum: dimension");
    const int d = dim();
    if (d <= 2) {
        auto va = vertices();
        auto vb = other.vertices();
        if (va.empty() || vb.empty()) throw EmptyResult("minkowski_sum: empty operand");
        std::vector<VectorXd> sums;
        sums.reserve(va.size() * vb.size());
        for (const auto& a : va)
            for (const auto& b : vb) sums.push_back(a + b);
        return convex_hull(sums);
    }
    // Outer approximation via support functions on a shared direction set:
    // both operands' normals plus the axis/plane template.
    std::vector<VectorXd> dirs;
    for (int i = 0; i < num_rows(); ++i) append_unique_direction(dirs, H_.row(i).transpose());
    for (int i = 0; i < other.num_rows(); ++i)
        append_unique_direction(dirs, other.H_.row(i).transpose());
    for (const auto& v : template_directions(d)) append_unique_direction(dirs, v);
    MatrixXd H(dirs.size(), d);
    VectorXd k(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) {
        H.row(static_cast<int>(i)) = dirs[i].transpose();
        k(static_cast<int>(i)) = support(dirs[i]) + other.support(dirs[i]);
    }
    return from_inequalities(std::move(H), std::move(k));
}

Polytope Polytope::pontryagin_diff(const Polytope& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("pontryagin_diff: dimension");
    // Exact in H-representation: offset every row by the support of the
    // subtrahend along its normal.
    VectorXd k = k_;
    for (int i = 0; i < num_rows(); ++i) k(i) -= other.support(H_.row(i).transpose());
    Polytope res = from_inequalities(H_, std::move(k));
    if (res.is_empty())
        throw EmptyResult("pontryagin_diff: result is empty (over-tightening)");
    return res;
}

Polytope Polytope::linear_image(const MatrixXd& M) const {
    if (M.cols() != dim()) throw DimensionMismatch("linear_image: map columns != dim");
    const int dt = static_cast<int>(M.rows());
    if (dt == 1) {
        VectorXd row = M.row(0).transpose();
        const double hi = support(row);
        const double lo = -support(-row);
        return interval(lo, hi);
    }
    if (dt == dim()) {
        Eigen::FullPivLU<MatrixXd> lu(M);
        if (lu.isInvertible()) return from_inequalities(H_ * lu.inverse(), k_);
    }
    if (dt == 2 && dim() <= 2) {
        auto vs = vertices();
        std::vector<VectorXd> imgs;
        imgs.reserve(vs.size());
        for (const auto& v : vs) imgs.push_back(M * v);
        return convex_hull(imgs);
    }
    // Outer approximation through supports: h_img(v) = h_P(M'v).
    auto dirs = template_directions(dt);
    MatrixXd H(dirs.size(), dt);
    VectorXd k(dirs.size());
    for (size_t i = 0; i < dirs.size(); ++i) {
        H.row(static_cast<int>(i)) = dirs[i].transpose();
        k(static_cast<int>(i)) = support(M.transpose() * dirs[i]);
    }
    return from_inequalities(std::move(H), std::move(k));
}

Polytope Polytope::scale(double lambda) const {
    if (lambda == 0.0) return singleton(VectorXd::Zero(dim()));
    if (lambda > 0.0) return from_inequalities(H_, k_ * lambda);
    return from_inequalities(-H_, k_ * (-lambda));
}

Polytope Polytope::translate(const VectorXd& t) const {
    if (t.size() != dim()) throw DimensionMismatch("translate: dimension");
    return from_inequalities(H_, k_ + H_ * t);
}

Polytope Polytope::remove_redundant() const {
    MatrixXd H = H_;
    VectorXd k = k_;
    std::vector<int> keep;
    for (int i = 0; i < H.rows(); ++i) keep.push_back(i);
    // Test one row at a time against all currently kept rows.
    for (int pos = static_cast<int>(keep.size()) - 1; pos >= 0; --pos) {
        const int row = keep[pos];
        MatrixXd Ho(keep.size() - 1, H.cols());
        VectorXd ko(keep.size() - 1);
        int w = 0;
        for (int j : keep) {
            if (j == row) continue;
            Ho.row(w) = H.row(j);
            ko(w) = k(j);
            ++w;
        }
        if (w == 0) continue;
        opt::LpProblem lp = opt::LpProblem::with_free_bounds(dim());
        lp.c = -H.row(row).transpose();
        lp.A_in = Ho;
        lp.b_in = ko;
        const opt::LpResult r = opt::solve_lp(lp);
        if (r.status == opt::LpStatus::Optimal &&
            -r.objective <= k(row) + 1e-9 * (1.0 + std::abs(k(row)))) {
            keep.erase(keep.begin() + pos);
        }
    }
    MatrixXd Hn(keep.size(), H.cols());
    VectorXd kn(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
        Hn.row(static_cast<int>(i)) = H.row(keep[i]);
        kn(static_cast<int>(i)) = k(keep[i]);
    }
    return from_inequalities(std::move(Hn), std::move(kn));
}

std::pair<VectorXd, VectorXd> Polytope::interval_hull() const {
    const int d = dim();
    VectorXd lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        VectorXd e = VectorXd::Zero(d);
        e(i) = 1.0;
        hi(i) = support(e);
        lo(i) = -support(-e);
    }
    return {lo, hi};
}

std::vector<VectorXd> Polytope::vertices() const {
    const int d = dim();
    std::vector<VectorXd> out;
    if (is_empty()) return out;
    if (d == 1) {
        auto [lo, hi] = interval_hull();
        VectorXd a(1), b(1);
        a << lo(0);
        b << hi(0);
        out.push_back(a);
        if (std::abs(hi(0) - lo(0)) > 1e-12) out.push_back(b);
        return out;
    }
    if (d != 2)
        throw DimensionMismatch("Polytope::vertices: exact enumeration limited to d <= 2");
    const double scale = 1.0 + k_.cwiseAbs().maxCoeff();
    for (int i = 0; i < num_rows(); ++i) {
        for (int j = i + 1; j < num_rows(); ++j) {
            Eigen::Matrix2d A;
            A << H_(i, 0), H_(i, 1), H_(j, 0), H_(j, 1);
            if (std::abs(A.determinant()) < 1e-12) continue;
            Eigen::Vector2d b(k_(i), k_(j));
            Eigen::Vector2d x = A.inverse() * b;
            if (!contains(x, 1e-7)) continue;
            bool dup = false;
            for (const auto& v : out)
                if ((v - x).norm() < 1e-8 * scale) { dup = true; break; }
            if (!dup) out.push_back(x);
        }
    }
    if (out.size() > 2) {
        VectorXd c = VectorXd::Zero(2);
        for (const auto& v : out) c += v;
        c /= static_cast<double>(out.size());
        std::sort(out.begin(), out.end(), [&c](const VectorXd& a, const VectorXd& b) {
            return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
        });
    }
    return out;
}

}  // namespace sgen

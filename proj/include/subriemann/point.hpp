#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <string>
#include <vector>

namespace subriemann {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Chart point z = (x^1, ..., x^n, y); the vertical coordinate is stored last.
struct Point {
    Vec z;

    Point() = default;
    explicit Point(Vec coords) : z(std::move(coords)) {}
    Point(const Vec& x, double y);
    Point(std::initializer_list<double> coords);

    static Point origin(int n);

    int n() const { return static_cast<int>(z.size()) - 1; }
    int dim() const { return static_cast<int>(z.size()); }
    double x(int i) const { return z[i]; }
    double& x(int i) { return z[i]; }
    double y() const { return z[z.size() - 1]; }
    double& y() { return z[z.size() - 1]; }
    Vec xs() const { return z.head(z.size() - 1); }

    // Box formulas use |x| = sum |x_i|; everything else uses the Euclidean norm.
    double x_l1() const;
    double norm() const { return z.norm(); }

    std::vector<double> to_vector() const;
    std::string str() const;
};

double distance(const Point& p, const Point& q);

// Axis-aligned box. Natural faces are boundaries of the data itself (e.g. the x = 0 face
// of the x >= 0 gallery entries), as opposed to faces introduced by a domain search.
struct DomainBox {
    Vec lo;
    Vec hi;
    std::vector<bool> natural_lo;
    std::vector<bool> natural_hi;

    DomainBox() = default;
    DomainBox(Vec lo_, Vec hi_);
    static DomainBox cube(int dim, double half_width);

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Point& p, double tol = 1e-12) const;
    // Snaps coordinates that lie within tol outside the box back onto it.
    Point clamp(const Point& p, double tol = 1e-12) const;
    // Distance from p to the faces of the box, optionally ignoring natural faces.
    double distance_to_boundary(const Point& p, bool ignore_natural) const;
    double diameter() const { return (hi - lo).norm(); }
    DomainBox intersect(const DomainBox& other) const;
    DomainBox hull(const DomainBox& other) const;
    // Box of half-width r around c clipped to *this; natural flags survive where faces coincide.
    DomainBox around(const Point& c, double r) const;
    Point center() const { return Point(Vec((lo + hi) / 2)); }
    std::string str() const;
};

}  // namespace subriemann

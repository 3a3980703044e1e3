#include "subriemann/point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subriemann {

Point::Point(const Vec& x, double y) : z(x.size() + 1) {
    z.head(x.size()) = x;
    z[x.size()] = y;
}

Point::Point(std::initializer_list<double> coords) : z(static_cast<Eigen::Index>(coords.size())) {
    Eigen::Index k = 0;
    for (double c : coords) z[k++] = c;
}

Point Point::origin(int n) { return Point(Vec::Zero(n + 1)); }

double Point::x_l1() const { return z.head(z.size() - 1).cwiseAbs().sum(); }

std::vector<double> Point::to_vector() const { return std::vector<double>(z.data(), z.data() + z.size()); }

std::string Point::str() const {
    std::ostringstream os;
    os.precision(12);
    os << "(";
    for (Eigen::Index k = 0; k < z.size(); ++k) os << (k ? ", " : "") << z[k];
    os << ")";
    return os.str();
}

double distance(const Point& p, const Point& q) { return (p.z - q.z).norm(); }

DomainBox::DomainBox(Vec lo_, Vec hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)), natural_lo(lo.size(), false), natural_hi(lo.size(), false) {}

DomainBox DomainBox::cube(int dim, double half_width) {
    return DomainBox(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

bool DomainBox::contains(const Point& p, double tol) const {
    if (p.dim() != dim()) return false;
    for (int k = 0; k < dim(); ++k) {
        double scale = tol * std::max(1.0, hi[k] - lo[k]);
        if (!(p.z[k] >= lo[k] - scale && p.z[k] <= hi[k] + scale)) return false;
    }
    return true;
}

Point DomainBox::clamp(const Point& p, double tol) const {
    Point q = p;
    for (int k = 0; k < dim(); ++k) {
        double scale = tol * std::max(1.0, hi[k] - lo[k]);
        if (q.z[k] < lo[k] && q.z[k] >= lo[k] - scale) q.z[k] = lo[k];
        if (q.z[k] > hi[k] && q.z[k] <= hi[k] + scale) q.z[k] = hi[k];
    }
    return q;
}

double DomainBox::distance_to_boundary(const Point& p, bool ignore_natural) const {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim(); ++k) {
        if (!(ignore_natural && natural_lo[k])) d = std::min(d, p.z[k] - lo[k]);
        if (!(ignore_natural && natural_hi[k])) d = std::min(d, hi[k] - p.z[k]);
    }
    return d;
}

DomainBox DomainBox::intersect(const DomainBox& other) const {
    DomainBox out(lo.cwiseMax(other.lo), hi.cwiseMin(other.hi));
    for (int k = 0; k < dim(); ++k) {
        out.natural_lo[k] = (out.lo[k] == lo[k] && natural_lo[k]) || (out.lo[k] == other.lo[k] && other.natural_lo[k]);
        out.natural_hi[k] = (out.hi[k] == hi[k] && natural_hi[k]) || (out.hi[k] == other.hi[k] && other.natural_hi[k]);
    }
    return out;
}

DomainBox DomainBox::hull(const DomainBox& other) const {
    DomainBox out(lo.cwiseMin(other.lo), hi.cwiseMax(other.hi));
    for (int k = 0; k < dim(); ++k) {
        out.natural_lo[k] = (out.lo[k] == lo[k] && natural_lo[k]) || (out.lo[k] == other.lo[k] && other.natural_lo[k]);
        out.natural_hi[k] = (out.hi[k] == hi[k] && natural_hi[k]) || (out.hi[k] == other.hi[k] && other.natural_hi[k]);
    }
    return out;
}

DomainBox DomainBox::around(const Point& c, double r) const {
    DomainBox b(Vec(c.z.array() - r), Vec(c.z.array() + r));
    return intersect(b);
}

std::string DomainBox::str() const {
    std::ostringstream os;
    os.precision(6);
    for (int k = 0; k < dim(); ++k) os << (k ? " x " : "") << "[" << lo[k] << ", " << hi[k] << "]";
    return os.str();
}

}  // namespace subriemann

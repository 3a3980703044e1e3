#include "subriemann/bundle.hpp"

#include "subriemann/errors.hpp"
#include "subriemann/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subriemann {

Vec AdaptedFrame::X(int i, const Point& p) const {
    Vec v = Vec::Zero(n() + 1);
    v[i] = 1.0;
    v[n()] = a[i](p);
    return v;
}

Mat AdaptedFrame::frame(const Point& p) const {
    Mat F = Mat::Zero(n() + 1, n());
    for (int i = 0; i < n(); ++i) {
        F(i, i) = 1.0;
        F(n(), i) = a[i](p);
    }
    return F;
}

namespace {

template <class F>
void for_grid_points(const DomainBox& d, int G, F&& body) {
    const int dim = d.dim();
    std::vector<int> idx(dim, 0);
    Point p(Vec(d.lo));
    while (true) {
        for (int k = 0; k < dim; ++k) p.z[k] = d.lo[k] + (d.hi[k] - d.lo[k]) * idx[k] / std::max(1, G - 1);
        body(p);
        int k = 0;
        while (k < dim && ++idx[k] == G) idx[k++] = 0;
        if (k == dim) break;
    }
}

std::vector<Point> grid_points(const DomainBox& d, int G) {
    std::vector<Point> pts;
    for_grid_points(d, G, [&](const Point& p) { pts.push_back(p); });
    return pts;
}

}  // namespace

AdaptedFrame adapted_frame(const CEDPair& pair, const Modulus& omega, double Ctilde, const FrameOptions& opt) {
    const int n = pair.n();
    AdaptedFrame fr;
    fr.omega = omega;
    fr.Ctilde = Ctilde;
    fr.domain = pair.domain;

    for_grid_points(pair.domain, opt.grid, [&](const Point& p) {
        double a0 = pair.eta.a0(p);
        if (!(std::fabs(a0) >= opt.a0_bound))
            throw TransversalityError("|eta(d_y)| = " + std::to_string(std::fabs(a0)) + " below bound at " + p.str());
    });
    Point o = Point::origin(n);
    if (pair.domain.contains(o)) {
        double a0 = pair.eta.a0(o);
        for (int i = 0; i < n; ++i) {
            double ai = pair.eta.a[i](o);
            if (std::fabs(ai) > opt.tol * std::max(1.0, std::fabs(a0)))
                throw NotAdaptedError("eta(d_" + std::to_string(i + 1) + ") = " + std::to_string(ai) + " at 0");
        }
    }

    for (int i = 0; i < n; ++i) {
        Evaluator Ai = pair.eta.a[i].f, A0 = pair.eta.a0.f;
        fr.a.emplace_back([Ai, A0](const Point& p) { return -Ai(p) / A0(p); });
    }

    for_grid_points(pair.domain, opt.grid, [&](const Point& p) {
        Vec c = pair.eta.coefficients(p);
        for (int i = 0; i < n; ++i) {
            double r = std::fabs(c.dot(fr.X(i, p)));
            if (r > opt.tol * std::max(1.0, c.norm()))
                throw PreconditionError("frame not annihilated by eta at " + p.str());
        }
    });
    return fr;
}

double estimate_ctilde(const AdaptedFrame& frame, const DomainBox& domain, const CtildeOptions& opt) {
    auto rng = make_rng(opt.seed, 0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int dim = domain.dim();
    auto random_point = [&] {
        Vec z(dim);
        for (int k = 0; k < dim; ++k) z[k] = domain.lo[k] + U(rng) * (domain.hi[k] - domain.lo[k]);
        return Point(z);
    };
    double diam = domain.diameter();
    double best = 0.0;
    for (int s = 0; s < opt.pairs; ++s) {
        Point p = random_point(), q;
        if (s % 2 == 0) {
            q = random_point();
        } else {
            // short pairs on a log scale probe the behavior of omega near 0
            double len = diam * std::pow(10.0, -8.0 + 7.0 * U(rng));
            Vec dir(dim);
            std::normal_distribution<double> N(0.0, 1.0);
            for (int k = 0; k < dim; ++k) dir[k] = N(rng);
            dir /= dir.norm();
            q = Point(Vec(p.z + len * dir));
            for (int k = 0; k < dim; ++k) q.z[k] = std::clamp(q.z[k], domain.lo[k], domain.hi[k]);
        }
        double w = frame.omega(distance(p, q));
        if (!(w > 0)) continue;
        for (int i = 0; i < frame.n(); ++i) best = std::max(best, std::fabs(frame.a[i](p) - frame.a[i](q)) / w);
    }
    return std::max(1.0, opt.inflation * best);
}

double nonintegrability(const CEDPair& pair, const Point& p) { return wedge_density(pair.eta, pair.deta, p); }

double deta_frame(const CEDPair& pair, const AdaptedFrame& frame, int i, int j, const Point& p) {
    return pair.deta.apply(p, frame.X(i, p), frame.X(j, p));
}

double lie_bracket(const CEDPair& pair, const AdaptedFrame& frame, int i, int j, const Point& p) {
    if (i == j) throw PreconditionError("lie_bracket needs i != j");
    return deta_frame(pair, frame, j, i, p) / pair.eta.a0(p);
}

PointNorms point_norms(const CEDPair& pair, const AdaptedFrame& frame, const Point& p) {
    const int n = frame.n();
    PointNorms r;
    Vec A = pair.eta.coefficients(p);
    r.eta_dy = std::fabs(A[n]);
    r.eta = A.norm();
    Mat M = pair.deta.matrix(p);
    r.deta = Eigen::JacobiSVD<Mat>(M).singularValues()[0];
    Mat F = frame.frame(p);

    Vec norms = F.colwise().norm();
    r.X_min = norms.minCoeff();
    r.X_max = norms.maxCoeff();
    r.wedge2_min = std::numeric_limits<double>::infinity();
    r.wedge2_max = 0.0;
    for (int l = 0; l < n; ++l)
        for (int k = l + 1; k < n; ++k) {
            double g = F.col(l).squaredNorm() * F.col(k).squaredNorm() - std::pow(F.col(l).dot(F.col(k)), 2);
            double w = std::sqrt(std::max(0.0, g));
            r.wedge2_min = std::min(r.wedge2_min, w);
            r.wedge2_max = std::max(r.wedge2_max, w);
        }
    Mat full(n + 1, n + 1);
    full.leftCols(n) = F;
    full.col(n) = Vec::Unit(n + 1, n);
    r.wedge_all = std::fabs(full.determinant());

    r.pair_values = F.transpose() * M * F;

    Eigen::HouseholderQR<Mat> qr(F);
    Mat Q = qr.householderQ() * Mat::Identity(n + 1, n);
    Mat S = Q.transpose() * M * Q;
    if (n == 2) {
        r.m_deta = std::fabs(S(0, 1));
        r.deta_delta = r.m_deta;
    } else {
        // For n >= 3 some unit bivector in Delta_q always has a null direction of S.
        r.m_deta = 0.0;
        r.deta_delta = Eigen::JacobiSVD<Mat>(S).singularValues()[0];
    }

    if (frame.metric == MetricKind::FrameOrthonormal) {
        Eigen::SelfAdjointEigenSolver<Mat> es(F.transpose() * F);
        double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
        r.gram_dg = std::max({1.0, std::sqrt(lmax), 1.0 / std::sqrt(lmin)});
    }
    return r;
}

double K1_of(double m_deta_inf, double eta_dy_sup) { return m_deta_inf / (42.0 * eta_dy_sup); }

double K2_of(int n, double gromov_c, double deta_delta_sup, double eta_dy_inf) {
    return 42.0 * (1.0 + 2.0 * n) * (1.0 + 2.0 * n) * gromov_c * deta_delta_sup / eta_dy_inf;
}

DomainConstants estimate_constants(const CEDPair& pair, const AdaptedFrame& frame, const DomainBox& domain,
                                   int grid_per_axis, bool require_witness) {
    const int n = frame.n();
    std::vector<Point> pts = grid_points(domain, grid_per_axis);
    std::vector<PointNorms> vals(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int k) { vals[k] = point_norms(pair, frame, pts[k]); });

    DomainConstants c;
    c.n = n;
    c.domain = domain;
    c.grid_per_axis = grid_per_axis;
    c.grid_points = static_cast<int>(pts.size());
    const double inf = std::numeric_limits<double>::infinity();
    c.eta_dy_inf = c.m_deta_inf = c.X_inf = c.wedge2_inf = c.wedge_all_inf = inf;
    c.d_g = 1.0;
    for (const auto& v : vals) {
        c.eta_dy_inf = std::min(c.eta_dy_inf, v.eta_dy);
        c.eta_dy_sup = std::max(c.eta_dy_sup, v.eta_dy);
        c.m_deta_inf = std::min(c.m_deta_inf, v.m_deta);
        c.deta_delta_sup = std::max(c.deta_delta_sup, v.deta_delta);
        c.deta_sup = std::max(c.deta_sup, v.deta);
        c.eta_sup = std::max(c.eta_sup, v.eta);
        c.X_inf = std::min(c.X_inf, v.X_min);
        c.X_sup = std::max(c.X_sup, v.X_max);
        c.wedge2_inf = std::min(c.wedge2_inf, v.wedge2_min);
        c.wedge2_sup = std::max(c.wedge2_sup, v.wedge2_max);
        c.wedge_all_inf = std::min(c.wedge_all_inf, v.wedge_all);
        c.wedge_all_sup = std::max(c.wedge_all_sup, v.wedge_all);
        c.d_g = std::max(c.d_g, v.gram_dg);
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double lo = inf, hi = 0.0;
            int pos = 0, neg = 0;
            for (const auto& v : vals) {
                double d = v.pair_values(i, j);
                lo = std::min(lo, std::fabs(d));
                hi = std::max(hi, std::fabs(d));
                pos += d > 0;
                neg += d < 0;
            }
            c.max_pair_abs = std::max(c.max_pair_abs, hi);
            double eff = (pos > 0 && neg > 0) ? 0.0 : lo;
            if (eff > c.witness_inf) {
                c.witness_inf = eff;
                c.witness_sup = hi;
                c.witness_i = i;
                c.witness_j = j;
                c.witness_sign = pos > 0 ? 1 : -1;
            }
        }
    if (require_witness && !(c.witness_inf > 0))
        throw DegenerateBundleError("no non-integrability witness on " + domain.str() +
                                    "; max |d eta(X_i, X_j)| seen = " + std::to_string(c.max_pair_abs));

    c.Ctilde = frame.Ctilde;
    c.omega = frame.omega.name();
    c.cell_diameter = ((domain.hi - domain.lo) / std::max(1, grid_per_axis - 1)).norm();
    c.omega_margin = frame.Ctilde * frame.omega(c.cell_diameter);
    c.K1 = K1_of(c.m_deta_inf, c.eta_dy_sup);
    c.K2 = K2_of(n, c.gromov_c, c.deta_delta_sup, c.eta_dy_inf);
    return c;
}

std::map<std::string, bool> domain_checks(const DomainConstants& k, std::map<std::string, double>* slack) {
    const double mg = k.omega_margin;
    const int n = k.n;
    // frame increments of size mg move bilinear quantities by at most these amounts
    const double pair_shift = k.deta_sup * (2.0 * k.X_sup * mg + mg * mg);
    const double wedge2_shift = 2.0 * k.X_sup * mg + mg * mg;
    const double wedge_all_shift = n * std::pow(k.X_sup + mg, n - 1) * mg;

    std::map<std::string, double> s;
    s["noninvolutive"] = (k.witness_inf - pair_shift);
    s["normX_lower"] = (k.X_inf - mg) - 0.5;
    s["normX_upper"] = 2.0 - (k.X_sup + mg);
    s["normX2_lower"] = (k.wedge2_inf - wedge2_shift) - 0.5;
    s["normX2_upper"] = 2.0 - (k.wedge2_sup + wedge2_shift);
    s["normX3_lower"] = (k.wedge_all_inf - wedge_all_shift) - 1.0 / 1.75;
    s["normX3_upper"] = 2.0 - (k.wedge_all_sup + wedge_all_shift);

    std::map<std::string, bool> ok;
    ok["noninvolutive"] = s["noninvolutive"] > 0;
    ok["normX"] = s["normX_lower"] >= 0 && s["normX_upper"] >= 0;
    ok["normX2"] = s["normX2_lower"] >= 0 && s["normX2_upper"] >= 0;
    ok["normX3"] = s["normX3_lower"] >= 0 && s["normX3_upper"] >= 0;
    if (slack) *slack = s;
    return ok;
}

double estimate1_lhs(const DomainConstants& k, const Modulus& omega, double eps0) {
    const int n = k.n;
    const double w = k.Ctilde * omega(13.0 * (k.gromov_c + 1.0) * eps0);
    return k.deta_sup * w * (4.0 + w) * std::pow(2.0 * n, n + 7) * k.d_g * k.d_g;
}

double remaininside_reach(const DomainConstants& k, double eps0) {
    return (13.0 + (k.gromov_c + 1.0) * (2.0 + 6.0 * k.n) * k.d_g) * eps0;
}

std::map<std::string, bool> eps0_checks(const DomainConstants& k, const Modulus& omega, const DomainBox& U,
                                        const Point& p0, double eps0, std::map<std::string, double>* slack) {
    const double room = U.distance_to_boundary(p0, true);
    const double reach = remaininside_reach(k, eps0);
    const double lhs = estimate1_lhs(k, omega, eps0);
    std::map<std::string, bool> ok;
    ok["remaininside1"] = eps0 > 0 && reach <= room;
    ok["estimate1"] = eps0 > 0 && lhs < 0.25 * k.witness_inf;
    ok["estimate3"] = eps0 > 0 && 3.0 * eps0 <= k.gromov_delta;
    if (slack) {
        (*slack)["remaininside1"] = room - reach;
        (*slack)["estimate1"] = 0.25 * k.witness_inf - lhs;
        (*slack)["estimate3"] = k.gromov_delta - 3.0 * eps0;
    }
    return ok;
}

FixResult fix_domain(const CEDPair& pair, const AdaptedFrame& frame, const Point& p0, const FixOptions& opt) {
    if (!(std::fabs(nonintegrability(pair, p0)) > 0))
        throw DegenerateBundleError("eta ^ d eta vanishes at " + p0.str());
    const DomainBox& D = pair.domain;
    double r0 = 0.0;
    for (int k = 0; k < D.dim(); ++k) r0 = std::max({r0, p0.z[k] - D.lo[k], D.hi[k] - p0.z[k]});

    FixResult res;
    std::string last_failure;
    for (double r = r0; r >= opt.floor_fraction * r0; r /= 2) {
        DomainBox U = D.around(p0, r);
        DomainConstants k = estimate_constants(pair, frame, U, opt.grid_per_axis, false);
        std::map<std::string, double> slack;
        auto ok = domain_checks(k, &slack);
        bool all = std::all_of(ok.begin(), ok.end(), [](const auto& kv) { return kv.second; });
        if (all) {
            res.U = U;
            res.constants = k;
            res.r = r;
            res.checks = ok;
            res.slack = slack;
            break;
        }
        last_failure.clear();
        for (const auto& [name, pass] : ok)
            if (!pass) last_failure += (last_failure.empty() ? "" : ", ") + name;
        if (!(r / 2 >= opt.floor_fraction * r0)) {
            std::ostringstream os;
            os << "no box around " << p0.str() << " down to half-width " << r << " satisfies: " << last_failure
               << "; max |d eta(X_i, X_j)| seen = " << k.max_pair_abs;
            throw DegenerateBundleError(os.str());
        }
    }

    DomainConstants& k = res.constants;
    k.eps0 = 0.0;
    k.eps0_status = "underflow";
    for (double eps = res.r; eps >= std::numeric_limits<double>::denorm_min(); eps /= 2) {
        auto ok = eps0_checks(k, frame.omega, res.U, p0, eps, nullptr);
        if (std::all_of(ok.begin(), ok.end(), [](const auto& kv) { return kv.second; })) {
            k.eps0 = eps;
            k.eps0_status = "ok";
            break;
        }
    }
    std::map<std::string, double> s;
    for (const auto& [name, pass] : eps0_checks(k, frame.omega, res.U, p0, k.eps0, &s)) res.checks[name] = pass;
    for (const auto& [name, v] : s) res.slack[name] = v;
    return res;
}

std::map<std::string, bool> recheck_fix(const CEDPair& pair, const AdaptedFrame& frame, const FixResult& fix,
                                        const Point& p0, int grid_factor) {
    int G = (fix.constants.grid_per_axis - 1) * grid_factor + 1;
    DomainConstants k = estimate_constants(pair, frame, fix.U, G, false);
    // the margin is carried from the original grid, which is the coarser (more conservative) one
    k.omega_margin = fix.constants.omega_margin;
    auto ok = domain_checks(k);
    if (fix.constants.eps0 > 0)
        for (const auto& [name, pass] : eps0_checks(k, frame.omega, fix.U, p0, fix.constants.eps0, nullptr))
            ok[name] = pass;
    return ok;
}

}  // namespace subriemann

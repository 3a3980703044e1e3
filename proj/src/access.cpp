#include "subriemann/access.hpp"

#include "subriemann/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace subriemann {

namespace {

int sign_of(double v, double tol = 0.0) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

std::string orientation_name(LoopOrientation o) {
    return std::string(o.si > 0 ? "+" : "-") + "X_i, " + (o.sj > 0 ? "+" : "-") + "X_j";
}

}  // namespace

AdmissiblePath loop_path(const AdaptedFrame& frame, const Point& q1, double eps_tilde, int i, int j,
                         LoopOrientation o, double h, const FlowOptions& opt) {
    std::vector<FlowSpec> specs{{i, o.si, eps_tilde, h}, {j, o.sj, eps_tilde, h}, {i, -o.si, eps_tilde, h},
                                {j, -o.sj, eps_tilde, h}};
    return run_path(frame, q1, specs, opt);
}

Point loop_endpoint(const AdaptedFrame& frame, const Point& q1, double eps_tilde, int i, int j, LoopOrientation o,
                    double h, const FlowOptions& opt) {
    return loop_path(frame, q1, eps_tilde, i, j, o, h, opt).end();
}

int predicted_loop_sign(const CEDPair& pair, const AdaptedFrame& frame, const Point& q1, int i, int j,
                        LoopOrientation o) {
    return o.si * o.sj * sign_of(lie_bracket(pair, frame, i, j, q1));
}

ShootResult shoot_loop(const CEDPair& pair, const AdaptedFrame& frame, const Point& q1, const Point& target,
                       double eps_max, int i, int j, const ShootOptions& opt) {
    if ((target.xs() - q1.xs()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q1.xs().cwiseAbs().maxCoeff()))
        throw PreconditionError("target " + target.str() + " is not on the vertical line through " + q1.str());
    const double dy = target.y() - q1.y();
    ShootResult res;
    res.path.start = q1;
    res.path.metric = frame.metric;
    if (dy == 0.0) return res;
    if (opt.guarantee && std::fabs(dy) > *opt.guarantee * (1.0 + 1e-9)) {
        std::ostringstream os;
        os.precision(12);
        os << "vertical gap " << std::fabs(dy) << " exceeds the guaranteed displacement " << *opt.guarantee;
        throw RangeError(os.str());
    }
    const int want = dy > 0 ? 1 : -1;
    const double need = std::fabs(dy);

    std::vector<LoopOrientation> all{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    std::vector<LoopOrientation> candidates;
    for (auto o : all)
        if (predicted_loop_sign(pair, frame, q1, i, j, o) == want) candidates.push_back(o);
    if (candidates.empty()) candidates = all;

    FlowOptions fo = opt.flow;
    auto f = [&](LoopOrientation o, double e) {
        Point q2 = loop_endpoint(frame, q1, e, i, j, o, opt.h, fo);
        return want * (q2.y() - q1.y()) - need;
    };

    std::optional<LoopOrientation> chosen;
    double f_hi = 0.0;
    bool escaped_only = true;
    for (auto o : candidates) {
        try {
            f_hi = f(o, eps_max);
        } catch (const EscapeError&) {
            res.skipped.push_back(orientation_name(o));
            continue;
        }
        escaped_only = false;
        if (f_hi >= 0.0) {
            chosen = o;
            break;
        }
    }
    if (!chosen) {
        if (escaped_only && !candidates.empty())
            throw EscapeError("every loop orientation leaves the domain at eps_max", q1.to_vector());
        std::ostringstream os;
        os.precision(12);
        os << "loop displacement at eps_max = " << eps_max << " does not reach the target gap " << need
           << " with the predicted orientation";
        throw SignLogicError(os.str());
    }

    double lo = 0.0, hi = eps_max, eps = eps_max, fe = f_hi;
    int it = 0;
    if (std::fabs(f_hi) > opt.gap_tol) {
        for (it = 0; it < opt.max_iter; ++it) {
            eps = 0.5 * (lo + hi);
            fe = f(*chosen, eps);
            if (std::fabs(fe) <= opt.gap_tol) break;
            if (fe < 0)
                lo = eps;
            else
                hi = eps;
        }
    }
    res.eps_tilde = eps;
    res.orientation = *chosen;
    res.iterations = it;
    FlowOptions keep = fo;
    keep.keep_samples = opt.keep_samples;
    res.path = loop_path(frame, q1, eps, i, j, *chosen, opt.h, keep);
    res.residual = std::fabs(res.path.end().y() - target.y());
    return res;
}

ConnectResult connect(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k, const Point& p,
                      double eps_budget, const SurfaceW* W, const ConnectOptions& opt) {
    const double dg = k.d_g;
    const double eps = eps_budget;
    ConnectResult res;
    res.budget = eps_budget;
    const double xl1 = p.x_l1();
    if (xl1 > eps / (4.0 * dg) * (1.0 + 1e-12))
        throw PreconditionError("|x| = " + std::to_string(xl1) + " exceeds eps/(4 d_g)");
    if (W && !W->covers(p.xs())) throw PreconditionError("W does not cover the x-coordinates of " + p.str());

    res.tau = compose_T_path(frame, p.xs(), opt.h, opt.shoot.flow);
    res.q1 = res.tau.end();
    const double allowed = k.K1 * eps * eps / (16.0 * dg * dg);
    const double dy = p.y() - res.q1.y();
    if (std::fabs(dy) > allowed * (1.0 + 1e-9))
        throw PreconditionError("vertical gap to W exceeds K1 eps^2 / (16 d_g^2)");

    const double eps_max = eps / (16.0 * dg);
    ShootOptions so = opt.shoot;
    so.h = std::min(so.h, opt.h);
    // equals K1 eps^2 / (16 d_g^2) by the choice of K1
    so.guarantee = std::max(allowed, 8.0 / 21.0 * eps_max * eps_max * k.m_deta_inf / k.eta_dy_sup);
    Point target(Vec(res.q1.z));
    target.y() = p.y();
    ShootResult shot = shoot_loop(pair, frame, res.q1, target, eps_max, k.witness_i, k.witness_j, so);
    res.gamma = shot.path;
    res.eps_tilde = shot.eps_tilde;
    res.path = concat(res.tau, res.gamma);
    res.g_length = res.path.g_length();
    res.within_budget = res.g_length <= eps_budget;
    return res;
}

double parallelogram_integral(const CEDPair& pair, const AdaptedFrame& frame, const Point& q, int i, int j,
                              double eps, int mesh) {
    Vec Xi = frame.X(i, q), Xj = frame.X(j, q);
    Vec base = q.z;
    for (double s : {0.0, 1.0})
        for (double t : {0.0, 1.0}) {
            Point c(Vec(base + eps * s * Xi + eps * t * Xj));
            if (!pair.domain.contains(c)) throw EscapeError("parallelogram leaves the domain", c.to_vector());
        }
    Chain2 P;
    P.cells.push_back({[=](double s, double t) { return Point(Vec(base + eps * s * Xi + eps * t * Xj)); }, 1, mesh});
    return integrate_chain2(pair.deta, P, QuadratureOptions{Grading::Uniform});
}

Filling gromov_fill(const std::vector<Point>& polygon_in, int mesh, double closure_tol) {
    if (polygon_in.size() < 2) throw PreconditionError("filling needs a closed polygon");
    double scale = 1.0;
    for (const auto& v : polygon_in) scale = std::max(scale, v.z.cwiseAbs().maxCoeff());
    if (distance(polygon_in.front(), polygon_in.back()) > closure_tol * scale)
        throw PreconditionError("cannot fill an open cycle");
    std::vector<Point> poly(polygon_in.begin(), polygon_in.end() - 1);
    Filling F;
    const std::size_t m = poly.size();
    Vec bary = Vec::Zero(poly.front().dim());
    for (std::size_t k = 0; k < m; ++k) {
        const Vec& a = poly[k].z;
        const Vec& b = poly[(k + 1) % m].z;
        double len = (b - a).norm();
        F.length += len;
        bary += len * (a + b) / 2;
    }
    if (F.length == 0.0) {
        F.apex = poly.front();
        return F;
    }
    bary /= F.length;
    F.apex = Point(bary);
    for (std::size_t k = 0; k < m; ++k) {
        Vec a = poly[k].z, b = poly[(k + 1) % m].z;
        if ((b - a).norm() == 0.0) continue;
        Vec u = a - bary, v = b - bary;
        F.area += 0.5 * std::sqrt(std::max(0.0, u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2)));
        // distance from the apex to this edge bounds the distance of the whole triangle to the polygon
        Vec e = b - a;
        double t = std::clamp((bary - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
        F.max_distance = std::max(F.max_distance, (a + t * e - bary).norm());
        F.chain.cells.push_back(
            {[bary, a, b](double s, double t2) { return Point(Vec(bary + s * (a - bary) + s * t2 * (b - a))); }, 1,
             mesh});
    }
    return F;
}

std::pair<AdmissiblePath, AdmissiblePath> loop_halves(const AdaptedFrame& frame, const Point& q1, double eps_tilde,
                                                      int i, int j, LoopOrientation o, double h,
                                                      const FlowOptions& opt) {
    AdmissiblePath up = run_path(frame, q1, {{i, o.si, eps_tilde, h}, {j, o.sj, eps_tilde, h}}, opt);
    Point q = up.end();
    AdmissiblePath g1 = run_path(frame, q, {{j, -o.sj, eps_tilde, h}, {i, -o.si, eps_tilde, h}}, opt);
    AdmissiblePath g2 = run_path(frame, q, {{i, -o.si, eps_tilde, h}, {j, -o.sj, eps_tilde, h}}, opt);
    return {g1, g2};
}

namespace {

// alpha(s) = q + sum_k (x_k(s) - q_k) X_k(q): the frozen-frame image of a path with the same controls.
Point frozen(const Point& p, const Point& q, const Vec& aq) {
    Point a = p;
    a.y() = q.y() + (p.xs() - q.xs()).dot(aq);
    return a;
}

// Ruled surface v(t, s) = alpha(s) + t (gamma(s) - alpha(s)) over one segment, gamma interpolated
// linearly between flow samples.
Cell2 ruled_cell(const std::vector<Point>& g, const Point& q, const Vec& aq) {
    std::vector<Point> al;
    for (const auto& p : g) al.push_back(frozen(p, q, aq));
    const int M = static_cast<int>(g.size()) - 1;
    auto map = [g, al, M](double t, double u) {
        double x = std::clamp(u, 0.0, 1.0) * M;
        int j = std::min(static_cast<int>(x), M - 1);
        double f = x - j;
        Vec gv = (1 - f) * g[j].z + f * g[j + 1].z;
        Vec av = (1 - f) * al[j].z + f * al[j + 1].z;
        return Point(Vec(av + t * (gv - av)));
    };
    return Cell2{map, 1, M};
}

double ruled_integral(const CEDPair& pair, const AdmissiblePath& path, const Point& q, const Vec& aq) {
    Chain2 ch;
    for (const auto& s : path.segments) ch.cells.push_back(ruled_cell(s.samples, q, aq));
    return integrate_chain2(pair.deta, ch, QuadratureOptions{Grading::Uniform});
}

// Integral of eta along the sample polyline (3-point Gauss per chord). The polyline differs from the
// admissible path by a thin sliver whose d eta integral equals this value, by Stokes.
double polyline_integral(const CEDPair& pair, const AdmissiblePath& path) {
    static const double node[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
    static const double weight[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    double s = 0.0;
    for (const auto& g : path.segments)
        for (std::size_t m = 0; m + 1 < g.samples.size(); ++m) {
            const Vec& a = g.samples[m].z;
            Vec d = g.samples[m + 1].z - a;
            const int sub = 8;
            for (int r = 0; r < sub; ++r) {
                double u0 = grade(double(r) / sub, Grading::Endpoint), u1 = grade(double(r + 1) / sub, Grading::Endpoint);
                for (int k = 0; k < 3; ++k)
                    s += (u1 - u0) * weight[k] * pair.eta.apply(Point(Vec(a + (u0 + node[k] * (u1 - u0)) * d)), d);
            }
        }
    return s;
}

double max_speed(const AdaptedFrame& frame, const AdmissiblePath& path) {
    double m = 0.0;
    for (const auto& s : path.segments)
        for (const auto& p : s.samples) m = std::max(m, frame.X(s.spec.i, p).norm());
    return m;
}

}  // namespace

Prop22Report verify_prop22(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                           const DomainBox& U, const AdmissiblePath& gamma1, const AdmissiblePath& gamma2,
                           const Prop22Options& opt) {
    Prop22Report r;
    const int n = frame.n();
    r.q = gamma1.start;
    if (distance(gamma1.start, gamma2.start) > 1e-12 * std::max(1.0, r.q.norm()))
        throw PreconditionError("gamma1 and gamma2 must start at the same point");
    r.q1 = gamma1.end();
    r.q2 = gamma2.end();
    if ((r.q1.xs() - r.q2.xs()).cwiseAbs().maxCoeff() > 1e-9)
        throw PreconditionError("endpoints must share x-coordinates");
    for (const auto* g : {&gamma1, &gamma2})
        for (const auto& s : g->segments)
            if (s.samples.size() < 2) throw PreconditionError("paths must carry flow samples");

    r.eps1 = gamma1.duration();
    r.eps2 = gamma2.duration();
    r.eps = std::max(r.eps1, r.eps2);
    r.ell = std::max(gamma1.euclidean_length(), gamma2.euclidean_length());
    if (U.distance_to_boundary(r.q, true) < 2.0 * r.ell) throw PreconditionError("B(q, 2 ell) is not inside U");

    const double shape = n * std::pow(n * k.X_sup, n) / k.wedge_all_inf;
    const double w = frame.Ctilde * frame.omega(r.ell);
    r.xi = shape * std::max(max_speed(frame, gamma1), max_speed(frame, gamma2)) * w;

    Vec aq(n);
    for (int i = 0; i < n; ++i) aq[i] = frame.a[i](r.q);

    r.int_C1 = ruled_integral(pair, gamma1, r.q, aq);
    r.int_C2 = ruled_integral(pair, gamma2, r.q, aq);
    // sliver between each sampled polyline and its admissible path
    const double sliver = polyline_integral(pair, gamma2) - polyline_integral(pair, gamma1);
    r.path_defect = std::fabs(sliver);
    r.c = r.int_C2 - r.int_C1 - sliver;
    r.c_bound = 4.0 * r.ell * r.eps * r.xi * k.deta_sup;

    // boundary of P is alpha2 - alpha1
    std::vector<Point> poly{r.q};
    for (const auto& s : gamma2.segments) poly.push_back(frozen(s.end, r.q, aq));
    for (auto it = gamma1.segments.rbegin(); it != gamma1.segments.rend(); ++it)
        poly.push_back(frozen(it->start, r.q, aq));
    Filling P = gromov_fill(poly, opt.mesh);
    r.int_P = integrate_chain2(pair.deta, P.chain);

    Point a = r.q2, b = r.q1;
    Edge beta{[a, b](double s) { return Point(Vec(a.z + s * (b.z - a.z))); }, 1, 64};
    r.int_beta = integrate_chain1(pair.eta, Chain1{{beta}});
    r.gap = distance(r.q1, r.q2);
    r.identity_residual = std::fabs(r.int_beta - (r.int_P + r.c));

    r.lower = (std::fabs(r.int_P) - std::fabs(r.c)) / k.eta_dy_sup;
    r.upper = (std::fabs(r.int_P) + std::fabs(r.c)) / k.eta_dy_inf;
    const double tol = opt.rel_tol * std::max(std::fabs(r.int_P), r.gap) + opt.abs_tol;
    r.c_bound_ok = std::fabs(r.c) <= r.c_bound + tol;
    r.bracket_ok = r.lower <= r.gap + tol && r.gap <= r.upper + tol;
    r.observed_sign = sign_of(r.int_beta, tol);
    r.predicted_sign = sign_of(r.int_P + r.c, tol);
    r.sign_ok = r.observed_sign == r.predicted_sign;
    return r;
}

}  // namespace subriemann

namespace subriemann {

namespace {

bool respects_natural(const DomainBox& U, const Point& start, const std::vector<FlowSpec>& specs) {
    Vec x = start.xs();
    for (const auto& s : specs) {
        x[s.i] += s.sign * s.t;
        if (U.natural_lo[s.i] && x[s.i] < U.lo[s.i]) return false;
        if (U.natural_hi[s.i] && x[s.i] > U.hi[s.i]) return false;
    }
    return true;
}

}  // namespace

PathPair random_path_pair(const AdaptedFrame& frame, const DomainBox& U, double max_length, std::mt19937_64& rng,
                          bool loop, double h) {
    const int n = frame.n();
    std::uniform_real_distribution<double> Uni(0.0, 1.0);
    std::exponential_distribution<double> Exp(1.0);
    FlowOptions fo;
    fo.keep_samples = true;
    fo.domain = U;
    for (int attempt = 0; attempt < 200; ++attempt) {
        const double len = max_length * (0.2 + 0.8 * Uni(rng));
        Vec z(n + 1);
        for (int k = 0; k <= n; ++k) z[k] = U.lo[k] + Uni(rng) * (U.hi[k] - U.lo[k]);
        // a third of the starts sit on a natural face
        for (int k = 0; k < n; ++k)
            if (U.natural_lo[k] && Uni(rng) < 0.3) z[k] = U.lo[k];
        Point start(z);
        PathPair out;
        try {
            if (loop) {
                out.kind = "loop";
                LoopOrientation o{Uni(rng) < 0.5 ? 1 : -1, Uni(rng) < 0.5 ? 1 : -1};
                int i = 0, j = 1 + static_cast<int>(Uni(rng) * (n - 1));
                double e = len / 4;
                std::vector<FlowSpec> up{{i, o.si, e, h}, {j, o.sj, e, h}};
                if (!respects_natural(U, start, up)) continue;
                Point q = run_path(frame, start, up, fo).end();
                std::vector<FlowSpec> s1{{j, -o.sj, e, h}, {i, -o.si, e, h}};
                std::vector<FlowSpec> s2{{i, -o.si, e, h}, {j, -o.sj, e, h}};
                if (!respects_natural(U, q, s1) || !respects_natural(U, q, s2)) continue;
                out.gamma1 = run_path(frame, q, s1, fo);
                out.gamma2 = run_path(frame, q, s2, fo);
            } else {
                out.kind = "shuffle";
                const int m = 2 + static_cast<int>(Uni(rng) * 7);
                std::vector<FlowSpec> s1;
                std::vector<double> w(m);
                double tot = 0;
                for (auto& v : w) tot += (v = Exp(rng));
                for (int a = 0; a < m; ++a)
                    s1.push_back({static_cast<int>(Uni(rng) * n) % n, Uni(rng) < 0.5 ? 1 : -1, len / 2 * w[a] / tot, h});
                if (!respects_natural(U, start, s1)) continue;
                std::vector<FlowSpec> s2;
                bool found = false;
                for (int t = 0; t < 20 && !found; ++t) {
                    s2 = s1;
                    std::shuffle(s2.begin(), s2.end(), rng);
                    found = respects_natural(U, start, s2);
                }
                if (!found) continue;
                out.gamma1 = run_path(frame, start, s1, fo);
                out.gamma2 = run_path(frame, start, s2, fo);
            }
        } catch (const EscapeError&) {
            continue;
        }
        double ell = std::max(out.gamma1.euclidean_length(), out.gamma2.euclidean_length());
        if (U.distance_to_boundary(out.gamma1.start, true) < 2 * ell) continue;
        return out;
    }
    throw PreconditionError("no path pair satisfying the hypotheses found in U");
}

}  // namespace subriemann

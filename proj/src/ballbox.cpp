#include "subriemann/ballbox.hpp"

#include "subriemann/errors.hpp"
#include "subriemann/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace subriemann {

BoxSpec BoxSpec::diamond(double K, double eps, double Ctilde, Modulus omega) {
    BoxSpec b;
    b.kind = Kind::Diamond;
    b.K = K;
    b.epsilon = eps;
    b.Ctilde = Ctilde;
    b.omega = std::move(omega);
    return b;
}

BoxSpec BoxSpec::hourglass(double K, double eps, double Ctilde, Modulus omega) {
    BoxSpec b = diamond(K, eps, Ctilde, std::move(omega));
    b.kind = Kind::Hourglass;
    return b;
}

BoxSpec BoxSpec::box(double K, double eps) {
    BoxSpec b;
    b.kind = Kind::Box;
    b.K = K;
    b.epsilon = eps;
    return b;
}

BoxSpec BoxSpec::bw_box(double K, double eps, std::shared_ptr<const SurfaceW> W) {
    BoxSpec b = box(K, eps);
    b.kind = Kind::BWBox;
    b.W = std::move(W);
    return b;
}

std::string BoxSpec::name() const {
    switch (kind) {
        case Kind::Diamond: return "diamond";
        case Kind::Hourglass: return "hourglass";
        case Kind::Box: return "box";
        case Kind::BWBox: return "bw-box";
    }
    return "?";
}

Membership box_membership(const BoxSpec& s, const Point& p, double tol) {
    const double x = p.x_l1();
    const double y = std::fabs(p.y());
    const double eps = s.epsilon;
    double margin = 0.0;
    switch (s.kind) {
        case BoxSpec::Kind::Diamond:
            margin = eps - (x + std::sqrt(s.K * (x * s.Ctilde * s.omega(2 * x) + y)));
            break;
        case BoxSpec::Kind::Hourglass:
            margin = std::min(eps - x, s.K * eps * eps + x * s.Ctilde * s.omega(2 * x) - y);
            break;
        case BoxSpec::Kind::Box:
            margin = std::min(eps - x, s.K * eps * eps - y);
            break;
        case BoxSpec::Kind::BWBox: {
            if (!s.W) throw PreconditionError("bw-box needs a reference surface");
            if (!s.W->covers(p.xs())) {
                margin = eps - x;
                if (margin >= 0) throw ExtrapolationError("bw-box query outside the sampled W grid");
                break;
            }
            margin = std::min(eps - x, s.K * eps * eps - std::fabs(p.y() - s.W->height(p.xs())));
            break;
        }
    }
    return {margin >= -tol, margin};
}

double diamond_radius(const BoxSpec& d) {
    auto g = [&](double r) { return r + std::sqrt(d.K * r * d.Ctilde * d.omega(2 * r)) - d.epsilon; };
    double lo = 0.0, hi = d.epsilon;
    if (g(hi) <= 0) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * d.epsilon; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) <= 0 ? lo : hi) = mid;
    }
    return lo;
}

double diamond_height(const BoxSpec& d, double r) {
    double e = d.epsilon - r;
    if (e <= 0) return 0.0;
    return std::max(0.0, e * e / d.K - r * d.Ctilde * d.omega(2 * r));
}

Point c1_forward(const SurfaceW& W, const Point& p) {
    Point q = p;
    q.y() -= W.height(p.xs());
    return q;
}

Point c1_inverse(const SurfaceW& W, const Point& p) {
    Point q = p;
    q.y() += W.height(p.xs());
    return q;
}

GapEstimate upper_gap_estimate(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                               const DomainBox& U, const AdmissiblePath& gamma1, double h) {
    if (gamma1.start.norm() != 0.0) throw PreconditionError("gamma1 must start at the origin");
    FlowOptions fo;
    fo.keep_samples = true;
    AdmissiblePath gamma2 = compose_T_path(frame, gamma1.end().xs(), h, fo);
    Prop22Report r = verify_prop22(pair, frame, k, U, gamma1, gamma2);
    GapEstimate g;
    g.gap = r.gap;
    g.int_P = r.int_P;
    g.c = r.c;
    g.c_bound = r.c_bound;
    g.fill_length = gamma1.euclidean_length() + gamma2.euclidean_length();
    if (g.fill_length > k.gromov_delta) throw PreconditionError("filling length exceeds the Gromov delta");
    g.bound = (std::fabs(r.int_P) + r.c_bound) / k.eta_dy_inf;
    g.ok = g.gap <= g.bound * (1 + 1e-6) + 1e-11;
    return g;
}

DomainConstants reach_constants(const CEDPair& pair, const AdaptedFrame& frame, const FixResult& fix, double eps,
                                int grid_per_axis) {
    const int n = frame.n();
    const double R = 2.0 * n * fix.constants.d_g * eps;
    DomainBox D = fix.U.hull(DomainBox::cube(n + 1, R)).intersect(pair.domain);
    DomainConstants k = estimate_constants(pair, frame, D, grid_per_axis);
    k.eps0 = fix.constants.eps0;
    k.eps0_status = fix.constants.eps0_status;
    return k;
}

namespace {

std::vector<FlowSpec> reflected_specs(const DomainBox& domain, const Point& start, const std::vector<int>& dirs,
                                      const std::vector<int>& signs, const std::vector<double>& t, double h) {
    std::vector<FlowSpec> specs;
    Vec x = start.xs();
    for (std::size_t m = 0; m < dirs.size(); ++m) {
        int k = dirs[m], s = signs[m];
        if (s < 0 && domain.natural_lo[k] && x[k] - t[m] < domain.lo[k]) s = 1;
        if (s > 0 && domain.natural_hi[k] && x[k] + t[m] > domain.hi[k]) s = -1;
        x[k] += s * t[m];
        specs.push_back({k, s, t[m], h});
    }
    return specs;
}

}  // namespace

AdmissiblePath random_admissible_path(const AdaptedFrame& frame, const Point& start, double length, int max_segments,
                                      std::mt19937_64& rng, double h, const FlowOptions& opt) {
    const int n = frame.n();
    std::uniform_int_distribution<int> count(1, max_segments), dir(0, n - 1), coin(0, 1);
    std::exponential_distribution<double> weight(1.0);
    const int m = count(rng);
    std::vector<int> dirs(m), signs(m);
    std::vector<double> w(m);
    double total = 0;
    for (int s = 0; s < m; ++s) {
        dirs[s] = dir(rng);
        signs[s] = coin(rng) ? 1 : -1;
        w[s] = weight(rng);
        total += w[s];
    }
    for (auto& v : w) v *= length / total;
    AdmissiblePath path;
    for (int it = 0; it < 6; ++it) {
        path = run_path(frame, start, reflected_specs(frame.domain, start, dirs, signs, w, h), opt);
        double L = path.g_length();
        if (L <= length) break;
        for (auto& v : w) v *= length / L * (1 - 1e-12);
    }
    return path;
}

ReachReport verify_inclusions(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                              double epsilon, const ReachOptions& opt, const FixResult* fix) {
    if (k.K1 <= 0 || k.K2 <= 0 || k.witness_i < 0) throw PreconditionError("domain constants are missing");
    const int n = frame.n();
    ReachReport rep;
    rep.epsilon = epsilon;
    rep.slack = opt.slack;
    rep.seed = opt.seed;
    rep.constants = k;
    rep.eps_lower = epsilon / (4.0 * k.d_g);
    rep.eps_upper = 2.0 * n * k.d_g * epsilon;
    const double eps0 = fix ? fix->constants.eps0 : k.eps0;
    rep.hypothesis_bound = eps0 / (2.0 * n * k.d_g);
    rep.hypothesis = std::isfinite(eps0) && epsilon < rep.hypothesis_bound;

    BoxSpec D = BoxSpec::diamond(1.0 / k.K1, rep.eps_lower, frame.Ctilde, frame.omega);
    BoxSpec H = BoxSpec::hourglass(k.K2, rep.eps_upper, frame.Ctilde, frame.omega);
    rep.r_max = diamond_radius(D);

    // Lower inclusion: stratified diamond samples, connected by the proof's construction.
    std::vector<Point> targets;
    {
        auto rng = make_rng(opt.seed, 0);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int a = 0; a < opt.shells; ++a)
            for (int b = 0; b < opt.heights; ++b) {
                double r = rep.r_max * (a + U(rng)) / opt.shells;
                double Y = diamond_height(D, r);
                double y = -Y + 2 * Y * (b + U(rng)) / opt.heights;
                Vec g(n);
                for (int i = 0; i < n; ++i) {
                    g[i] = N(rng);
                    if (frame.domain.natural_lo[i] && frame.domain.lo[i] >= 0) g[i] = std::fabs(g[i]);
                    if (frame.domain.natural_hi[i] && frame.domain.hi[i] <= 0) g[i] = -std::fabs(g[i]);
                }
                g /= g.lpNorm<1>();
                targets.emplace_back(Vec(r * g), y);
            }
        // extreme points: top and bottom of the diamond above 0
        double Y0 = diamond_height(D, 0.0);
        targets.emplace_back(Vec(Vec::Zero(n)), Y0);
        targets.emplace_back(Vec(Vec::Zero(n)), -Y0);
    }
    rep.lower.resize(targets.size());
    parallel_for(static_cast<int>(targets.size()), [&](int m) {
        LowerSample& s = rep.lower[m];
        s.target = targets[m];
        s.diamond_margin = box_membership(D, s.target).margin;
        try {
            ConnectResult c = connect(pair, frame, k, s.target, epsilon, nullptr, opt.connect);
            s.reached = c.path.end();
            s.g_length = c.g_length;
            s.eps_tilde = c.eps_tilde;
            s.tangency = tangency_defect(pair, frame, c.path);
            double miss = distance(s.reached, s.target);
            s.pass = s.g_length <= (1 + opt.slack) * epsilon && miss <= 1e-8;
            if (miss > 1e-8) s.error = "endpoint misses the target by " + std::to_string(miss);
        } catch (const Error& e) {
            s.error = e.what();
        }
    });
    for (const auto& s : rep.lower) {
        rep.lower_failures += !s.pass;
        rep.max_length_ratio = std::max(rep.max_length_ratio, s.g_length / epsilon);
        rep.max_tangency = std::max(rep.max_tangency, s.tangency);
    }

    // Upper inclusion: endpoints of random admissible paths of g-length <= eps.
    rep.upper.resize(opt.upper_paths);
    parallel_for(opt.upper_paths, [&](int m) {
        auto rng = make_rng(opt.seed, 1000 + m);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double u = U(rng);
        double len = epsilon * (1 - 0.5 * u * u);
        UpperSample& s = rep.upper[m];
        try {
            AdmissiblePath p =
                random_admissible_path(frame, Point::origin(n), len, opt.max_segments, rng, opt.h, FlowOptions{});
            s.end = p.end();
            s.g_length = p.g_length();
            s.segments = static_cast<int>(p.segments.size());
            Membership mb = box_membership(H, s.end);
            s.margin = mb.margin;
            s.inside = mb.member && s.g_length <= epsilon;
        } catch (const Error&) {
            s.end = Point::origin(n);
            s.margin = -std::numeric_limits<double>::infinity();
        }
    });
    rep.min_upper_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : rep.upper) {
        rep.upper_failures += !s.inside;
        rep.min_upper_margin = std::min(rep.min_upper_margin, s.margin);
    }

    rep.gaps.resize(opt.gap_paths);
    parallel_for(opt.gap_paths, [&](int m) {
        auto rng = make_rng(opt.seed, 5000000 + m);
        FlowOptions fo;
        fo.keep_samples = true;
        try {
            AdmissiblePath p = random_admissible_path(frame, Point::origin(n), epsilon, opt.max_segments, rng, opt.h, fo);
            rep.gaps[m] = upper_gap_estimate(pair, frame, k, k.domain, p, opt.h);
        } catch (const Error&) {
            rep.gaps[m].ok = false;
        }
    });
    for (const auto& g : rep.gaps) rep.gap_failures += !g.ok;
    return rep;
}

BoxAlgebraReport box_algebra(int n, double K1, double K2, double Ctilde, double eps, int samples, std::uint64_t seed) {
    BoxAlgebraReport r;
    r.K1 = K1;
    r.K2 = K2;
    r.Ctilde = Ctilde;
    r.epsilon = eps;
    r.samples = samples;
    Modulus lin = Modulus::linear();
    BoxSpec D = BoxSpec::diamond(1.0 / K1, (1 + std::sqrt(2 * Ctilde / K1 + 1)) * eps, Ctilde, lin);
    BoxSpec B = BoxSpec::box(K2 + 2 * Ctilde, eps);
    // the margin mixes |x| and |y| slack, so rounding scales with the larger extent
    const double box_tol = 1e-14 * std::max(eps, B.K * eps * eps);
    auto rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    r.min_diamond_margin = r.min_box_margin = std::numeric_limits<double>::infinity();
    for (int m = 0; m < samples; ++m) {
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = U(rng);
        g /= std::max(g.lpNorm<1>(), 1e-300);
        // the first samples sit on the outer corners of the source box
        double r_frac = m < 4 ? 1.0 : std::pow(std::fabs(U(rng)), 1.0 / n);
        double y_frac = m < 4 ? (m % 2 ? 1.0 : -1.0) : U(rng);
        double x = r_frac * eps;
        Point pb(Vec(x * g), y_frac * K1 * eps * eps);
        Point ph(Vec(x * g), y_frac * (K2 * eps * eps + x * Ctilde * lin(2 * x)));
        Membership md = box_membership(D, pb, 1e-12 * eps);
        Membership mb = box_membership(B, ph, box_tol);
        r.box_in_diamond += md.member;
        r.hourglass_in_box += mb.member;
        r.min_diamond_margin = std::min(r.min_diamond_margin, md.margin);
        r.min_box_margin = std::min(r.min_box_margin, mb.margin);
    }
    return r;
}

}  // namespace subriemann

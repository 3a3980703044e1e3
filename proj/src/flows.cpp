#include "subriemann/flows.hpp"

#include "subriemann/errors.hpp"
#include "subriemann/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace subriemann {

namespace {

struct Escaped {
    double s;
};

struct YRun {
    double y = 0.0;
    std::vector<double> ys;      // node values
    std::vector<double> slopes;  // sign * a_k at nodes
};

// y' = sign * a_k(base + sign * s * e_k, y), s in [0, t]
YRun integrate_y(const Evaluator& a, const Vec& base, int k, int sign, double t, int N, Stepper stepper,
                 const DomainBox& U, double tol, bool record) {
    const int n = static_cast<int>(base.size()) - 1;
    Point P(base);
    auto f = [&](double s, double y) {
        P.z[k] = base[k] + sign * s;
        P.z[n] = y;
        if (!U.contains(P, tol)) throw Escaped{s};
        try {
            return sign * a(U.clamp(P, tol));
        } catch (const DomainError&) {
            throw Escaped{s};
        }
    };
    const double h = t / N;
    YRun r;
    double y = base[n];
    if (record) {
        r.ys.reserve(N + 1);
        r.slopes.reserve(N + 1);
    }
    for (int j = 0; j < N; ++j) {
        double s = j * h;
        double k1 = f(s, y);
        if (record) {
            r.ys.push_back(y);
            r.slopes.push_back(k1);
        }
        if (stepper == Stepper::RK4) {
            double k2 = f(s + h / 2, y + h / 2 * k1);
            double k3 = f(s + h / 2, y + h / 2 * k2);
            double k4 = f(s + h, y + h * k3);
            y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        } else {
            double k2 = f(s + h / 2, y + h / 2 * k1);
            y += h * k2;
        }
    }
    if (record) {
        r.ys.push_back(y);
        r.slopes.push_back(f(t, y));
    }
    r.y = y;
    return r;
}

}  // namespace

Segment flow_segment(const AdaptedFrame& frame, const FlowSpec& spec_in, const Point& q, const FlowOptions& opt) {
    FlowSpec spec = spec_in;
    if (spec.t < 0) {
        spec.t = -spec.t;
        spec.sign = -spec.sign;
    }
    const int n = frame.n();
    const DomainBox& U = opt.domain ? *opt.domain : frame.domain;
    Segment seg;
    seg.spec = spec;
    seg.start = q;
    if (!U.contains(q, opt.escape_tol)) throw EscapeError("flow starts outside " + U.str(), q.to_vector());
    if (spec.t == 0.0) {
        seg.end = q;
        seg.samples = {q};
        return seg;
    }
    const int N = std::max(opt.min_steps, static_cast<int>(std::ceil(spec.t / spec.h - 1e-9)));
    const Evaluator& a = frame.a[spec.i].f;
    YRun coarse, fine;
    try {
        coarse = integrate_y(a, q.z, spec.i, spec.sign, spec.t, N, opt.stepper, U, opt.escape_tol, false);
        fine = integrate_y(a, q.z, spec.i, spec.sign, spec.t, 2 * N, opt.stepper, U, opt.escape_tol, true);
    } catch (const Escaped& e) {
        Point exit = q;
        exit.z[spec.i] += spec.sign * e.s;
        throw EscapeError("flow of X_" + std::to_string(spec.i + 1) + " leaves " + U.str() + " near " + exit.str(),
                          exit.to_vector());
    }
    seg.steps = 2 * N;
    seg.end = q;
    seg.end.z[spec.i] += spec.sign * spec.t;
    seg.end.z[n] = fine.y;
    seg.end = U.clamp(seg.end, opt.escape_tol);
    seg.error = std::fabs(fine.y - coarse.y);

    // Simpson on |X_k| = sqrt(1 + a_k^2) over the 2N fine intervals
    const double h = spec.t / (2 * N);
    double sum = 0.0;
    for (int j = 0; j <= 2 * N; ++j) {
        double w = (j == 0 || j == 2 * N) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        sum += w * std::sqrt(1.0 + fine.slopes[j] * fine.slopes[j]);
    }
    seg.length = sum * h / 3.0;

    if (opt.keep_samples) {
        seg.samples.reserve(2 * N + 1);
        for (int j = 0; j <= 2 * N; ++j) {
            Point p = q;
            p.z[spec.i] += spec.sign * j * h;
            p.z[n] = fine.ys[j];
            seg.samples.push_back(p);
        }
    }
    return seg;
}

Point flow(const AdaptedFrame& frame, const FlowSpec& spec, const Point& q, const FlowOptions& opt) {
    return flow_segment(frame, spec, q, opt).end;
}

double AdmissiblePath::euclidean_length() const {
    double s = 0.0;
    for (const auto& g : segments) s += g.length;
    return s;
}

double AdmissiblePath::g_length() const {
    if (metric == MetricKind::FrameOrthonormal) return duration();
    return euclidean_length();
}

double AdmissiblePath::duration() const {
    double s = 0.0;
    for (const auto& g : segments) s += g.spec.t;
    return s;
}

double AdmissiblePath::error() const {
    double s = 0.0;
    for (const auto& g : segments) s += g.error;
    return s;
}

std::vector<FlowSpec> AdmissiblePath::specs() const {
    std::vector<FlowSpec> out;
    for (const auto& g : segments) out.push_back(g.spec);
    return out;
}

std::vector<Point> AdmissiblePath::polyline() const {
    std::vector<Point> out{start};
    for (const auto& g : segments) {
        if (g.samples.size() > 1)
            out.insert(out.end(), g.samples.begin() + 1, g.samples.end());
        else
            out.push_back(g.end);
    }
    return out;
}

AdmissiblePath run_path(const AdaptedFrame& frame, const Point& start, const std::vector<FlowSpec>& specs,
                        const FlowOptions& opt) {
    AdmissiblePath path;
    path.start = start;
    path.metric = frame.metric;
    Point q = start;
    for (const auto& s : specs) {
        if (s.t == 0.0) continue;
        path.segments.push_back(flow_segment(frame, s, q, opt));
        q = path.segments.back().end;
    }
    return path;
}

AdmissiblePath concat(const AdmissiblePath& first, const AdmissiblePath& second) {
    if (distance(first.end(), second.start) > 1e-9)
        throw PreconditionError("concat: second path starts at " + second.start.str() + ", not at " + first.end().str());
    AdmissiblePath p = first;
    p.segments.insert(p.segments.end(), second.segments.begin(), second.segments.end());
    return p;
}

double tangency_defect(const CEDPair& pair, const AdaptedFrame& frame, const AdmissiblePath& path) {
    double worst = 0.0;
    for (const auto& g : path.segments) {
        std::vector<Point> pts = g.samples.empty() ? std::vector<Point>{g.start, g.end} : g.samples;
        for (const auto& p : pts) {
            Vec c = pair.eta.coefficients(p);
            worst = std::max(worst, std::fabs(c.dot(frame.X(g.spec.i, p))) / std::max(1.0, c.norm()));
        }
    }
    return worst;
}

AdmissiblePath compose_T_path(const AdaptedFrame& frame, const Vec& times, double h, const FlowOptions& opt) {
    std::vector<FlowSpec> specs;
    for (int i = 0; i < times.size(); ++i)
        if (times[i] != 0.0) specs.push_back({i, times[i] > 0 ? 1 : -1, std::fabs(times[i]), h});
    return run_path(frame, Point::origin(frame.n()), specs, opt);
}

Point compose_T(const AdaptedFrame& frame, const Vec& times, double h, const FlowOptions& opt) {
    return compose_T_path(frame, times, h, opt).end();
}

// --- W surface ------------------------------------------------------------------------

bool SurfaceW::covers(const Vec& x) const {
    for (int i = 0; i < n; ++i) {
        double tol = 1e-12 * std::max(1.0, std::fabs(axes[i].back() - axes[i].front()));
        if (x[i] < axes[i].front() - tol || x[i] > axes[i].back() + tol) return false;
    }
    return true;
}

double SurfaceW::height(const Vec& x) const {
    if (!covers(x)) throw ExtrapolationError("query outside the sampled W grid");
    std::vector<int> lo(n);
    std::vector<double> frac(n);
    std::vector<int> stride(n, 1);
    for (int i = 1; i < n; ++i) stride[i] = stride[i - 1] * static_cast<int>(axes[i - 1].size());
    for (int i = 0; i < n; ++i) {
        const auto& ax = axes[i];
        if (ax.size() == 1) {
            lo[i] = 0;
            frac[i] = 0.0;
            continue;
        }
        double xi = std::clamp(x[i], ax.front(), ax.back());
        int j = static_cast<int>(std::upper_bound(ax.begin(), ax.end(), xi) - ax.begin()) - 1;
        j = std::clamp(j, 0, static_cast<int>(ax.size()) - 2);
        lo[i] = j;
        frac[i] = (xi - ax[j]) / (ax[j + 1] - ax[j]);
    }
    double v = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        int idx = 0;
        for (int i = 0; i < n; ++i) {
            int bit = (corner >> i) & 1;
            if (axes[i].size() == 1 && bit) {
                w = 0.0;
                break;
            }
            w *= bit ? frac[i] : 1.0 - frac[i];
            idx += (lo[i] + bit) * stride[i];
        }
        if (w != 0.0) v += w * points[idx].y();
    }
    return v;
}

double SurfaceW::band(const Vec& x) const {
    double cell = 0.0;
    for (int i = 0; i < n; ++i)
        if (axes[i].size() > 1) cell += std::pow((axes[i].back() - axes[i].front()) / (axes[i].size() - 1), 2);
    cell = std::sqrt(cell);
    double xl1 = x.cwiseAbs().sum();
    return cell * Ctilde * omega(cell + 2.0 * xl1);
}

SurfaceW build_W(const AdaptedFrame& frame, double epsilon, const SurfaceOptions& opt) {
    const int n = frame.n();
    const DomainBox& D = opt.flow.domain ? *opt.flow.domain : frame.domain;
    SurfaceW W;
    W.epsilon = epsilon;
    W.n = n;
    W.Ctilde = frame.Ctilde;
    W.omega = frame.omega;
    int total = 1;
    for (int i = 0; i < n; ++i) {
        double lo = std::max(-epsilon, D.lo[i]), hi = std::min(epsilon, D.hi[i]);
        if (lo > hi) throw PreconditionError("W grid is empty on axis " + std::to_string(i + 1));
        std::vector<double> ax;
        int G = (hi > lo) ? opt.grid : 1;
        for (int g = 0; g < G; ++g) ax.push_back(G == 1 ? lo : lo + (hi - lo) * g / (G - 1));
        W.axes.push_back(ax);
        total *= G;
    }
    W.t.resize(total);
    for (int idx = 0; idx < total; ++idx) {
        Vec t(n);
        int r = idx;
        for (int i = 0; i < n; ++i) {
            int G = static_cast<int>(W.axes[i].size());
            t[i] = W.axes[i][r % G];
            r /= G;
        }
        W.t[idx] = t;
    }
    W.points.resize(total);
    W.error.resize(total);
    std::vector<double> graph_defect(total);
    parallel_for(total, [&](int idx) {
        AdmissiblePath path = compose_T_path(frame, W.t[idx], opt.h, opt.flow);
        W.points[idx] = path.end();
        W.error[idx] = path.error();
        Point alt = compose_T(frame, W.t[idx], opt.h / 2, opt.flow);
        graph_defect[idx] = std::fabs(alt.y() - W.points[idx].y());
    });

    for (int idx = 0; idx < total; ++idx) {
        const Point& p = W.points[idx];
        W.max_x_defect = std::max(W.max_x_defect, (p.xs() - W.t[idx]).cwiseAbs().maxCoeff());
        W.max_graph_defect = std::max(W.max_graph_defect, graph_defect[idx]);
        double xl1 = p.x_l1();
        double bound = xl1 * W.Ctilde * W.omega(2.0 * xl1);
        double ay = std::fabs(p.y());
        if (bound > 0) W.max_bound_ratio = std::max(W.max_bound_ratio, ay / bound);
        if (ay > bound + 1e-14) ++W.bound_violations;
    }
    W.graph_ok = W.max_x_defect <= opt.graph_tol && W.max_graph_defect <= opt.graph_tol;
    W.bound_ok = W.bound_violations == 0;
    if (W.max_x_defect > opt.graph_tol)
        throw IntegrabilityError("T_eps is not a graph over x: max |x - t| = " + std::to_string(W.max_x_defect));
    if (W.max_graph_defect > opt.graph_tol)
        throw IntegrabilityError("two heights for the same x: max discrepancy " + std::to_string(W.max_graph_defect));
    return W;
}

// --- funnel probe ------------------------------------------------------------------------

FunnelReport funnel_probe(const AdaptedFrame& frame, int k, const Point& q, double T, const FunnelOptions& opt) {
    FunnelReport rep;
    const int base = std::max(50, static_cast<int>(std::ceil(T / opt.h - 1e-9)));
    const double offsets[3] = {0.0, opt.tol / 2, -opt.tol / 2};
    for (int m = 0; m < opt.trials; ++m) {
        auto rng = make_rng(opt.seed, static_cast<std::uint64_t>(m));
        std::uniform_real_distribution<double> U(0.0, 0.5);
        FunnelTrial tr;
        tr.stepper = (m % 2 == 0) ? Stepper::RK4 : Stepper::RK2;
        tr.steps = m < 2 ? base : static_cast<int>(std::lround(base * (1.0 + U(rng))));
        tr.offset = offsets[m % 3];
        Point start = q;
        start.y() += tr.offset;
        FlowOptions fo;
        fo.stepper = tr.stepper;
        fo.min_steps = tr.steps;
        FlowSpec spec{k, 1, T, T / tr.steps};
        Segment s = flow_segment(frame, spec, start, fo);
        tr.endpoint_y = s.end.y();
        tr.estimate = s.error;
        rep.trials.push_back(tr);
    }
    double lo = rep.trials.front().endpoint_y, hi = lo, est = 0.0;
    for (const auto& t : rep.trials) {
        lo = std::min(lo, t.endpoint_y);
        hi = std::max(hi, t.endpoint_y);
        est = std::max(est, t.estimate);
    }
    rep.spread = hi - lo;
    rep.reference = std::max(est, opt.tol);
    rep.ratio = rep.spread / rep.reference;
    rep.pass = rep.spread <= 10.0 * rep.reference;
    return rep;
}

AdaptedFrame sqrt_control_frame(int n, const DomainBox& domain) {
    AdaptedFrame fr;
    fr.domain = domain;
    fr.Ctilde = 1.0;
    fr.omega = Modulus::hoelder(0.5);
    fr.a.emplace_back([](const Point& p) { return std::sqrt(std::fabs(p.y())); });
    for (int i = 1; i < n; ++i) fr.a.emplace_back([](const Point&) { return 0.0; });
    return fr;
}

}  // namespace subriemann

#include "subriemann/gallery.hpp"

#include "subriemann/errors.hpp"

#include <cmath>

namespace subriemann {

namespace {

constexpr int kDim = 3;

ScalarField negated(const ScalarField& a) {
    ScalarField out;
    Evaluator f = a.f;
    out.f = [f](const Point& p) { return -f(p); };
    for (const auto& d : a.partials)
        out.partials.push_back(d ? Evaluator([d](const Point& p) { return -d(p); }) : Evaluator());
    out.modulus_tag = a.modulus_tag;
    return out;
}

// Zero outside `support`; used where a partition bump vanishes.
ScalarField restricted(const ScalarField& a, const DomainBox& support) {
    auto wrap = [support](Evaluator e) -> Evaluator {
        if (!e) return {};
        return [e, support](const Point& p) { return support.contains(p) ? e(p) : 0.0; };
    };
    ScalarField out;
    out.f = wrap(a.f);
    for (const auto& d : a.partials) out.partials.push_back(wrap(d));
    out.modulus_tag = a.modulus_tag;
    return out;
}

ScalarField translated(const ScalarField& a, const Vec& offset) {
    auto wrap = [offset](Evaluator e) -> Evaluator {
        if (!e) return {};
        return [e, offset](const Point& p) { return e(Point(Vec(p.z - offset))); };
    };
    ScalarField out;
    out.f = wrap(a.f);
    for (const auto& d : a.partials) out.partials.push_back(wrap(d));
    out.modulus_tag = a.modulus_tag;
    return out;
}

CEDPair map_pair(const CEDPair& pair, const std::function<ScalarField(const ScalarField&)>& g) {
    CEDPair out;
    out.domain = pair.domain;
    out.eta.a0 = g(pair.eta.a0);
    for (const auto& a : pair.eta.a) out.eta.a.push_back(g(a));
    out.deta.dim = pair.deta.dim;
    for (const auto& c : pair.deta.c) out.deta.c.push_back(g(c));
    return out;
}

double paper_x(const Point& p) {
    double x = p.z[0];
    if (x < -1e-12) throw DomainError("coefficients evaluated at x = " + std::to_string(x) + " < 0");
    return std::max(x, 0.0);
}

DomainBox paper_domain() {
    Vec lo(3), hi(3);
    lo << 0.0, -0.6, -0.6;
    hi << 0.6, 0.6, 0.6;
    DomainBox d(lo, hi);
    d.natural_lo[0] = true;
    return d;
}

void finish_frame(GalleryEntry& e, std::optional<double> Ctilde) {
    e.frame = adapted_frame(e.pair, e.omega, Ctilde.value_or(1.0));
    if (!Ctilde) {
        e.frame.Ctilde = estimate_ctilde(e.frame, e.pair.domain);
        e.ctilde_estimated = true;
    }
    if (e.pair.domain.contains(e.witness)) {
        double d = nonintegrability(e.pair, e.witness);
        e.witness_sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
        e.noninvolutive = e.witness_sign != 0;
    }
}

}  // namespace

std::vector<std::string> GalleryEntry::oracles() const {
    std::vector<std::string> out;
    if (W_height) out.push_back("W graph");
    if (loop_coefficient) out.push_back("loop displacement");
    if (density_at_witness) out.push_back("density at witness");
    return out;
}

GalleryEntry heisenberg() {
    GalleryEntry e;
    e.name = "heisenberg";
    e.description = "eta = dy - x1 dx2, d eta = -dx1^dx2";
    e.pair.domain = DomainBox::cube(kDim, 0.5);
    e.pair.eta.a0 = ScalarField::constant(1.0, kDim);
    e.pair.eta.a = {ScalarField::constant(0.0, kDim), negated(ScalarField::coordinate(0, kDim))};
    e.pair.deta = exterior_derivative(e.pair.eta);
    e.omega = Modulus::linear();
    e.witness = Point::origin(2);
    e.W_height = [](const Vec& x) { return x[0] * x[1]; };
    e.loop_coefficient = 1.0;
    e.density_at_witness = -1.0;
    finish_frame(e, 1.0);
    return e;
}

GalleryEntry general_abc(const std::string& name, const ScalarField& a, const ScalarField& b, const ScalarField& c,
                         const DomainBox& domain, const Modulus& omega, std::optional<double> Ctilde) {
    GalleryEntry e;
    e.name = name;
    e.description = "eta = a dy - b dx - c dz";
    e.pair.domain = domain;
    e.pair.eta.a0 = a;
    e.pair.eta.a = {negated(b), negated(c)};
    e.pair.deta = exterior_derivative(e.pair.eta);
    e.omega = omega;
    e.smooth = false;
    e.witness = Point::origin(2);
    finish_frame(e, Ctilde);
    return e;
}

GalleryEntry paper_example(PaperVariant v) {
    const bool sq = v == PaperVariant::Sqrt;
    // g(x) = e^{sqrt x} or 1/log x, continuous at 0 but without a derivative there
    auto g = [sq](const Point& p) {
        double x = paper_x(p);
        if (sq) return std::exp(std::sqrt(x));
        return x == 0.0 ? 0.0 : 1.0 / std::log(x);
    };
    auto E = [](const Point& p) { return std::exp(std::pow(p.z[1] + 2.0, 2.0 / 3.0)); };

    ScalarField b([g](const Point& p) { return std::sin(p.z[2]) * g(p) * p.z[1]; },
                  {Evaluator(), [g](const Point& p) { return std::sin(p.z[2]) * g(p); },
                   [g](const Point& p) { return std::cos(p.z[2]) * g(p) * p.z[1]; }},
                  sq ? "hoelder(0.5)" : "log");
    ScalarField c([E](const Point& p) { return std::cos(p.z[2]) * E(p) * paper_x(p); },
                  {[E](const Point& p) { return std::cos(p.z[2]) * E(p); }, Evaluator(),
                   [E](const Point& p) { return -std::sin(p.z[2]) * E(p) * paper_x(p); }});

    // eta = dy + b dx + c dz, i.e. the (a, b, c) constructor with (1, -b, -c)
    GalleryEntry e = general_abc(sq ? "paper:sqrt" : "paper:log", ScalarField::constant(1.0, kDim), negated(b),
                                 negated(c), paper_domain(), sq ? Modulus::hoelder(0.5) : Modulus::log());
    e.description = sq ? "eta = dy + b dx + c dz, b = sin(y) e^{sqrt x} z, c = cos(y) e^{(z+2)^{2/3}} x"
                       : "eta = dy + b dx + c dz, b = sin(y) z / log x, c = cos(y) e^{(z+2)^{2/3}} x";
    e.density_at_witness = std::exp(std::pow(2.0, 2.0 / 3.0));
    if (!sq) e.modulus_note = "omega(s) = 1/|log(min(s, 1/2))| is a modeling choice";
    return e;
}

GalleryEntry exact_form(const std::string& name, const ScalarField& f, const DomainBox& domain) {
    for (int k = 0; k < domain.dim(); ++k)
        if (!f.has_partial(k)) throw PreconditionError("exact form needs every partial of f");
    GalleryEntry e;
    e.name = name;
    e.description = "eta = df, d eta = 0";
    e.pair.domain = domain;
    const int n = domain.dim() - 1;
    e.pair.eta.a0 = ScalarField(f.partials[n]);
    for (int i = 0; i < n; ++i) e.pair.eta.a.emplace_back(f.partials[i]);
    e.pair.deta = TwoForm::zero(domain.dim());
    e.omega = Modulus::linear();
    e.noninvolutive = false;
    e.witness = Point::origin(n);
    e.loop_coefficient = 0.0;
    e.density_at_witness = 0.0;
    finish_frame(e, std::nullopt);
    return e;
}

GalleryEntry exact_flat() {
    GalleryEntry e = exact_form("exact:flat", ScalarField::coordinate(2, kDim), DomainBox::cube(kDim, 0.5));
    e.W_height = [](const Vec&) { return 0.0; };
    return e;
}

GalleryEntry exact_quadratic() {
    ScalarField f([](const Point& p) { return p.z[2] + p.z[0] * p.z[0]; },
                  {[](const Point& p) { return 2 * p.z[0]; }, [](const Point&) { return 0.0; },
                   [](const Point&) { return 1.0; }});
    GalleryEntry e = exact_form("exact:quadratic", f, DomainBox::cube(kDim, 0.5));
    e.W_height = [](const Vec& x) { return -x[0] * x[0]; };
    return e;
}

GalleryEntry pasted_example() {
    const double shift = 0.4, z0 = 0.1, z1 = 0.3;
    CEDPair base = paper_example(PaperVariant::Sqrt).pair;
    Vec off = Vec::Zero(kDim);
    off[1] = shift;
    DomainBox support2(Vec(base.domain.lo + off), Vec(base.domain.hi + off));
    CEDPair p1 = map_pair(base, [&](const ScalarField& a) { return restricted(a, base.domain); });
    CEDPair p2 = map_pair(base, [&](const ScalarField& a) { return restricted(translated(a, off), support2); });

    auto step = [=](double z) {
        double u = std::clamp((z - z0) / (z1 - z0), 0.0, 1.0);
        return u * u * (3 - 2 * u);
    };
    auto dstep = [=](double z) {
        double u = (z - z0) / (z1 - z0);
        if (u <= 0 || u >= 1) return 0.0;
        return 6 * u * (1 - u) / (z1 - z0);
    };
    auto zero = [](const Point&) { return 0.0; };
    ScalarField psi1([step](const Point& p) { return 1.0 - step(p.z[1]); },
                     {zero, [dstep](const Point& p) { return -dstep(p.z[1]); }, zero});
    ScalarField psi2([step](const Point& p) { return step(p.z[1]); },
                     {zero, [dstep](const Point& p) { return dstep(p.z[1]); }, zero});

    DomainBox domain = base.domain.hull(support2);
    GalleryEntry e;
    e.name = "pasted";
    e.description = "paper:sqrt pasted with its translate by +0.4 in x2, smoothstep blend over x2 in [0.1, 0.3]";
    e.pair = paste({{p1, psi1}, {p2, psi2}}, domain, 9, std::nullopt);
    e.omega = Modulus::hoelder(0.5);
    e.smooth = false;
    e.witness = Point::origin(2);
    e.density_at_witness = std::exp(std::pow(2.0, 2.0 / 3.0));
    finish_frame(e, std::nullopt);
    return e;
}

std::vector<std::string> gallery_names() {
    return {"heisenberg", "paper:sqrt", "paper:log", "exact:flat", "exact:quadratic", "pasted"};
}

GalleryEntry gallery_entry(const std::string& name) {
    if (name == "heisenberg") return heisenberg();
    if (name == "paper:sqrt") return paper_example(PaperVariant::Sqrt);
    if (name == "paper:log") return paper_example(PaperVariant::Log);
    if (name == "exact:flat") return exact_flat();
    if (name == "exact:quadratic") return exact_quadratic();
    if (name == "pasted") return pasted_example();
    throw PreconditionError("unknown gallery entry '" + name + "'");
}

DensityScan density_scan(const GalleryEntry& e, int g) {
    DensityScan s;
    const DomainBox& D = e.pair.domain;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -s.min;
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b)
            for (int c = 0; c < g; ++c) {
                Vec z(3);
                int idx[3] = {a, b, c};
                for (int k = 0; k < 3; ++k) z[k] = D.lo[k] + (D.hi[k] - D.lo[k]) * idx[k] / (g - 1);
                double d = nonintegrability(e.pair, Point(z));
                ++s.points;
                s.positive += d > 0;
                s.negative += d < 0;
                s.zero += d == 0;
                s.min = std::min(s.min, d);
                s.max = std::max(s.max, d);
            }
    return s;
}

}  // namespace subriemann

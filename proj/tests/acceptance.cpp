// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
#include "subriemann/ballbox.hpp"
#include "subriemann/errors.hpp"
#include "subriemann/gallery.hpp"
#include "subriemann/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace subriemann;

namespace {

// e^{2^{2/3}} from a 30-digit arbitrary-precision evaluation
constexpr double kPaperDensity = 4.89102088662469714634333694125;
constexpr std::uint64_t kSeed = 3;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome c1_loop() {
    GalleryEntry h = heisenberg();
    Point q = loop_endpoint(h.frame, Point::origin(2), 0.1, 0, 1);
    double rel = std::fabs(q.y() - 0.01) / 0.01;
    ShootResult s = shoot_loop(h.pair, h.frame, Point::origin(2), Point{0.0, 0.0, 0.01}, 0.25, 0, 1);
    double err = std::fabs(s.eps_tilde - 0.1);
    return {rel <= 1e-8 && err <= 1e-8, "displacement rel err " + fmt("%.2e", rel) + ", shoot |eps - 0.1| " +
                                             fmt("%.2e", err)};
}

Outcome c2_ballbox() {
    bool ok = true;
    std::ostringstream os;
    for (const char* name : {"heisenberg", "paper:sqrt"}) {
        GalleryEntry e = gallery_entry(name);
        FixResult fix = fix_domain(e.pair, e.frame, e.witness);
        for (double eps : {0.02, 0.05}) {
            DomainConstants k = reach_constants(e.pair, e.frame, fix, eps);
            ReachOptions o;
            o.seed = kSeed;
            ReachReport r = verify_inclusions(e.pair, e.frame, k, eps, o, &fix);
            bool pass = r.pass() && r.lower.size() >= 400 && r.upper.size() >= 10000 && r.max_length_ratio <= 1.05;
            ok = ok && pass;
            os << name << " eps=" << eps << ": " << r.lower.size() << " lower (" << r.lower_failures
               << " fail, max L/eps " << fmt("%.3f", r.max_length_ratio) << "), " << r.upper.size() << " upper ("
               << r.upper_failures << " fail); ";
        }
    }
    return {ok, os.str()};
}

Outcome c3_density() {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    double d = nonintegrability(e.pair, Point::origin(2));
    double rel = std::fabs(d - kPaperDensity) / kPaperDensity;
    return {rel <= 1e-6, "eta^deta(0) = " + fmt("%.12g", d) + ", rel err " + fmt("%.2e", rel)};
}

struct CertRow {
    std::string name;
    Certification c;
    bool smooth;
};

std::vector<CertRow> certifications() {
    std::vector<CertRow> rows;
    for (const auto& name : gallery_names()) {
        GalleryEntry e = gallery_entry(name);
        rows.push_back({name, certify(e.pair), e.smooth});
    }
    return rows;
}

Outcome c4_stokes(const std::vector<CertRow>& rows) {
    bool ok = true;
    std::ostringstream os;
    for (const auto& r : rows) {
        bool pass = r.c.exact || r.c.order >= 1.9;
        if (r.smooth) pass = pass && r.c.residual <= 1e-6;
        ok = ok && pass && r.c.residuals.size() >= 4;
        os << r.name << " " << (r.c.exact ? "exact" : "order " + fmt("%.3f", r.c.order)) << " finest "
           << fmt("%.1e", r.c.residual) << "; ";
    }
    return {ok, os.str()};
}

Outcome c5_dd(const std::vector<CertRow>& rows) {
    const int mesh = 128;
    bool ok = true;
    std::ostringstream os;
    for (const auto& r : rows) {
        GalleryEntry e = gallery_entry(r.name);
        DdReport dd = check_dd_zero(e.pair, random_closed_chains(e.pair.domain, 20, mesh, kSeed));
        double ref = 0;
        for (std::size_t m = 0; m < r.c.h.size(); ++m)
            if (std::fabs(r.c.h[m] - 1.0 / mesh) < 1e-12) ref = r.c.residuals[m];
        // exact entries have residual and d^2 both at roundoff
        const double floor = 1e-13;
        bool pass = dd.max_abs <= 10 * std::max(ref, floor);
        ok = ok && pass;
        os << r.name << " " << fmt("%.1e", dd.max_abs) << " vs " << fmt("%.1e", ref) << "; ";
    }
    return {ok, os.str()};
}

Outcome c6_surface() {
    bool ok = true;
    std::ostringstream os;
    for (const char* name : {"heisenberg", "paper:sqrt", "paper:log"}) {
        GalleryEntry e = gallery_entry(name);
        SurfaceOptions so;
        so.grid = 41;
        SurfaceW W = build_W(e.frame, 0.2, so);
        bool pass = W.graph_ok && W.bound_ok && W.bound_violations == 0 && W.points.size() == 41 * 41 &&
                    W.max_graph_defect <= 1e-8;
        ok = ok && pass;
        os << name << " max |y|/bound " << fmt("%.3f", W.max_bound_ratio) << " graph defect "
           << fmt("%.1e", W.max_graph_defect) << "; ";
    }
    return {ok, os.str()};
}

Outcome c7_prop22() {
    bool ok = true;
    std::ostringstream os;
    for (const auto& name : gallery_names()) {
        GalleryEntry e = gallery_entry(name);
        DomainConstants k = estimate_constants(e.pair, e.frame, e.pair.domain, 11, false);
        int good = 0;
        double worst_c = 0;
        for (int m = 0; m < 100; ++m) {
            auto rng = make_rng(kSeed, m);
            PathPair pp = random_path_pair(e.frame, e.pair.domain, 0.1, rng, m % 3 == 0);
            Prop22Report r = verify_prop22(e.pair, e.frame, k, e.pair.domain, pp.gamma1, pp.gamma2);
            good += r.pass();
            if (r.c_bound > 0) worst_c = std::max(worst_c, std::fabs(r.c) / r.c_bound);
        }
        ok = ok && good == 100;
        os << name << " " << good << "/100 (max |c|/bound " << fmt("%.1e", worst_c) << "); ";
    }
    return {ok, os.str()};
}

Outcome c8_funnel() {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    FunnelReport u = funnel_probe(e.frame, 0, Point{0.0, 0.3, 0.1}, 0.3);
    const double T = 1.0;
    FunnelReport c = funnel_probe(sqrt_control_frame(2, DomainBox::cube(3, 2.0)), 0, Point::origin(2), T);
    bool unique_ok = u.spread <= 10 * u.reference;
    bool control_ok = c.spread >= 0.2 * T * T / 4;
    return {unique_ok && control_ok, "paper:sqrt spread " + fmt("%.2e", u.spread) + " (<= 10 x " +
                                         fmt("%.2e", u.reference) + "), control spread " + fmt("%.4f", c.spread) +
                                         " (>= " + fmt("%.3f", 0.2 * T * T / 4) + ")"};
}

Outcome c9_box_algebra() {
    bool ok = true;
    std::ostringstream os;
    for (const char* name : {"heisenberg", "paper:sqrt"}) {
        GalleryEntry e = gallery_entry(name);
        FixResult fix = fix_domain(e.pair, e.frame, e.witness);
        const DomainConstants& k = fix.constants;
        for (double eps : {0.02, 0.05}) {
            BoxAlgebraReport r = box_algebra(2, k.K1, k.K2, e.frame.Ctilde, eps, 1000, kSeed);
            ok = ok && r.pass();
            os << name << " eps=" << eps << ": " << r.box_in_diamond << "/" << r.samples << " in D, "
               << r.hourglass_in_box << "/" << r.samples << " in B; ";
        }
    }
    return {ok, os.str()};
}

}  // namespace

int main() {
    std::vector<CertRow> rows;
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Heisenberg loop oracle", c1_loop},
        {"ball-box inclusion chain", c2_ballbox},
        {"paper example density", c3_density},
        {"Stokes certification",
         [&] {
             rows = certifications();
             return c4_stokes(rows);
         }},
        {"d^2 = 0 on closed chains", [&] { return c5_dd(rows); }},
        {"W_eps bound and graph", c6_surface},
        {"endpoint bracket", c7_prop22},
        {"uniqueness funnel", c8_funnel},
        {"box algebra", c9_box_algebra},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o = {false, std::string("error: ") + ex.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        std::printf("%s criterion %zu (%s) [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}

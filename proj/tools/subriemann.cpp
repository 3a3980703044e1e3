// Command-line front end: constants, ballbox, shoot, prop22, surface, stokes, gallery.
#include "subriemann/errors.hpp"
#include "subriemann/io.hpp"
#include "subriemann/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace subriemann;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kFail = 1, kPrecondition = 2, kIo = 3 };

struct RunConfig {
    std::string subcommand;
    std::string bundle = "heisenberg";
    double epsilon = 0.05;
    int grid = 0;
    int samples = 10000;
    int pairs = 100;
    int refine = 3;
    int chains = 50;
    int mesh = 32;
    std::uint64_t seed = 7;
    double tol = 0.0;  // 0 keeps each command's default
    std::string out;
    int threads = 0;
    double dy = 0.01;
    double eps_max = 0.25;
    double max_length = 0.1;
    std::vector<double> q1;
    std::string action;

    json to_json() const {
        json j{{"subcommand", subcommand}, {"bundle", bundle}, {"seed", seed}, {"tol", num(tol)}, {"threads", threads}};
        if (subcommand == "ballbox") j.update({{"epsilon", num(epsilon)}, {"samples", samples}});
        if (subcommand == "constants") j.update({{"grid", grid}});
        if (subcommand == "shoot") j.update({{"dy", num(dy)}, {"eps_max", num(eps_max)}});
        if (subcommand == "prop22") j.update({{"pairs", pairs}, {"max_length", num(max_length)}});
        if (subcommand == "surface") j.update({{"epsilon", num(epsilon)}, {"grid", grid}});
        if (subcommand == "stokes") j.update({{"refine", refine}, {"chains", chains}, {"mesh", mesh}});
        return j;
    }
};

void emit(const RunConfig& cfg, json report, const std::string& stem) {
    report["config"] = cfg.to_json();
    std::cout << report.dump(2) << "\n";
    if (!cfg.out.empty()) write_json(fs::path(cfg.out) / (stem + ".json"), report);
}

int cmd_constants(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    json rep{{"bundle", to_json(e)}};
    const int grid = cfg.grid > 0 ? cfg.grid : 11;
    rep["constants"] = to_json(estimate_constants(e.pair, e.frame, e.pair.domain, grid, false));
    int code = kPass;
    try {
        FixResult f = fix_domain(e.pair, e.frame, e.witness, FixOptions{grid, 1e-6});
        rep["fix"] = to_json(f);
        auto re = recheck_fix(e.pair, e.frame, f, e.witness);
        json rc = json::object();
        for (const auto& [k, ok] : re) rc[k] = ok;
        rep["fix"]["recheck_2x"] = rc;
    } catch (const DegenerateBundleError& ex) {
        rep["fix"] = {{"error", "degenerate"}, {"message", ex.what()}};
        std::cerr << "fix_domain: " << ex.what() << "\n";
        code = kPrecondition;
    }
    emit(cfg, rep, "constants");
    return code;
}

std::vector<std::pair<double, double>> outline_rows(double rmax, bool half, const std::function<double(double)>& h) {
    std::vector<std::pair<double, double>> rows;
    const int N = 100;
    double lo = half ? 0.0 : -rmax;
    for (int i = 0; i <= N; ++i) {
        double x = lo + (rmax - lo) * i / N;
        rows.emplace_back(x, h(std::fabs(x)));
    }
    return rows;
}

int cmd_ballbox(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    FixResult fix = fix_domain(e.pair, e.frame, e.witness);
    DomainConstants k = reach_constants(e.pair, e.frame, fix, cfg.epsilon);
    ReachOptions opt;
    opt.upper_paths = cfg.samples;
    opt.seed = cfg.seed;
    opt.gap_paths = 100;
    ReachReport r = verify_inclusions(e.pair, e.frame, k, cfg.epsilon, opt, &fix);

    json rep = to_json(r);
    rep["bundle"] = e.name;
    rep["fix_U"] = to_json(fix.U);
    emit(cfg, rep, "ballbox");

    if (!cfg.out.empty()) {
        fs::path dir(cfg.out);
        std::vector<Point> lower, reached, upper;
        std::vector<std::vector<double>> lx, ux;
        for (const auto& s : r.lower) {
            lower.push_back(s.target);
            lx.push_back({s.g_length, s.diamond_margin, double(s.pass)});
        }
        for (const auto& s : r.upper) {
            upper.push_back(s.end);
            ux.push_back({s.g_length, s.margin, double(s.inside)});
        }
        write_points_csv(dir / "lower.csv", lower, {"g_length", "diamond_margin", "pass"}, lx);
        write_points_csv(dir / "upper.csv", upper, {"g_length", "hourglass_margin", "inside"}, ux);

        const bool half = e.frame.domain.natural_lo[0] && e.frame.domain.lo[0] >= 0;
        BoxSpec D = BoxSpec::diamond(1.0 / k.K1, r.eps_lower, e.frame.Ctilde, e.frame.omega);
        BoxSpec H = BoxSpec::hourglass(k.K2, r.eps_upper, e.frame.Ctilde, e.frame.omega);
        std::ostringstream os;
        os.precision(12);
        os << "box,x1,y_upper\n";
        for (auto [x, y] : outline_rows(r.r_max, half, [&](double a) { return diamond_height(D, a); }))
            os << "diamond," << x << "," << y << "\n";
        for (auto [x, y] : outline_rows(r.eps_upper, half, [&](double a) {
                 return H.K * H.epsilon * H.epsilon + a * H.Ctilde * H.omega(2 * a);
             }))
            os << "hourglass," << x << "," << y << "\n";
        write_text(dir / "boxes.csv", os.str());

        std::unique_ptr<SurfaceW> W;
        try {
            W = std::make_unique<SurfaceW>(build_W(e.frame, r.eps_upper, [] { SurfaceOptions o; o.grid = 41; return o; }()));
        } catch (const Error&) {
        }
        write_text(dir / "ballbox.svg", ballbox_svg(r, e.frame, W.get()));
    }
    if (!r.pass()) {
        for (const auto& s : r.lower)
            if (!s.pass) {
                std::cerr << "lower inclusion FAIL at " << s.target.str() << " g_length " << s.g_length << " "
                          << s.error << "\n";
                break;
            }
        for (const auto& s : r.upper)
            if (!s.inside) {
                std::cerr << "upper inclusion FAIL at " << s.end.str() << " margin " << s.margin << "\n";
                break;
            }
        return kFail;
    }
    return kPass;
}

int cmd_shoot(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    const int n = e.pair.n();
    Point q1 = Point::origin(n);
    if (!cfg.q1.empty()) {
        if (static_cast<int>(cfg.q1.size()) != n + 1) throw PreconditionError("--q1 needs " + std::to_string(n + 1) + " values");
        q1 = Point(Vec(Eigen::Map<const Vec>(cfg.q1.data(), n + 1)));
    }
    Point target = q1;
    target.y() += cfg.dy;
    ShootOptions so;
    if (cfg.tol > 0) so.gap_tol = cfg.tol;
    so.keep_samples = !cfg.out.empty();
    ShootResult r = shoot_loop(e.pair, e.frame, q1, target, cfg.eps_max, 0, 1, so);
    json rep = to_json(r);
    rep["bundle"] = e.name;
    rep["q1"] = to_json(q1);
    rep["target"] = to_json(target);
    emit(cfg, rep, "shoot");
    if (!cfg.out.empty()) write_points_csv(fs::path(cfg.out) / "shoot_path.csv", r.path.polyline());
    return kPass;
}

int cmd_prop22(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    DomainConstants k = estimate_constants(e.pair, e.frame, e.pair.domain, 11, false);
    Prop22Options po;
    if (cfg.tol > 0) po.rel_tol = cfg.tol;
    json rows = json::array();
    int fails = 0;
    double worst_residual = 0, worst_c_ratio = 0;
    for (int m = 0; m < cfg.pairs; ++m) {
        auto rng = make_rng(cfg.seed, m);
        PathPair pp = random_path_pair(e.frame, e.pair.domain, cfg.max_length, rng, m % 3 == 0);
        Prop22Report r = verify_prop22(e.pair, e.frame, k, e.pair.domain, pp.gamma1, pp.gamma2, po);
        fails += !r.pass();
        worst_residual = std::max(worst_residual, r.identity_residual);
        if (r.c_bound > 0) worst_c_ratio = std::max(worst_c_ratio, std::fabs(r.c) / r.c_bound);
        json j = to_json(r);
        j["kind"] = pp.kind;
        rows.push_back(j);
    }
    json rep{{"bundle", e.name},
             {"pairs", cfg.pairs},
             {"failures", fails},
             {"pass", fails == 0},
             {"max_identity_residual", num(worst_residual)},
             {"max_c_over_bound", num(worst_c_ratio)},
             {"constants", to_json(k)},
             {"reports", rows}};
    emit(cfg, rep, "prop22");
    return fails ? kFail : kPass;
}

int cmd_surface(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    SurfaceOptions so;
    so.grid = cfg.grid > 0 ? cfg.grid : 41;
    if (cfg.tol > 0) so.graph_tol = cfg.tol;
    SurfaceW W = build_W(e.frame, cfg.epsilon, so);
    json rep = to_json(W);
    rep["bundle"] = e.name;
    rep["pass"] = W.graph_ok && W.bound_ok;
    emit(cfg, rep, "surface");
    if (!cfg.out.empty()) {
        std::vector<std::vector<double>> extra;
        for (std::size_t i = 0; i < W.points.size(); ++i) {
            std::vector<double> row(W.t[i].data(), W.t[i].data() + W.t[i].size());
            row.push_back(W.error[i]);
            extra.push_back(row);
        }
        std::vector<std::string> names;
        for (int i = 0; i < W.n; ++i) names.push_back("t" + std::to_string(i + 1));
        names.push_back("error");
        write_points_csv(fs::path(cfg.out) / "W.csv", W.points, names, extra);
        if (W.n == 2) write_text(fs::path(cfg.out) / "surface.svg", surface_svg(W));
    }
    return W.graph_ok && W.bound_ok ? kPass : kFail;
}

int cmd_stokes(const RunConfig& cfg) {
    GalleryEntry e = gallery_entry(cfg.bundle);
    CertifyOptions co;
    co.chains = cfg.chains;
    co.base_mesh = cfg.mesh;
    co.refinements = cfg.refine;
    co.seed = cfg.seed;
    if (cfg.tol > 0) co.roundoff = cfg.tol;
    auto suite = certification_suite(e.pair.domain, co);
    StokesStudy st = stokes_study(e.pair, suite, co);
    bool ok = st.exact || st.order >= 1.9;
    json rep = to_json(st);
    rep["bundle"] = e.name;
    rep["chains"] = suite.size();
    rep["certified"] = ok;
    emit(cfg, rep, "stokes");
    return ok ? kPass : kFail;
}

int cmd_gallery(const RunConfig& cfg) {
    if (cfg.action != "list") throw PreconditionError("unknown gallery action '" + cfg.action + "'");
    json all = json::array();
    std::printf("%-16s %-42s %-28s %s\n", "name", "domain", "modulus", "oracles");
    for (const auto& name : gallery_names()) {
        GalleryEntry e = gallery_entry(name);
        std::string oracles;
        for (const auto& o : e.oracles()) oracles += (oracles.empty() ? "" : ", ") + o;
        std::printf("%-16s %-42s %-28s %s\n", name.c_str(), e.pair.domain.str().c_str(), e.omega.name().c_str(),
                    oracles.empty() ? "-" : oracles.c_str());
        all.push_back(to_json(e));
    }
    if (!cfg.out.empty()) write_json(fs::path(cfg.out) / "gallery.json", {{"entries", all}, {"config", cfg.to_json()}});
    return kPass;
}

int run(const RunConfig& cfg) {
    if (cfg.subcommand == "constants") return cmd_constants(cfg);
    if (cfg.subcommand == "ballbox") return cmd_ballbox(cfg);
    if (cfg.subcommand == "shoot") return cmd_shoot(cfg);
    if (cfg.subcommand == "prop22") return cmd_prop22(cfg);
    if (cfg.subcommand == "surface") return cmd_surface(cfg);
    if (cfg.subcommand == "stokes") return cmd_stokes(cfg);
    return cmd_gallery(cfg);
}

int report_error(const char* kind, const std::exception& e, int code) {
    std::cout << json{{"error", kind}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "error (" << kind << "): " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corank-one bundles with continuous exterior differential: ball-box and accessibility checks"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--out", cfg.out, "Directory for JSON, CSV and SVG output");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--tol", cfg.tol, "Tolerance override for the command's main check");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware); SUBRIEMANN_THREADS overrides");

    auto bundle_opt = [&](CLI::App* sub) {
        sub->add_option("--bundle", cfg.bundle, "Gallery entry")->capture_default_str();
    };
    auto* constants = app.add_subcommand("constants", "Domain constants and the fixed domain U");
    bundle_opt(constants);
    constants->add_option("--grid", cfg.grid, "Grid points per axis");

    auto* ballbox = app.add_subcommand("ballbox", "Diamond / ball / hourglass inclusion check");
    bundle_opt(ballbox);
    ballbox->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    ballbox->add_option("--samples", cfg.samples, "Random admissible paths for the upper inclusion")->capture_default_str();

    auto* shoot = app.add_subcommand("shoot", "Loop shooting to a vertical target above q1");
    bundle_opt(shoot);
    shoot->add_option("--dy", cfg.dy)->capture_default_str();
    shoot->add_option("--eps-max", cfg.eps_max)->capture_default_str();
    shoot->add_option("--q1", cfg.q1, "Start point x1 .. xn y")->expected(-1);

    auto* prop22 = app.add_subcommand("prop22", "Two-sided endpoint bracket on random path pairs");
    bundle_opt(prop22);
    prop22->add_option("--pairs", cfg.pairs)->capture_default_str();
    prop22->add_option("--max-length", cfg.max_length)->capture_default_str();

    auto* surface = app.add_subcommand("surface", "Accessible surface W_eps, graph and bound checks");
    bundle_opt(surface);
    surface->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    surface->add_option("--grid", cfg.grid, "Grid points per axis (default 41)");

    auto* stokes = app.add_subcommand("stokes", "Stokes certification study");
    bundle_opt(stokes);
    stokes->add_option("--refine", cfg.refine, "Number of 2x refinements")->capture_default_str();
    stokes->add_option("--chains", cfg.chains)->capture_default_str();
    stokes->add_option("--mesh", cfg.mesh, "Base mesh")->capture_default_str();

    auto* gallery = app.add_subcommand("gallery", "Gallery entries");
    gallery->add_option("action", cfg.action, "list")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kPrecondition;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "surface" && !surface->count("--epsilon")) cfg.epsilon = 0.2;
    if (const char* env = std::getenv("SUBRIEMANN_THREADS")) cfg.threads = std::atoi(env);
    set_thread_count(cfg.threads);

    try {
        return run(cfg);
    } catch (const IoError& e) {
        return report_error("io", e, kIo);
    } catch (const SignLogicError& e) {
        return report_error("sign-logic", e, kFail);
    } catch (const IntegrabilityError& e) {
        return report_error("integrability", e, kFail);
    } catch (const DegenerateBundleError& e) {
        return report_error("degenerate", e, kPrecondition);
    } catch (const Error& e) {
        return report_error("precondition", e, kPrecondition);
    } catch (const std::exception& e) {
        return report_error("internal", e, kFail);
    }
}

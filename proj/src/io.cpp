#include "subriemann/io.hpp"

#include "subriemann/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace subriemann {

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

json to_json(const Point& p) { return to_json(p.z); }

json to_json(const DomainBox& d) {
    json j{{"lo", to_json(d.lo)}, {"hi", to_json(d.hi)}};
    json nat = json::array();
    for (int k = 0; k < d.dim(); ++k) {
        if (d.natural_lo[k]) nat.push_back("lo" + std::to_string(k));
        if (d.natural_hi[k]) nat.push_back("hi" + std::to_string(k));
    }
    j["natural_faces"] = nat;
    return j;
}

json to_json(const Modulus& m) { return m.name(); }

json to_json(const Certification& c) {
    json j{{"certified", c.certified}, {"exact", c.exact},       {"mesh_h", num(c.mesh_h)},
           {"residual", num(c.residual)}, {"order", num(c.order)}};
    json rows = json::array();
    for (std::size_t i = 0; i < c.h.size(); ++i) rows.push_back({{"h", num(c.h[i])}, {"residual", num(c.residuals[i])}});
    j["table"] = rows;
    return j;
}

json to_json(const DomainConstants& k) {
    return {{"domain", to_json(k.domain)},
            {"grid_per_axis", k.grid_per_axis},
            {"grid_points", k.grid_points},
            {"eta_dy_inf", num(k.eta_dy_inf)},
            {"eta_dy_sup", num(k.eta_dy_sup)},
            {"m_deta_inf", num(k.m_deta_inf)},
            {"deta_delta_sup", num(k.deta_delta_sup)},
            {"deta_sup", num(k.deta_sup)},
            {"eta_sup", num(k.eta_sup)},
            {"X_inf", num(k.X_inf)},
            {"X_sup", num(k.X_sup)},
            {"wedge2_inf", num(k.wedge2_inf)},
            {"wedge2_sup", num(k.wedge2_sup)},
            {"wedge_all_inf", num(k.wedge_all_inf)},
            {"wedge_all_sup", num(k.wedge_all_sup)},
            {"d_g", num(k.d_g)},
            {"witness", {{"i", k.witness_i + 1}, {"j", k.witness_j + 1}, {"inf", num(k.witness_inf)},
                         {"sup", num(k.witness_sup)}, {"sign", k.witness_sign}}},
            {"max_pair_abs", num(k.max_pair_abs)},
            {"Ctilde", num(k.Ctilde)},
            {"omega", k.omega},
            {"cell_diameter", num(k.cell_diameter)},
            {"omega_margin", num(k.omega_margin)},
            {"gromov_c", num(k.gromov_c)},
            {"gromov_delta", num(k.gromov_delta)},
            {"eps0", num(k.eps0)},
            {"eps0_status", k.eps0_status},
            {"K1", num(k.K1)},
            {"K2", num(k.K2)},
            {"n", k.n}};
}

json to_json(const FixResult& f) {
    json checks = json::object(), slack = json::object();
    for (const auto& [name, ok] : f.checks) checks[name] = ok;
    for (const auto& [name, v] : f.slack) slack[name] = num(v);
    return {{"U", to_json(f.U)}, {"r", num(f.r)}, {"checks", checks}, {"slack", slack},
            {"constants", to_json(f.constants)}};
}

json to_json(const FlowSpec& s) { return {{"i", s.i + 1}, {"sign", s.sign}, {"t", num(s.t)}}; }

json to_json(const AdmissiblePath& p) {
    json segs = json::array();
    for (const auto& s : p.segments) {
        json j = to_json(s.spec);
        j["end"] = to_json(s.end);
        j["error"] = num(s.error);
        segs.push_back(j);
    }
    return {{"start", to_json(p.start)},
            {"end", to_json(p.end())},
            {"euclidean_length", num(p.euclidean_length())},
            {"g_length", num(p.g_length())},
            {"duration", num(p.duration())},
            {"error", num(p.error())},
            {"segments", segs}};
}

json to_json(const ShootResult& r) {
    json skipped = r.skipped;
    return {{"eps_tilde", num(r.eps_tilde)},
            {"orientation", {{"si", r.orientation.si}, {"sj", r.orientation.sj}}},
            {"iterations", r.iterations},
            {"residual", num(r.residual)},
            {"skipped", skipped},
            {"path", to_json(r.path)}};
}

json to_json(const ConnectResult& r) {
    return {{"q1", to_json(r.q1)},          {"eps_tilde", num(r.eps_tilde)}, {"g_length", num(r.g_length)},
            {"budget", num(r.budget)},      {"within_budget", r.within_budget}, {"tau", to_json(r.tau)},
            {"gamma", to_json(r.gamma)}};
}

json to_json(const Prop22Report& r) {
    return {{"q", to_json(r.q)},
            {"q1", to_json(r.q1)},
            {"q2", to_json(r.q2)},
            {"eps1", num(r.eps1)},
            {"eps2", num(r.eps2)},
            {"eps", num(r.eps)},
            {"ell", num(r.ell)},
            {"xi", num(r.xi)},
            {"gap", num(r.gap)},
            {"int_beta", num(r.int_beta)},
            {"int_P", num(r.int_P)},
            {"int_C1", num(r.int_C1)},
            {"int_C2", num(r.int_C2)},
            {"c", num(r.c)},
            {"c_bound", num(r.c_bound)},
            {"lower", num(r.lower)},
            {"upper", num(r.upper)},
            {"identity_residual", num(r.identity_residual)},
            {"path_defect", num(r.path_defect)},
            {"predicted_sign", r.predicted_sign},
            {"observed_sign", r.observed_sign},
            {"c_bound_ok", r.c_bound_ok},
            {"bracket_ok", r.bracket_ok},
            {"sign_ok", r.sign_ok},
            {"pass", r.pass()}};
}

json to_json(const SurfaceW& W) {
    return {{"epsilon", num(W.epsilon)},
            {"n", W.n},
            {"samples", W.points.size()},
            {"Ctilde", num(W.Ctilde)},
            {"omega", W.omega.name()},
            {"max_x_defect", num(W.max_x_defect)},
            {"max_graph_defect", num(W.max_graph_defect)},
            {"graph_ok", W.graph_ok},
            {"max_bound_ratio", num(W.max_bound_ratio)},
            {"bound_violations", W.bound_violations},
            {"bound_ok", W.bound_ok}};
}

json to_json(const FunnelReport& r) {
    json trials = json::array();
    for (const auto& t : r.trials)
        trials.push_back({{"stepper", t.stepper == Stepper::RK4 ? "rk4" : "rk2"},
                          {"steps", t.steps},
                          {"offset", num(t.offset)},
                          {"endpoint_y", num(t.endpoint_y)},
                          {"estimate", num(t.estimate)}});
    return {{"spread", num(r.spread)}, {"reference", num(r.reference)}, {"ratio", num(r.ratio)},
            {"unique", r.pass},        {"trials", trials}};
}

json to_json(const ReachReport& r) {
    json lower = json::array();
    for (const auto& s : r.lower) {
        json j{{"target", to_json(s.target)},         {"g_length", num(s.g_length)}, {"eps_tilde", num(s.eps_tilde)},
               {"diamond_margin", num(s.diamond_margin)}, {"tangency", num(s.tangency)}, {"pass", s.pass}};
        if (!s.error.empty()) j["error"] = s.error;
        lower.push_back(j);
    }
    json upper_fail = json::array();
    for (const auto& s : r.upper)
        if (!s.inside) upper_fail.push_back({{"end", to_json(s.end)}, {"g_length", num(s.g_length)}, {"margin", num(s.margin)}});
    int gap_ok = 0;
    double worst_gap_ratio = 0;
    for (const auto& g : r.gaps) {
        gap_ok += g.ok;
        if (g.bound > 0) worst_gap_ratio = std::max(worst_gap_ratio, g.gap / g.bound);
    }
    return {{"epsilon", num(r.epsilon)},
            {"seed", r.seed},
            {"slack", num(r.slack)},
            {"pass", r.pass()},
            {"hypothesis", {{"holds", r.hypothesis}, {"bound", num(r.hypothesis_bound)}}},
            {"eps_lower", num(r.eps_lower)},
            {"eps_upper", num(r.eps_upper)},
            {"diamond_r_max", num(r.r_max)},
            {"lower", {{"samples", r.lower.size()},
                       {"failures", r.lower_failures},
                       {"max_length_ratio", num(r.max_length_ratio)},
                       {"max_tangency", num(r.max_tangency)},
                       {"table", lower}}},
            {"upper", {{"samples", r.upper.size()},
                       {"failures", r.upper_failures},
                       {"min_margin", num(r.min_upper_margin)},
                       {"failed", upper_fail}}},
            {"gap_estimates", {{"samples", r.gaps.size()}, {"ok", gap_ok}, {"max_gap_over_bound", num(worst_gap_ratio)}}},
            {"constants", to_json(r.constants)},
            {"K2_over_K1", num(r.constants.K2 / r.constants.K1)}};
}

json to_json(const BoxAlgebraReport& r) {
    return {{"K1", num(r.K1)},
            {"K2", num(r.K2)},
            {"Ctilde", num(r.Ctilde)},
            {"epsilon", num(r.epsilon)},
            {"samples", r.samples},
            {"box_in_diamond", r.box_in_diamond},
            {"hourglass_in_box", r.hourglass_in_box},
            {"min_diamond_margin", num(r.min_diamond_margin)},
            {"min_box_margin", num(r.min_box_margin)},
            {"pass", r.pass()}};
}

json to_json(const StokesStudy& s) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.meshes.size(); ++i)
        rows.push_back({{"mesh", s.meshes[i]}, {"h", num(s.h[i])}, {"max_residual", num(s.max_residual[i])}});
    return {{"order", num(s.order)}, {"exact", s.exact}, {"table", rows}};
}

json to_json(const DdReport& d) {
    json v = json::array();
    for (double x : d.values) v.push_back(num(x));
    return {{"max_abs", num(d.max_abs)}, {"values", v}};
}

json to_json(const DensityScan& s) {
    return {{"points", s.points}, {"positive", s.positive}, {"negative", s.negative},
            {"zero", s.zero},     {"min", num(s.min)},      {"max", num(s.max)}};
}

json to_json(const GalleryEntry& e) {
    json j{{"name", e.name},
           {"description", e.description},
           {"domain", to_json(e.pair.domain)},
           {"omega", e.omega.name()},
           {"Ctilde", num(e.frame.Ctilde)},
           {"ctilde_estimated", e.ctilde_estimated},
           {"smooth", e.smooth},
           {"noninvolutive", e.noninvolutive},
           {"witness", to_json(e.witness)},
           {"witness_sign", e.witness_sign},
           {"oracles", e.oracles()}};
    if (!e.modulus_note.empty()) j["modulus_note"] = e.modulus_note;
    if (e.density_at_witness) j["density_at_witness"] = num(*e.density_at_witness);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw IoError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_points_csv(const std::filesystem::path& path, const std::vector<Point>& pts,
                      const std::vector<std::string>& extra_names, const std::vector<std::vector<double>>& extra) {
    std::ostringstream os;
    os.precision(12);
    int n = pts.empty() ? 0 : pts.front().n();
    for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
    os << "y";
    for (const auto& e : extra_names) os << "," << e;
    os << "\n";
    for (std::size_t r = 0; r < pts.size(); ++r) {
        for (int k = 0; k < pts[r].dim(); ++k) os << (k ? "," : "") << pts[r].z[k];
        if (r < extra.size())
            for (double v : extra[r]) os << "," << v;
        os << "\n";
    }
    write_text(path, os.str());
}

Svg::Svg(double x0, double x1, double y0, double y1, int width, int height)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), w_(width), h_(height) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1;
    if (!(y1_ > y0_)) y1_ = y0_ + 1;
}

double Svg::sx(double x) const { return 50 + (x - x0_) / (x1_ - x0_) * (w_ - 70); }
double Svg::sy(double y) const { return h_ - 40 - (y - y0_) / (y1_ - y0_) * (h_ - 60); }

static std::string points_attr(const std::vector<std::pair<double, double>>& pts,
                               const std::function<double(double)>& fx, const std::function<double(double)>& fy) {
    std::ostringstream os;
    os.precision(6);
    for (const auto& [x, y] : pts) os << fx(x) << "," << fy(y) << " ";
    return os.str();
}

void Svg::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + std::to_string(width) +
             "\" points=\"" +
             points_attr(pts, [this](double x) { return sx(x); }, [this](double y) { return sy(y); }) + "\"/>\n";
}

void Svg::polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill, double opacity) {
    body_ += "<polygon fill=\"" + fill + "\" fill-opacity=\"" + std::to_string(opacity) + "\" stroke=\"" + fill +
             "\" points=\"" +
             points_attr(pts, [this](double x) { return sx(x); }, [this](double y) { return sy(y); }) + "\"/>\n";
}

void Svg::dot(double x, double y, const std::string& fill, double r) {
    std::ostringstream os;
    os.precision(6);
    os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"" << r << "\" fill=\"" << fill << "\"/>\n";
    body_ += os.str();
}

void Svg::rect(double x0, double y0, double x1, double y1, const std::string& fill) {
    std::ostringstream os;
    os.precision(6);
    double a = sx(x0), b = sx(x1), c = sy(y1), d = sy(y0);
    os << "<rect x=\"" << std::min(a, b) << "\" y=\"" << std::min(c, d) << "\" width=\"" << std::fabs(b - a)
       << "\" height=\"" << std::fabs(d - c) << "\" fill=\"" << fill << "\"/>\n";
    body_ += os.str();
}

void Svg::text(double x, double y, const std::string& s, int size) {
    std::ostringstream os;
    os.precision(6);
    os << "<text x=\"" << sx(x) << "\" y=\"" << sy(y) << "\" font-size=\"" << size << "\" font-family=\"sans-serif\">"
       << s << "</text>\n";
    body_ += os.str();
}

void Svg::axes(const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream os;
    os.precision(4);
    os << "<rect x=\"50\" y=\"20\" width=\"" << w_ - 70 << "\" height=\"" << h_ - 60
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << w_ / 2 << "\" y=\"" << h_ - 8 << "\" font-size=\"12\" font-family=\"sans-serif\">" << xlabel
       << " [" << x0_ << ", " << x1_ << "]</text>\n";
    os << "<text x=\"4\" y=\"14\" font-size=\"12\" font-family=\"sans-serif\">" << ylabel << " [" << y0_ << ", " << y1_
       << "]</text>\n";
    body_ += os.str();
}

std::string Svg::str() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\" viewBox=\"0 0 "
       << w_ << " " << h_ << "\">\n<defs><clipPath id=\"plot\"><rect x=\"50\" y=\"20\" width=\"" << w_ - 70
       << "\" height=\"" << h_ - 60 << "\"/></clipPath></defs>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<g clip-path=\"url(#plot)\">\n"
       << body_ << "</g>\n</svg>\n";
    return os.str();
}

std::string ballbox_svg(const ReachReport& r, const AdaptedFrame& frame, const SurfaceW* W) {
    const auto& k = r.constants;
    BoxSpec D = BoxSpec::diamond(1.0 / k.K1, r.eps_lower, frame.Ctilde, frame.omega);
    BoxSpec H = BoxSpec::hourglass(k.K2, r.eps_upper, frame.Ctilde, frame.omega);
    const bool half = frame.domain.natural_lo[0] && frame.domain.lo[0] >= 0;

    double ymax = diamond_height(D, 0.0);
    for (const auto& s : r.upper) ymax = std::max(ymax, std::fabs(s.end.y()));
    ymax *= 1.2;
    double xmax = 0;
    for (const auto& s : r.upper) xmax = std::max(xmax, std::fabs(s.end.x(0)));
    xmax = std::max({xmax, r.r_max}) * 1.1;
    Svg svg(half ? 0.0 : -xmax, xmax, -ymax, ymax);

    const int N = 200;
    auto outline = [&](double rmax, auto height) {
        std::vector<std::pair<double, double>> top, poly;
        double lo = half ? 0.0 : -rmax;
        for (int i = 0; i <= N; ++i) {
            double x = lo + (rmax - lo) * i / N;
            top.emplace_back(x, height(std::fabs(x)));
        }
        poly = top;
        for (int i = N; i >= 0; --i) poly.emplace_back(top[i].first, -top[i].second);
        return poly;
    };
    svg.polygon(outline(r.eps_upper, [&](double x) { return H.K * H.epsilon * H.epsilon + x * H.Ctilde * H.omega(2 * x); }),
                "#f4a261", 0.15);
    svg.polygon(outline(r.r_max, [&](double x) { return diamond_height(D, x); }), "#2a9d8f", 0.35);
    if (W) {
        std::vector<std::pair<double, double>> line;
        for (int i = 0; i <= N; ++i) {
            Vec x = Vec::Zero(W->n);
            x[0] = (half ? 0.0 : -xmax) + (xmax - (half ? 0.0 : -xmax)) * i / N;
            if (W->covers(x)) line.emplace_back(x[0], W->height(x));
        }
        svg.polyline(line, "#264653", 1.5);
    }
    for (const auto& s : r.upper) svg.dot(s.end.x(0), s.end.y(), s.inside ? "#e76f51" : "black", 1.0);
    for (const auto& s : r.lower) svg.dot(s.target.x(0), s.target.y(), s.pass ? "#2a9d8f" : "red", 1.5);
    svg.axes("x1", "y (projection along x2)");
    svg.text(half ? 0.02 * xmax : -0.95 * xmax, 0.9 * ymax, "D (teal), H (orange), W (line), endpoints (dots)", 11);
    return svg.str();
}

std::string surface_svg(const SurfaceW& W) {
    if (W.n != 2) throw PreconditionError("surface figure needs n = 2");
    const auto& a0 = W.axes[0];
    const auto& a1 = W.axes[1];
    Svg svg(a0.front(), a0.back(), a1.front(), a1.back(), 520, 520);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : W.points) {
        lo = std::min(lo, p.y());
        hi = std::max(hi, p.y());
    }
    const std::size_t n0 = a0.size();
    for (std::size_t j = 0; j < a1.size(); ++j)
        for (std::size_t i = 0; i < n0; ++i) {
            double y = W.points[j * n0 + i].y();
            double u = hi > lo ? (y - lo) / (hi - lo) : 0.5;
            int rr = static_cast<int>(255 * u), bb = static_cast<int>(255 * (1 - u));
            char col[16];
            std::snprintf(col, sizeof col, "#%02x40%02x", rr, bb);
            double dx0 = i > 0 ? (a0[i] - a0[i - 1]) / 2 : (a0[1] - a0[0]) / 2;
            double dx1 = i + 1 < n0 ? (a0[i + 1] - a0[i]) / 2 : dx0;
            double dy0 = j > 0 ? (a1[j] - a1[j - 1]) / 2 : (a1[1] - a1[0]) / 2;
            double dy1 = j + 1 < a1.size() ? (a1[j + 1] - a1[j]) / 2 : dy0;
            svg.rect(a0[i] - dx0, a1[j] - dy0, a0[i] + dx1, a1[j] + dy1, col);
        }
    char label[96];
    std::snprintf(label, sizeof label, "y on W: %.4g (blue) .. %.4g (red)", lo, hi);
    svg.axes("x1", "x2");
    svg.text(a0.front(), a1.back(), label, 11);
    return svg.str();
}

}  // namespace subriemann

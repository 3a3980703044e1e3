#pragma once

#include "subriemann/ballbox.hpp"
#include "subriemann/gallery.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace subriemann {

using json = nlohmann::json;

// Rounded to 12 significant digits; non-finite values become null.
json num(double v);
json to_json(const Vec& v);
json to_json(const Point& p);
json to_json(const DomainBox& d);
json to_json(const Modulus& m);
json to_json(const Certification& c);
json to_json(const DomainConstants& k);
json to_json(const FixResult& f);
json to_json(const FlowSpec& s);
json to_json(const AdmissiblePath& p);
json to_json(const ShootResult& r);
json to_json(const ConnectResult& r);
json to_json(const Prop22Report& r);
json to_json(const SurfaceW& W);
json to_json(const FunnelReport& r);
json to_json(const ReachReport& r);
json to_json(const BoxAlgebraReport& r);
json to_json(const StokesStudy& s);
json to_json(const DdReport& d);
json to_json(const DensityScan& s);
json to_json(const GalleryEntry& e);

// Writers throw IoError.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);
// Header line followed by one row per point: x1..xn, y, then extra columns.
void write_points_csv(const std::filesystem::path& path, const std::vector<Point>& pts,
                      const std::vector<std::string>& extra_names = {},
                      const std::vector<std::vector<double>>& extra = {});

// Minimal SVG canvas in data coordinates (y up).
class Svg {
public:
    Svg(double x0, double x1, double y0, double y1, int width = 640, int height = 480);
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.5);
    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill, double opacity = 0.3);
    void dot(double x, double y, const std::string& fill, double r = 1.5);
    void rect(double x0, double y0, double x1, double y1, const std::string& fill);
    void text(double x, double y, const std::string& s, int size = 12);
    void axes(const std::string& xlabel, const std::string& ylabel);
    std::string str() const;

private:
    double sx(double x) const;
    double sy(double y) const;
    double x0_, x1_, y0_, y1_;
    int w_, h_;
    std::string body_;
};

// x1-y cross-section of the diamond, hourglass and W at x2 = ... = 0, with reached points.
std::string ballbox_svg(const ReachReport& r, const AdaptedFrame& frame, const SurfaceW* W);
// Heightmap of W over its (x1, x2) grid.
std::string surface_svg(const SurfaceW& W);

}  // namespace subriemann

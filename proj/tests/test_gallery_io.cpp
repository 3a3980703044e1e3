#include "subriemann/errors.hpp"
#include "subriemann/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace subriemann;

TEST_CASE("gallery lookup") {
    auto names = gallery_names();
    CHECK(names.size() == 6);
    for (const auto& n : names) CHECK(gallery_entry(n).name == n);
    CHECK_THROWS_AS(gallery_entry("paper:cubic"), PreconditionError);
}

TEST_CASE("closed-form oracles are declared where they exist") {
    CHECK(heisenberg().oracles().size() == 3);
    CHECK(paper_example(PaperVariant::Log).modulus_note.size() > 0);
    CHECK(paper_example(PaperVariant::Sqrt).oracles() == std::vector<std::string>{"density at witness"});
}

TEST_CASE("pasted entry agrees with its pieces away from the blend") {
    GalleryEntry p = pasted_example(), s = paper_example(PaperVariant::Sqrt);
    Point below{0.2, -0.3, -0.4};
    CHECK(p.pair.eta.coefficients(below).isApprox(s.pair.eta.coefficients(below)));
    Point above{0.2, 0.7, 0.1};
    Point shifted{0.2, 0.3, 0.1};
    CHECK(p.pair.eta.coefficients(above).isApprox(s.pair.eta.coefficients(shifted)));
    CHECK(nonintegrability(p.pair, Point::origin(2)) == doctest::Approx(std::exp(std::pow(2.0, 2.0 / 3.0))));
}

TEST_CASE("general abc constructor with constant coefficients") {
    auto k = [](double c) { return ScalarField::constant(c, 3); };
    auto x1 = ScalarField::coordinate(0, 3);
    // eta = dy - x1 dz reproduces heisenberg
    GalleryEntry g = general_abc("abc", k(1.0), k(0.0), x1, DomainBox::cube(3, 0.5), Modulus::linear(), 1.0);
    GalleryEntry h = heisenberg();
    Point p{0.2, -0.3, 0.1};
    CHECK(g.pair.eta.coefficients(p).isApprox(h.pair.eta.coefficients(p)));
    CHECK(g.witness_sign == -1);
}

TEST_CASE("density scan of paper:sqrt") {
    DensityScan s = density_scan(paper_example(PaperVariant::Sqrt), 5);
    CHECK(s.points == 125);
    CHECK(s.positive + s.negative + s.zero == 125);
    CHECK(s.max >= std::exp(std::pow(2.0, 2.0 / 3.0)) - 1e-9);
}

TEST_CASE("json numbers carry 12 significant digits") {
    CHECK(num(1.0 / 3.0).get<double>() == 0.333333333333);
    CHECK(num(std::nan("")).is_null());
    CHECK(num(INFINITY).is_null());
    json j = to_json(Point{0.5, -1.0, 2.0});
    CHECK(j.size() == 3);
    CHECK(j[1].get<double>() == -1.0);
}

TEST_CASE("report serialization is deterministic") {
    GalleryEntry h = heisenberg();
    DomainConstants k = estimate_constants(h.pair, h.frame, h.pair.domain);
    CHECK(to_json(k).dump() == to_json(estimate_constants(h.pair, h.frame, h.pair.domain)).dump());
    CHECK(to_json(h)["name"] == "heisenberg");
}

TEST_CASE("writers report I/O failures") {
    CHECK_THROWS_AS(write_text("/proc/no/such/dir/x.txt", "x"), IoError);
    auto dir = std::filesystem::temp_directory_path() / "subriemann_io_test";
    write_points_csv(dir / "p.csv", {Point{1, 2, 3}}, {"w"}, {{4}});
    std::ifstream in(dir / "p.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "x1,x2,y,w");
    CHECK(row == "1,2,3,4");
    std::filesystem::remove_all(dir);
}

TEST_CASE("svg canvas") {
    Svg s(0, 1, 0, 1, 100, 100);
    s.polyline({{0, 0}, {1, 1}}, "#000");
    std::string out = s.str();
    CHECK(out.find("<svg") == 0);
    CHECK(out.find("polyline") != std::string::npos);
    CHECK(out.find("</svg>") != std::string::npos);
}

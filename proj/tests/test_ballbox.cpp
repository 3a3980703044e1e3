#include "subriemann/errors.hpp"
#include "subriemann/ballbox.hpp"
#include "subriemann/gallery.hpp"
#include "subriemann/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace subriemann;

TEST_CASE("box membership by hand") {
    BoxSpec b = BoxSpec::box(2.0, 0.1);  // |x| <= 0.1, |y| <= 0.02
    CHECK(box_membership(b, Point{0.05, 0.05, 0.02}).member);
    CHECK_FALSE(box_membership(b, Point{0.06, 0.05, 0.0}).member);
    CHECK_FALSE(box_membership(b, Point{0.0, 0.0, -0.021}).member);
    CHECK(box_membership(b, Point{0.0, 0.0, 0.0}).margin == doctest::Approx(0.02));

    // diamond with linear modulus: |x| + sqrt(K(2|x|^2 + |y|)) <= eps
    BoxSpec d = BoxSpec::diamond(1.0, 0.3, 1.0, Modulus::linear());
    CHECK(box_membership(d, Point{0.1, 0.0, 0.0}).margin == doctest::Approx(0.3 - 0.1 - std::sqrt(0.02)));
    CHECK(box_membership(d, Point{0.0, 0.0, 0.0899}).member);
    CHECK_FALSE(box_membership(d, Point{0.0, 0.0, 0.0901}).member);

    // hourglass widens with |x|
    BoxSpec h = BoxSpec::hourglass(1.0, 0.1, 1.0, Modulus::linear());
    CHECK(box_membership(h, Point{0.1, 0.0, 0.01 + 0.02}).member);
    CHECK_FALSE(box_membership(h, Point{0.0, 0.0, 0.0101}).member);
}

TEST_CASE("diamond radius and height agree with membership") {
    BoxSpec d = BoxSpec::diamond(4.0, 0.2, 1.5, Modulus::hoelder(0.5));
    double r = diamond_radius(d);
    CHECK(r > 0);
    CHECK(r < 0.2);
    CHECK(diamond_height(d, r) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    for (double f : {0.0, 0.3, 0.7}) {
        double y = diamond_height(d, f * r);
        CHECK(box_membership(d, Point{f * r, 0.0, 0.999 * y}).member);
        CHECK_FALSE(box_membership(d, Point{f * r, 0.0, 1.001 * y + 1e-15}).member);
    }
}

TEST_CASE("bw-box needs a surface") {
    BoxSpec b = BoxSpec::bw_box(1.0, 0.1, nullptr);
    CHECK_THROWS_AS(box_membership(b, Point::origin(2)), PreconditionError);
}

TEST_CASE("straightening chart flattens heisenberg W") {
    GalleryEntry h = heisenberg();
    SurfaceOptions so;
    so.grid = 21;
    auto W = std::make_shared<SurfaceW>(build_W(h.frame, 0.1, so));
    Point p{0.03, -0.04, 0.5};
    Point q = c1_forward(*W, p);
    CHECK(q.y() == doctest::Approx(0.5 + 0.0012).epsilon(1e-6));
    CHECK(distance(c1_inverse(*W, q), p) < 1e-14);
    for (const auto& w : W->points) CHECK(std::fabs(c1_forward(*W, w).y()) < 1e-12);
    BoxSpec b = BoxSpec::bw_box(1.0, 0.1, W);
    CHECK(box_membership(b, Point{0.05, 0.05, 0.0025 + 0.005}).member);
}

TEST_CASE("box algebra with a linear modulus") {
    BoxAlgebraReport r = box_algebra(2, 0.0213, 50.0, 1.0, 0.05, 200, 9);
    CHECK(r.pass());
    // corner samples sit on the boundary
    CHECK(r.min_diamond_margin >= -1e-12);
    CHECK(r.min_box_margin >= -1e-12);
}

TEST_CASE("random admissible paths stay within their length") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    for (int m = 0; m < 10; ++m) {
        auto rng = make_rng(1, m);
        AdmissiblePath p = random_admissible_path(e.frame, Point::origin(2), 0.03, 8, rng);
        CHECK(p.g_length() <= 0.03 + 1e-12);
        CHECK(p.end().x(0) >= 0.0);
        CHECK(p.segments.size() <= 8);
    }
}

TEST_CASE("inclusion chain on heisenberg at small sample count") {
    GalleryEntry h = heisenberg();
    FixResult f = fix_domain(h.pair, h.frame, h.witness);
    const double eps = 0.05;
    DomainConstants k = reach_constants(h.pair, h.frame, f, eps);
    ReachOptions o;
    o.shells = 5;
    o.heights = 5;
    o.upper_paths = 100;
    o.gap_paths = 5;
    ReachReport r = verify_inclusions(h.pair, h.frame, k, eps, o, &f);
    CHECK(r.pass());
    CHECK(r.lower.size() >= 25);
    CHECK(r.max_length_ratio <= 1.05);
    CHECK(r.min_upper_margin >= 0);
    // eps0 is far below desk-scale eps, so the flag is reported rather than required
    CHECK(r.hypothesis_bound > 0);
    CHECK(r.hypothesis == (eps < r.hypothesis_bound));
}

TEST_CASE("inclusion chain needs a non-degenerate bundle") {
    GalleryEntry e = exact_quadratic();
    CHECK_THROWS_AS(fix_domain(e.pair, e.frame, e.witness), DegenerateBundleError);
}

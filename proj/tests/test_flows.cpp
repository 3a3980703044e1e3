#include "subriemann/errors.hpp"
#include "subriemann/ballbox.hpp"
#include "subriemann/gallery.hpp"

#include <doctest.h>

#include <cmath>

using namespace subriemann;

TEST_CASE("heisenberg X2 flow shears y by x1 t") {
    GalleryEntry h = heisenberg();
    Point q{0.2, 0.1, -0.05};
    Segment s = flow_segment(h.frame, FlowSpec{1, 1, 0.15}, q);
    CHECK(s.end.x(0) == doctest::Approx(0.2));
    CHECK(s.end.x(1) == doctest::Approx(0.25));
    CHECK(s.end.y() == doctest::Approx(-0.05 + 0.2 * 0.15).epsilon(1e-12));
    CHECK(s.error < 1e-12);
}

TEST_CASE("flowing back returns to the start") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    Point q{0.1, 0.05, -0.02};
    for (int i = 0; i < 2; ++i) {
        Point p = flow(e.frame, FlowSpec{i, 1, 0.07}, q);
        Point back = flow(e.frame, FlowSpec{i, -1, 0.07}, p);
        CHECK(distance(back, q) < 1e-9);
    }
}

TEST_CASE("flows leaving the domain raise EscapeError") {
    GalleryEntry h = heisenberg();
    FlowOptions o;
    o.domain = h.pair.domain;
    CHECK_THROWS_AS(flow(h.frame, FlowSpec{0, 1, 1.0}, Point::origin(2), o), EscapeError);
}

TEST_CASE("T composes coordinate flows in order") {
    GalleryEntry h = heisenberg();
    Vec t(2);
    t << 0.13, -0.21;
    Point p = compose_T(h.frame, t);
    CHECK(p.x(0) == doctest::Approx(0.13));
    CHECK(p.x(1) == doctest::Approx(-0.21));
    CHECK(p.y() == doctest::Approx(0.13 * -0.21).epsilon(1e-12));
}

TEST_CASE("path lengths and concatenation") {
    GalleryEntry h = heisenberg();
    AdmissiblePath a = run_path(h.frame, Point::origin(2), {FlowSpec{0, 1, 0.1}, FlowSpec{1, -1, 0.05}});
    AdmissiblePath b = run_path(h.frame, a.end(), {FlowSpec{0, -1, 0.1}});
    AdmissiblePath ab = concat(a, b);
    CHECK(ab.segments.size() == 3);
    CHECK(ab.duration() == doctest::Approx(0.25));
    CHECK(ab.end().y() == doctest::Approx(-0.005).epsilon(1e-10));
    CHECK(tangency_defect(h.pair, h.frame, ab) < 1e-12);
    CHECK_THROWS_AS(concat(b, a), PreconditionError);
}

TEST_CASE("heisenberg W is the graph of x1 x2") {
    GalleryEntry h = heisenberg();
    SurfaceOptions so;
    so.grid = 11;
    SurfaceW W = build_W(h.frame, 0.2, so);
    CHECK(W.points.size() == 121);
    CHECK(W.graph_ok);
    CHECK(W.bound_ok);
    CHECK(W.max_bound_ratio <= 0.25 + 1e-12);
    for (std::size_t i = 0; i < W.points.size(); ++i)
        CHECK(W.points[i].y() == doctest::Approx(h.W_height(W.points[i].xs())).epsilon(1e-12));
    Vec x(2);
    x << 0.05, -0.07;
    CHECK(W.height(x) == doctest::Approx(-0.0035).epsilon(1e-3));
    Vec far(2);
    far << 0.5, 0.0;
    CHECK_FALSE(W.covers(far));
    CHECK_THROWS_AS(W.height(far), ExtrapolationError);
}

TEST_CASE("W bound for the paper examples") {
    for (auto v : {PaperVariant::Sqrt, PaperVariant::Log}) {
        GalleryEntry e = paper_example(v);
        SurfaceOptions so;
        so.grid = 21;
        SurfaceW W = build_W(e.frame, 0.2, so);
        CHECK(W.graph_ok);
        CHECK(W.bound_violations == 0);
    }
}

TEST_CASE("funnel separates unique flows from y' = sqrt|y|") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    FunnelReport u = funnel_probe(e.frame, 0, Point{0.0, 0.3, 0.1}, 0.3);
    CHECK(u.pass);
    AdaptedFrame ctl = sqrt_control_frame(2, DomainBox::cube(3, 2.0));
    FunnelReport c = funnel_probe(ctl, 0, Point::origin(2), 1.0);
    CHECK_FALSE(c.pass);
    CHECK(c.spread >= 0.2 * 1.0 / 4.0);
}

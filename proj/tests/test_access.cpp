#include "subriemann/errors.hpp"
#include "subriemann/ballbox.hpp"
#include "subriemann/gallery.hpp"
#include "subriemann/parallel.hpp"

#include <doctest.h>

#include <cmath>

using namespace subriemann;

namespace {

double shoelace(const std::vector<Point>& poly) {
    double a = 0;
    for (std::size_t k = 0; k + 1 < poly.size(); ++k)
        a += poly[k].x(0) * poly[k + 1].x(1) - poly[k + 1].x(0) * poly[k].x(1);
    return 0.5 * std::fabs(a);
}

}  // namespace

TEST_CASE("heisenberg loop displaces by eps squared") {
    GalleryEntry h = heisenberg();
    Point q = loop_endpoint(h.frame, Point::origin(2), 0.1, 0, 1);
    CHECK(std::fabs(q.x(0)) < 1e-14);
    CHECK(std::fabs(q.x(1)) < 1e-14);
    CHECK(std::fabs(q.y() - 0.01) / 0.01 < 1e-8);
    // reversing one leg reverses the sign
    Point r = loop_endpoint(h.frame, Point::origin(2), 0.1, 0, 1, {1, -1});
    CHECK(r.y() == doctest::Approx(-0.01).epsilon(1e-8));
}

TEST_CASE("predicted loop sign follows the bracket") {
    GalleryEntry h = heisenberg();
    Point o = Point::origin(2);
    CHECK(predicted_loop_sign(h.pair, h.frame, o, 0, 1, {1, 1}) == 1);
    CHECK(predicted_loop_sign(h.pair, h.frame, o, 0, 1, {-1, 1}) == -1);
    CHECK(predicted_loop_sign(h.pair, h.frame, o, 0, 1, {-1, -1}) == 1);
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    Point q{0.05, 0.0, 0.0};
    for (int si : {1, -1})
        for (int sj : {1, -1}) {
            int s = predicted_loop_sign(e.pair, e.frame, q, 0, 1, {si, sj});
            double dy = loop_endpoint(e.frame, q, 0.02, 0, 1, {si, sj}).y() - q.y();
            CHECK(s * dy > 0);
        }
}

TEST_CASE("shoot_loop inverts the heisenberg loop") {
    GalleryEntry h = heisenberg();
    Point target{0.0, 0.0, 0.01};
    ShootResult r = shoot_loop(h.pair, h.frame, Point::origin(2), target, 0.25, 0, 1);
    CHECK(std::fabs(r.eps_tilde - 0.1) < 1e-8);
    CHECK(r.residual < 1e-9);
    ShootResult down = shoot_loop(h.pair, h.frame, Point::origin(2), Point{0.0, 0.0, -0.0025}, 0.25, 0, 1);
    CHECK(down.eps_tilde == doctest::Approx(0.05).epsilon(1e-7));
    CHECK(down.orientation.si * down.orientation.sj == -1);
}

TEST_CASE("shoot_loop rejects targets it cannot reach") {
    GalleryEntry h = heisenberg();
    CHECK_THROWS_AS(shoot_loop(h.pair, h.frame, Point::origin(2), Point{0.0, 0.0, 0.1}, 0.1, 0, 1), SignLogicError);
    CHECK_THROWS(shoot_loop(h.pair, h.frame, Point::origin(2), Point{0.01, 0.0, 0.01}, 0.25, 0, 1));
}

TEST_CASE("connect reaches a point above W within budget") {
    GalleryEntry h = heisenberg();
    FixResult f = fix_domain(h.pair, h.frame, h.witness);
    const double eps = 0.05;
    Point p{0.004, -0.003, -1.2e-5 + 1e-6};
    ConnectResult c = connect(h.pair, h.frame, f.constants, p, eps);
    CHECK(distance(c.path.end(), p) < 1e-8);
    CHECK(c.g_length <= 1.05 * eps);
    CHECK(c.within_budget);
    CHECK(c.tau.end().y() == doctest::Approx(0.004 * -0.003).epsilon(1e-10));
}

TEST_CASE("parallelogram integral on heisenberg") {
    GalleryEntry h = heisenberg();
    Point q{0.1, 0.0, 0.0};
    CHECK(parallelogram_integral(h.pair, h.frame, q, 0, 1, 0.1) == doctest::Approx(-0.01).epsilon(1e-10));
}

TEST_CASE("gromov fill of the unit square") {
    std::vector<Point> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}};
    Filling f = gromov_fill(sq);
    CHECK(f.area == doctest::Approx(1.0));
    CHECK(f.length == doctest::Approx(4.0));
    CHECK(f.apex.x(0) == doctest::Approx(0.5));
    CHECK(f.max_distance == doctest::Approx(0.5));
    Chain1 bd = boundary(f.chain);
    CHECK(is_closed(bd, 1e-12));
    CHECK_THROWS_AS(gromov_fill({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}), PreconditionError);
}

TEST_CASE("cone area bounds the enclosed planar area") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point> poly;
        const int m = 5 + trial % 4;
        for (int k = 0; k < m; ++k) {
            double th = 2 * M_PI * k / m, r = 0.5 + 0.4 * U(rng);
            poly.push_back(Point{r * std::cos(th), r * std::sin(th), 0.1 * U(rng)});
        }
        poly.push_back(poly.front());
        Filling f = gromov_fill(poly);
        CHECK(f.area >= shoelace(poly) - 1e-12);
        // isoperimetric ceiling for a cone over the barycenter
        CHECK(f.area <= f.length * f.max_distance / 2 + 1e-12);
    }
}

TEST_CASE("loop halves share both endpoints") {
    GalleryEntry h = heisenberg();
    auto [g1, g2] = loop_halves(h.frame, Point::origin(2), 0.05, 0, 1);
    CHECK(distance(g1.start, g2.start) < 1e-14);
    CHECK((g1.end().xs() - g2.end().xs()).norm() < 1e-12);
    CHECK(std::fabs(g2.end().y() - g1.end().y()) == doctest::Approx(0.0025).epsilon(1e-8));
}

TEST_CASE("endpoint bracket on a few heisenberg and paper pairs") {
    for (auto e : {heisenberg(), paper_example(PaperVariant::Sqrt)}) {
        DomainConstants k = estimate_constants(e.pair, e.frame, e.pair.domain, 11, false);
        for (int m = 0; m < 6; ++m) {
            auto rng = make_rng(3, m);
            PathPair pp = random_path_pair(e.frame, e.pair.domain, 0.1, rng, m % 2 == 0);
            Prop22Report r = verify_prop22(e.pair, e.frame, k, e.pair.domain, pp.gamma1, pp.gamma2);
            CHECK_MESSAGE(r.pass(), e.name << " pair " << m << " " << pp.kind);
            CHECK(r.identity_residual < 1e-8);
            CHECK(r.lower <= r.gap * (1 + 1e-6) + 1e-11);
        }
    }
}

TEST_CASE("random path pairs are reproducible from the seed") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    auto r1 = make_rng(11, 4), r2 = make_rng(11, 4);
    PathPair a = random_path_pair(e.frame, e.pair.domain, 0.1, r1, false);
    PathPair b = random_path_pair(e.frame, e.pair.domain, 0.1, r2, false);
    CHECK(distance(a.gamma2.end(), b.gamma2.end()) == 0.0);
    CHECK(a.gamma1.euclidean_length() <= 0.1);
    CHECK(a.gamma2.euclidean_length() <= 0.1);
    CHECK((a.gamma1.end().xs() - a.gamma2.end().xs()).norm() < 1e-9);
}

#include "subriemann/errors.hpp"
#include "subriemann/gallery.hpp"

#include <doctest.h>

#include <cmath>

using namespace subriemann;

namespace {

Chain2 flat_square(double a, double b, int mesh = 16) {
    Cell2 c;
    c.map = [=](double u, double v) { return Point{a + (b - a) * u, a + (b - a) * v, 0.0}; };
    c.mesh = mesh;
    return Chain2{{c}};
}

}  // namespace

TEST_CASE("heisenberg d eta is -dx1^dx2") {
    GalleryEntry h = heisenberg();
    Point p{0.3, -0.2, 0.1};
    Mat M = h.pair.deta.matrix(p);
    CHECK(M(0, 1) == doctest::Approx(-1.0));
    CHECK(M(1, 0) == doctest::Approx(1.0));
    CHECK(std::fabs(M(0, 2)) < 1e-14);
    CHECK(std::fabs(M(1, 2)) < 1e-14);
    CHECK(wedge_density(h.pair.eta, h.pair.deta, p) == doctest::Approx(-1.0));
}

TEST_CASE("integral of d eta over a flat square is minus its area") {
    GalleryEntry h = heisenberg();
    CHECK(integrate_chain2(h.pair.deta, flat_square(0.0, 0.25)) == doctest::Approx(-0.0625).epsilon(1e-12));
    // reversing orientation flips the sign
    CHECK(integrate_chain2(h.pair.deta, reversed(flat_square(0.0, 0.25))) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("boundary of a square is a closed cycle and Stokes holds") {
    GalleryEntry h = heisenberg();
    Chain2 sq = flat_square(-0.2, 0.3);
    Chain1 bd = boundary(sq);
    CHECK(is_closed(bd, 1e-12));
    // x1 dx2 around the square picks up its area
    CHECK(integrate_chain1(h.pair.eta, bd) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(stokes_residual(h.pair, bd, sq) < 1e-12);
}

TEST_CASE("endpoint grading clusters nodes near both ends") {
    CHECK(grade(0.0, Grading::Endpoint) == doctest::Approx(0.0));
    CHECK(grade(1.0, Grading::Endpoint) == doctest::Approx(1.0));
    CHECK(grade(0.5, Grading::Endpoint) == doctest::Approx(0.5));
    CHECK(grade(0.1, Grading::Endpoint) < 0.1);
    CHECK(grade(0.3, Grading::Uniform) == doctest::Approx(0.3));
}

TEST_CASE("exact forms certify as exact") {
    for (auto e : {exact_flat(), exact_quadratic()}) {
        CertifyOptions co;
        co.chains = 10;
        co.refinements = 2;
        Certification c = certify(e.pair, co);
        CHECK(c.exact);
        CHECK(c.certified);
    }
}

TEST_CASE("paper:log Stokes residual decays at second order") {
    GalleryEntry e = paper_example(PaperVariant::Log);
    CertifyOptions co;
    co.chains = 12;
    co.refinements = 2;
    Certification c = certify(e.pair, co);
    CHECK(c.certified);
    CHECK(c.order >= 1.9);
}

TEST_CASE("fitted order of a clean power law") {
    std::vector<double> h{0.1, 0.05, 0.025}, r;
    for (double x : h) r.push_back(3.0 * x * x);
    CHECK(fitted_order(h, r) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("d eta integrates to zero over closed surfaces") {
    GalleryEntry h = heisenberg();
    auto closed = random_closed_chains(h.pair.domain, 4, 16, 3);
    DdReport d = check_dd_zero(h.pair, closed);
    CHECK(d.values.size() == 4);
    CHECK(d.max_abs < 1e-12);
}

TEST_CASE("exterior derivative needs the partials it uses") {
    OneForm eta;
    eta.a0 = ScalarField::constant(1.0, 3);
    eta.a = {ScalarField([](const Point& p) { return p.z[2]; }), ScalarField::constant(0.0, 3)};
    CHECK_THROWS_AS(exterior_derivative(eta), PreconditionError);
}

TEST_CASE("scaling a pair scales both forms") {
    GalleryEntry h = heisenberg();
    CEDPair s = scaled(h.pair, 2.0);
    Point p{0.1, 0.2, 0.3};
    CHECK(s.eta.coefficients(p).isApprox(2.0 * h.pair.eta.coefficients(p)));
    CHECK(s.deta.matrix(p).isApprox(2.0 * h.pair.deta.matrix(p)));
}

TEST_CASE("Stokes residual rejects a cycle that is not the boundary") {
    GalleryEntry h = heisenberg();
    Chain1 other = boundary(flat_square(0.0, 0.1));
    CHECK_THROWS_AS(stokes_residual(h.pair, other, flat_square(0.0, 0.2)), BoundaryMismatchError);
}

TEST_CASE("paste rejects bumps that are not a partition of unity") {
    GalleryEntry h = heisenberg();
    ScalarField half([](const Point&) { return 0.5; },
                     {[](const Point&) { return 0.0; }, [](const Point&) { return 0.0; },
                      [](const Point&) { return 0.0; }});
    CHECK_THROWS_AS(paste({{h.pair, half}}, h.pair.domain, 3, std::nullopt), PreconditionError);
}

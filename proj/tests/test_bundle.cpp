#include "subriemann/errors.hpp"
#include "subriemann/gallery.hpp"

#include <doctest.h>

#include <cmath>

using namespace subriemann;

// e^{2^{2/3}}, 30 digits from an arbitrary-precision evaluation
constexpr double kPaperDensity = 4.89102088662469714634333694125;

TEST_CASE("heisenberg frame is dx1 and dx2 + x1 dy") {
    GalleryEntry h = heisenberg();
    Point p{0.2, -0.1, 0.4};
    Vec X1 = h.frame.X(0, p), X2 = h.frame.X(1, p);
    CHECK(X1.isApprox(Vec((Vec(3) << 1, 0, 0).finished())));
    CHECK(X2.isApprox(Vec((Vec(3) << 0, 1, 0.2).finished())));
    CHECK(std::fabs(h.pair.eta.apply(p, X1)) < 1e-15);
    CHECK(std::fabs(h.pair.eta.apply(p, X2)) < 1e-15);
}

TEST_CASE("heisenberg bracket and density") {
    GalleryEntry h = heisenberg();
    Point o = Point::origin(2);
    CHECK(nonintegrability(h.pair, o) == doctest::Approx(-1.0));
    CHECK(deta_frame(h.pair, h.frame, 0, 1, o) == doctest::Approx(-1.0));
    // [X1, X2] = dy, so the y-component of the bracket is +1
    CHECK(lie_bracket(h.pair, h.frame, 0, 1, o) == doctest::Approx(1.0));
}

TEST_CASE("m(d eta) at a grid corner of the heisenberg cube") {
    GalleryEntry h = heisenberg();
    PointNorms pn = point_norms(h.pair, h.frame, Point{0.5, 0.5, 0.5});
    CHECK(pn.m_deta == doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-10));
    CHECK(pn.eta_dy == doctest::Approx(1.0));
}

TEST_CASE("heisenberg constants on the full cube") {
    GalleryEntry h = heisenberg();
    DomainConstants k = estimate_constants(h.pair, h.frame, h.pair.domain);
    CHECK(k.witness_i == 0);
    CHECK(k.witness_j == 1);
    CHECK(k.m_deta_inf == doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-10));
    CHECK(k.K1 == doctest::Approx(0.0213).epsilon(0.01));
    CHECK(k.K1 == doctest::Approx(K1_of(k.m_deta_inf, k.eta_dy_sup)));
    CHECK(k.K2 > k.K1);
}

TEST_CASE("paper:sqrt density at the origin matches the closed form") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    double d = nonintegrability(e.pair, Point::origin(2));
    CHECK(std::fabs(d - kPaperDensity) / kPaperDensity < 1e-6);
    CHECK(e.density_at_witness.value() == doctest::Approx(kPaperDensity).epsilon(1e-12));
    CHECK(e.noninvolutive);
}

TEST_CASE("paper:log has the same density at the origin") {
    GalleryEntry e = paper_example(PaperVariant::Log);
    CHECK(nonintegrability(e.pair, Point::origin(2)) == doctest::Approx(kPaperDensity).epsilon(1e-6));
}

TEST_CASE("paper examples are undefined for x < 0") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    CHECK_THROWS_AS(e.pair.eta.coefficients(Point{-0.1, 0.0, 0.0}), DomainError);
}

TEST_CASE("fix_domain for heisenberg keeps every check") {
    GalleryEntry h = heisenberg();
    FixResult f = fix_domain(h.pair, h.frame, h.witness);
    CHECK(f.U.contains(Point::origin(2)));
    CHECK(f.constants.eps0 > 0);
    for (const auto& [name, ok] : f.checks) CHECK_MESSAGE(ok, name);
    for (const auto& [name, ok] : recheck_fix(h.pair, h.frame, f, h.witness)) CHECK_MESSAGE(ok, name);
}

TEST_CASE("fix_domain for paper:sqrt keeps the natural x = 0 face") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    FixResult f = fix_domain(e.pair, e.frame, e.witness);
    CHECK(f.U.lo[0] == 0.0);
    CHECK(f.U.natural_lo[0]);
    CHECK(f.constants.m_deta_inf > 0);
}

TEST_CASE("exact forms are degenerate") {
    for (auto e : {exact_flat(), exact_quadratic()}) {
        CHECK_FALSE(e.noninvolutive);
        CHECK_THROWS_AS(fix_domain(e.pair, e.frame, e.witness), DegenerateBundleError);
        CHECK_THROWS_AS(estimate_constants(e.pair, e.frame, e.pair.domain), DegenerateBundleError);
    }
}

TEST_CASE("C tilde estimate dominates sampled difference quotients") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    CHECK(e.ctilde_estimated);
    CtildeOptions co;
    co.pairs = 500;
    co.seed = 99;
    co.inflation = 1.0;
    CHECK(estimate_ctilde(e.frame, e.pair.domain, co) <= e.frame.Ctilde);
}

TEST_CASE("moduli") {
    CHECK(Modulus::linear()(0.3) == doctest::Approx(0.3));
    CHECK(Modulus::hoelder(0.5)(0.25) == doctest::Approx(0.5));
    CHECK(Modulus::log()(0.01) == doctest::Approx(1.0 / std::log(100.0)));
    CHECK(Modulus::log()(0.9) == doctest::Approx(1.0 / std::log(2.0)));
    CHECK(Modulus::log()(0.0) == 0.0);
}

// Randomized invariants; every draw comes from a fixed seed.
#include "subriemann/ballbox.hpp"
#include "subriemann/gallery.hpp"
#include "subriemann/parallel.hpp"

#include <doctest.h>

#include <cmath>

using namespace subriemann;

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Point random_point(std::mt19937_64& rng, const DomainBox& d) {
    Vec z(d.dim());
    for (int k = 0; k < d.dim(); ++k) z[k] = uniform(rng, d.lo[k], d.hi[k]);
    return Point(z);
}

}  // namespace

TEST_CASE("heisenberg loop displacement is eps^2 from any base point") {
    GalleryEntry h = heisenberg();
    auto rng = make_rng(101, 0);
    for (int t = 0; t < 25; ++t) {
        Point q = random_point(rng, DomainBox::cube(3, 0.2));
        double e = uniform(rng, 0.01, 0.2);
        Point p = loop_endpoint(h.frame, q, e, 0, 1);
        CHECK((p.xs() - q.xs()).norm() < 1e-13);
        CHECK((p.y() - q.y()) == doctest::Approx(e * e).epsilon(1e-10));
    }
}

TEST_CASE("flows form a one-parameter group") {
    GalleryEntry e = paper_example(PaperVariant::Sqrt);
    auto rng = make_rng(102, 0);
    for (int t = 0; t < 20; ++t) {
        Point q = random_point(rng, DomainBox(Vec((Vec(3) << 0.05, -0.3, -0.3).finished()), Vec::Constant(3, 0.3)));
        int i = t % 2;
        double s1 = uniform(rng, 0.0, 0.1), s2 = uniform(rng, 0.0, 0.1);
        Point a = flow(e.frame, FlowSpec{i, 1, s2}, flow(e.frame, FlowSpec{i, 1, s1}, q));
        Point b = flow(e.frame, FlowSpec{i, 1, s1 + s2}, q);
        CHECK(distance(a, b) < 1e-9);
    }
}

TEST_CASE("admissible paths are tangent to ker eta") {
    auto rng = make_rng(103, 0);
    for (auto e : {heisenberg(), paper_example(PaperVariant::Sqrt), paper_example(PaperVariant::Log)}) {
        for (int t = 0; t < 5; ++t) {
            FlowOptions fo;
            fo.keep_samples = true;
            AdmissiblePath p = random_admissible_path(e.frame, Point::origin(2), 0.1, 6, rng, 1e-3, fo);
            CHECK(tangency_defect(e.pair, e.frame, p) < 1e-9);
        }
    }
}

TEST_CASE("closed boundaries integrate exact forms to zero") {
    GalleryEntry e = exact_quadratic();
    auto rng = make_rng(104, 0);
    for (int t = 0; t < 10; ++t) {
        Chain2 c = random_cell(e.pair.domain, rng, t % 3 == 0);
        CHECK(std::fabs(integrate_chain1(e.pair.eta, boundary(c))) < 1e-11);
    }
}

TEST_CASE("Stokes residual on heisenberg cells shrinks with the mesh") {
    GalleryEntry h = heisenberg();
    auto rng = make_rng(105, 0);
    for (int t = 0; t < 5; ++t) {
        Chain2 c = random_cell(h.pair.domain, rng, false);
        double r0 = stokes_residual(h.pair, boundary(c), c);
        for (auto& cell : c.cells) cell.mesh *= 4;
        double r1 = stokes_residual(h.pair, boundary(c), c);
        CHECK(r1 <= std::max(r0 / 4, 1e-13));
    }
}

TEST_CASE("box inside hourglass, both monotone in eps") {
    auto rng = make_rng(106, 0);
    for (int t = 0; t < 500; ++t) {
        Point p{uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), uniform(rng, -0.02, 0.02)};
        double K = uniform(rng, 0.5, 3.0), eps = uniform(rng, 0.01, 0.1);
        BoxSpec B = BoxSpec::box(K, eps);
        BoxSpec H = BoxSpec::hourglass(K, eps, 1.0, Modulus::hoelder(0.5));
        BoxSpec D = BoxSpec::diamond(K, eps, 1.0, Modulus::hoelder(0.5));
        if (box_membership(B, p).member) CHECK(box_membership(H, p).member);
        if (box_membership(D, p).member) CHECK(box_membership(BoxSpec::diamond(K, 1.5 * eps, 1.0, D.omega), p).member);
        if (box_membership(H, p).member) CHECK(box_membership(BoxSpec::hourglass(K, 1.5 * eps, 1.0, H.omega), p).member);
    }
}

TEST_CASE("parallelogram integral is minus eps^2 on heisenberg everywhere") {
    GalleryEntry h = heisenberg();
    auto rng = make_rng(107, 0);
    for (int t = 0; t < 10; ++t) {
        Point q = random_point(rng, DomainBox::cube(3, 0.2));
        double e = uniform(rng, 0.01, 0.2);
        CHECK(parallelogram_integral(h.pair, h.frame, q, 0, 1, e) == doctest::Approx(-e * e).epsilon(1e-10));
    }
}

TEST_CASE("parallel_for output is independent of the thread count") {
    auto run = [](int threads) {
        set_thread_count(threads);
        std::vector<double> out(64);
        parallel_for(64, [&](int i) {
            auto rng = make_rng(9, i);
            out[i] = std::uniform_real_distribution<double>()(rng);
        });
        return out;
    };
    CHECK(run(1) == run(4));
    set_thread_count(0);
}

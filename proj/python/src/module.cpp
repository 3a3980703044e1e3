// Python bindings. Reports cross the boundary as dicts built from the JSON serializers.
#include "subriemann/errors.hpp"
#include "subriemann/io.hpp"
#include "subriemann/parallel.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace subriemann;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Point to_point(const std::vector<double>& v) {
    if (v.size() < 2) throw PreconditionError("a point needs at least two coordinates");
    return Point(Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))));
}

class Bundle {
public:
    explicit Bundle(const std::string& name) : e_(gallery_entry(name)) {}

    std::string name() const { return e_.name; }
    py::object info() const { return to_py(to_json(e_)); }
    double density(const std::vector<double>& p) const { return nonintegrability(e_.pair, to_point(p)); }
    std::vector<double> eta(const std::vector<double>& p) const {
        Vec c = e_.pair.eta.coefficients(to_point(p));
        return {c.data(), c.data() + c.size()};
    }
    std::vector<double> field(int i, const std::vector<double>& p) const {
        Vec X = e_.frame.X(i, to_point(p));
        return {X.data(), X.data() + X.size()};
    }
    std::vector<double> flow(int i, double t, const std::vector<double>& p, double h) const {
        FlowSpec s{i, t < 0 ? -1 : 1, std::fabs(t), h};
        return subriemann::flow(e_.frame, s, to_point(p)).to_vector();
    }
    std::vector<double> loop(const std::vector<double>& q, double eps, int si, int sj, double h) const {
        return loop_endpoint(e_.frame, to_point(q), eps, 0, 1, {si, sj}, h).to_vector();
    }
    py::object shoot(const std::vector<double>& q, double dy, double eps_max, double gap_tol) const {
        Point q1 = to_point(q), target = q1;
        target.y() += dy;
        ShootOptions o;
        o.gap_tol = gap_tol;
        return to_py(to_json(shoot_loop(e_.pair, e_.frame, q1, target, eps_max, 0, 1, o)));
    }
    py::object constants(int grid) const {
        return to_py(to_json(estimate_constants(e_.pair, e_.frame, e_.pair.domain, grid, false)));
    }
    py::object fix(int grid) const { return to_py(to_json(fix_domain(e_.pair, e_.frame, e_.witness, {grid, 1e-6}))); }
    py::object surface(double eps, int grid) const {
        SurfaceOptions o;
        o.grid = grid;
        return to_py(to_json(build_W(e_.frame, eps, o)));
    }
    py::object certify(int chains, int base_mesh, int refinements, std::uint64_t seed) const {
        CertifyOptions o;
        o.chains = chains;
        o.base_mesh = base_mesh;
        o.refinements = refinements;
        o.seed = seed;
        return to_py(to_json(subriemann::certify(e_.pair, o)));
    }
    py::object prop22(int pairs, double max_length, std::uint64_t seed) const {
        DomainConstants k = estimate_constants(e_.pair, e_.frame, e_.pair.domain, 11, false);
        json out = json::array();
        for (int m = 0; m < pairs; ++m) {
            auto rng = make_rng(seed, m);
            PathPair pp = random_path_pair(e_.frame, e_.pair.domain, max_length, rng, m % 3 == 0);
            json j = to_json(verify_prop22(e_.pair, e_.frame, k, e_.pair.domain, pp.gamma1, pp.gamma2));
            j["kind"] = pp.kind;
            out.push_back(j);
        }
        return to_py(out);
    }
    py::object ballbox(double eps, int upper_paths, std::uint64_t seed) const {
        FixResult f = fix_domain(e_.pair, e_.frame, e_.witness);
        DomainConstants k = reach_constants(e_.pair, e_.frame, f, eps);
        ReachOptions o;
        o.upper_paths = upper_paths;
        o.seed = seed;
        return to_py(to_json(verify_inclusions(e_.pair, e_.frame, k, eps, o, &f)));
    }

private:
    GalleryEntry e_;
};

Membership membership(const std::string& kind, double K, double eps, double Ctilde, double theta,
                      const std::vector<double>& p) {
    Modulus w = theta == 1.0 ? Modulus::linear() : Modulus::hoelder(theta);
    BoxSpec s;
    if (kind == "diamond") s = BoxSpec::diamond(K, eps, Ctilde, w);
    else if (kind == "hourglass") s = BoxSpec::hourglass(K, eps, Ctilde, w);
    else if (kind == "box") s = BoxSpec::box(K, eps);
    else throw PreconditionError("unknown box kind '" + kind + "'");
    return box_membership(s, to_point(p));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Corank-one distributions with continuous exterior differential";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DegenerateBundleError>(m, "DegenerateBundleError", m.attr("Error").ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", m.attr("Error").ptr());
    py::register_exception<DomainError>(m, "DomainError", m.attr("Error").ptr());
    py::register_exception<EscapeError>(m, "EscapeError", m.attr("Error").ptr());
    py::register_exception<SignLogicError>(m, "SignLogicError", m.attr("Error").ptr());

    m.def("gallery_names", &gallery_names);
    m.def("set_threads", &set_thread_count, py::arg("n"));

    py::class_<Membership>(m, "Membership")
        .def_readonly("member", &Membership::member)
        .def_readonly("margin", &Membership::margin)
        .def("__bool__", [](const Membership& s) { return s.member; });
    m.def("box_membership", &membership, py::arg("kind"), py::arg("K"), py::arg("eps"), py::arg("Ctilde") = 1.0,
          py::arg("theta") = 1.0, py::arg("point"),
          "Membership in a diamond, hourglass or box; theta selects omega(s) = s^theta.");

    py::class_<Bundle>(m, "Bundle")
        .def(py::init<const std::string&>(), py::arg("name"))
        .def_property_readonly("name", &Bundle::name)
        .def("info", &Bundle::info)
        .def("density", &Bundle::density, py::arg("point"))
        .def("eta", &Bundle::eta, py::arg("point"))
        .def("field", &Bundle::field, py::arg("i"), py::arg("point"))
        .def("flow", &Bundle::flow, py::arg("i"), py::arg("t"), py::arg("point"), py::arg("h") = 1e-3)
        .def("loop", &Bundle::loop, py::arg("q"), py::arg("eps"), py::arg("si") = 1, py::arg("sj") = 1,
             py::arg("h") = 1e-3)
        .def("shoot", &Bundle::shoot, py::arg("q"), py::arg("dy"), py::arg("eps_max") = 0.25,
             py::arg("gap_tol") = 1e-10)
        .def("constants", &Bundle::constants, py::arg("grid") = 11)
        .def("fix", &Bundle::fix, py::arg("grid") = 11)
        .def("surface", &Bundle::surface, py::arg("eps") = 0.2, py::arg("grid") = 41)
        .def("certify", &Bundle::certify, py::arg("chains") = 50, py::arg("base_mesh") = 32,
             py::arg("refinements") = 3, py::arg("seed") = 20240601)
        .def("prop22", &Bundle::prop22, py::arg("pairs") = 10, py::arg("max_length") = 0.1, py::arg("seed") = 3)
        .def("ballbox", &Bundle::ballbox, py::arg("eps"), py::arg("upper_paths") = 1000, py::arg("seed") = 7);
}

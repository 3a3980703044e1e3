#pragma once

#include "subriemann/modulus.hpp"
#include "subriemann/point.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <ostream>
#include <string>
#include <vector>

namespace subriemann {

using Evaluator = std::function<double(const Point&)>;

struct ScalarField {
    Evaluator f;
    // One slot per chart coordinate (x^1..x^n, y); an empty slot means no analytic partial.
    std::vector<Evaluator> partials;
    std::string modulus_tag;

    ScalarField() = default;
    ScalarField(Evaluator value, std::vector<Evaluator> d = {}, std::string tag = {})
        : f(std::move(value)), partials(std::move(d)), modulus_tag(std::move(tag)) {}

    static ScalarField constant(double c, int dim);
    // z_k as a field, with exact partials.
    static ScalarField coordinate(int k, int dim);

    double operator()(const Point& p) const { return f(p); }
    bool has_partial(int k) const;
    double partial(int k, const Point& p) const;
};

// eta = a0 dy + sum a_i dx^i
struct OneForm {
    ScalarField a0;
    std::vector<ScalarField> a;

    int n() const { return static_cast<int>(a.size()); }
    // Coefficients in chart order (a_1, ..., a_n, a0).
    Vec coefficients(const Point& p) const;
    double apply(const Point& p, const Vec& v) const { return coefficients(p).dot(v); }
};

// beta = sum_{i<j} c_ij dz^i ^ dz^j over chart coordinates, y last.
struct TwoForm {
    int dim = 0;
    std::vector<ScalarField> c;

    static TwoForm zero(int dim);
    static int index(int i, int j, int dim);
    ScalarField& at(int i, int j) { return c[index(i, j, dim)]; }
    const ScalarField& at(int i, int j) const { return c[index(i, j, dim)]; }
    // Skew matrix M with beta(u, v) = u^T M v.
    Mat matrix(const Point& p) const;
    double apply(const Point& p, const Vec& u, const Vec& v) const { return u.dot(matrix(p) * v); }
};

struct Certification {
    bool certified = false;
    bool exact = false;  // residuals at roundoff on every mesh; order is then undefined
    double mesh_h = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    double order = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> h;
    std::vector<double> residuals;
};

struct CEDPair {
    OneForm eta;
    TwoForm deta;
    DomainBox domain;
    Certification certification;

    int n() const { return eta.n(); }
};

enum class Grading { Uniform, Endpoint };

// Parameter map u -> s on [0,1]. Endpoint grading s = u - sin(2 pi u)/(2 pi) has
// vanishing derivative at both ends, which keeps midpoint sums second order when the
// integrand has a square-root or logarithmic singularity at an endpoint.
double grade(double u, Grading g);

using CurveMap = std::function<Point(double)>;
using CellMap = std::function<Point(double, double)>;

// Sampled 1-cell.
struct Curve {
    std::vector<Point> samples;
};

struct Edge {
    CurveMap map;
    int orientation = 1;
    int mesh = 16;
};

struct Chain1 {
    std::vector<Edge> edges;
};

struct Cell2 {
    CellMap map;
    int orientation = 1;
    int mesh = 16;
};

struct Chain2 {
    std::vector<Cell2> cells;
};

struct QuadratureOptions {
    Grading grading = Grading::Endpoint;
};

double eval_form(const CEDPair& pair, const Point& p, const Vec& v);

Curve sample(const Edge& e, Grading g = Grading::Endpoint);
Curve reversed(const Curve& c);

double integrate_curve(const OneForm& form, const Curve& curve);
double integrate_chain1(const OneForm& form, const Chain1& chain, const QuadratureOptions& q = {});
double integrate_chain2(const TwoForm& form, const Chain2& chain, const QuadratureOptions& q = {});

Chain1 boundary(const Chain2& chain);
Chain2 reversed(const Chain2& chain);
Chain2 concat(const Chain2& a, const Chain2& b);

// Formal comparison of two 1-chains through their integrals against polynomial test forms.
bool same_cycle(const Chain1& a, const Chain1& b, double tol);
bool is_closed(const Chain1& c, double tol);

double stokes_residual(const CEDPair& pair, const Chain1& cycle, const Chain2& filling,
                       const QuadratureOptions& q = {});

// d of a one-form from its analytic partials; throws PreconditionError when a needed partial is missing.
TwoForm exterior_derivative(const OneForm& eta);

// Density of eta ^ d eta against dx^1 ^ ... ^ dx^n ^ dy (n = 2).
double wedge_density(const OneForm& eta, const TwoForm& deta, const Point& p);

// --- certification --------------------------------------------------------------

struct CertifyOptions {
    int chains = 50;
    int base_mesh = 32;
    int refinements = 3;
    std::uint64_t seed = 20240601;
    Grading grading = Grading::Endpoint;
    // Fraction of chains with an edge on a natural face of the domain.
    double face_fraction = 0.3;
    // Residuals at or below this are treated as roundoff.
    double roundoff = 1e-13;
};

struct StokesStudy {
    std::vector<int> meshes;
    std::vector<double> h;
    std::vector<double> max_residual;
    std::vector<std::vector<double>> residuals;  // [mesh][chain]
    double order = std::numeric_limits<double>::quiet_NaN();
    bool exact = false;
};

// Random smooth 2-cells inside the domain; some touch natural faces along an edge.
Chain2 random_cell(const DomainBox& domain, std::mt19937_64& rng, bool touch_face);
std::vector<Chain2> certification_suite(const DomainBox& domain, const CertifyOptions& opt);
StokesStudy stokes_study(const CEDPair& pair, const std::vector<Chain2>& suite, const CertifyOptions& opt);
Certification certify(const CEDPair& pair, const CertifyOptions& opt = {});
double fitted_order(const std::vector<double>& h, const std::vector<double>& r);

// --- mollification, d^2, norms, pasting ------------------------------------------

struct MollifyOptions {
    int stencil = 17;
    bool certify = true;
    CertifyOptions certify_options{4, 8, 2};
};

CEDPair mollify(const OneForm& form, const DomainBox& domain, double scale, const MollifyOptions& opt = {});

struct DdReport {
    double max_abs = 0.0;
    std::vector<double> values;
};

// Closed 2-chains: boundaries of curved 3-cells and sphere-like six-patch surfaces.
std::vector<Chain2> random_closed_chains(const DomainBox& domain, int count, int mesh, std::uint64_t seed);
Chain2 cube_boundary(const std::function<Point(double, double, double)>& F, int mesh);
DdReport check_dd_zero(const CEDPair& pair, const std::vector<Chain2>& closed, const QuadratureOptions& q = {});

double d_norm(const CEDPair& pair, int grid_per_axis);

struct PastePiece {
    CEDPair pair;
    ScalarField bump;
};

CEDPair paste(const std::vector<PastePiece>& pieces, const DomainBox& domain, int check_grid = 9,
              std::optional<CertifyOptions> recertify = CertifyOptions{});

CEDPair scaled(const CEDPair& pair, double s);

// CSV rows: cell id, s, t, x1..xn, y
void write_chain_csv(std::ostream& os, const Chain2& chain, Grading g = Grading::Endpoint);
void write_curve_csv(std::ostream& os, const std::vector<Curve>& curves);

}  // namespace subriemann

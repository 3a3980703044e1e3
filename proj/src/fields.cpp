#include "subriemann/fields.hpp"

#include "subriemann/errors.hpp"
#include "subriemann/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace subriemann {

// --- scalar fields and forms ------------------------------------------------------

ScalarField ScalarField::constant(double c, int dim) {
    std::vector<Evaluator> d(dim, [](const Point&) { return 0.0; });
    return ScalarField([c](const Point&) { return c; }, std::move(d));
}

ScalarField ScalarField::coordinate(int k, int dim) {
    std::vector<Evaluator> d;
    for (int j = 0; j < dim; ++j) {
        double v = (j == k) ? 1.0 : 0.0;
        d.push_back([v](const Point&) { return v; });
    }
    return ScalarField([k](const Point& p) { return p.z[k]; }, std::move(d));
}

bool ScalarField::has_partial(int k) const {
    return k >= 0 && k < static_cast<int>(partials.size()) && static_cast<bool>(partials[k]);
}

double ScalarField::partial(int k, const Point& p) const {
    if (!has_partial(k)) throw PreconditionError("analytic partial " + std::to_string(k) + " not available");
    return partials[k](p);
}

Vec OneForm::coefficients(const Point& p) const {
    Vec c(n() + 1);
    for (int i = 0; i < n(); ++i) c[i] = a[i](p);
    c[n()] = a0(p);
    return c;
}

TwoForm TwoForm::zero(int dim) {
    TwoForm t;
    t.dim = dim;
    t.c.assign(dim * (dim - 1) / 2, ScalarField::constant(0.0, dim));
    return t;
}

int TwoForm::index(int i, int j, int dim) {
    if (i > j) std::swap(i, j);
    return i * (2 * dim - i - 1) / 2 + (j - i - 1);
}

Mat TwoForm::matrix(const Point& p) const {
    Mat m = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            double v = c[index(i, j, dim)](p);
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

double eval_form(const CEDPair& pair, const Point& p, const Vec& v) {
    if (!pair.domain.contains(p)) throw DomainError("point " + p.str() + " outside domain " + pair.domain.str());
    return pair.eta.apply(p, v);
}

TwoForm exterior_derivative(const OneForm& eta) {
    int dim = eta.n() + 1;
    std::vector<ScalarField> A(eta.a);
    A.push_back(eta.a0);
    TwoForm d;
    d.dim = dim;
    d.c.resize(dim * (dim - 1) / 2);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            if (!A[j].has_partial(i) || !A[i].has_partial(j))
                throw PreconditionError("exterior derivative needs partials d" + std::to_string(i) + "A" +
                                        std::to_string(j) + " and d" + std::to_string(j) + "A" + std::to_string(i));
            Evaluator dij = A[j].partials[i];
            Evaluator dji = A[i].partials[j];
            d.at(i, j) = ScalarField([dij, dji](const Point& p) { return dij(p) - dji(p); });
        }
    return d;
}

double wedge_density(const OneForm& eta, const TwoForm& deta, const Point& p) {
    if (eta.n() != 2) throw PreconditionError("wedge density is defined for n = 2");
    Vec A = eta.coefficients(p);
    Mat M = deta.matrix(p);
    return A[0] * M(1, 2) - A[1] * M(0, 2) + A[2] * M(0, 1);
}

// --- quadrature -------------------------------------------------------------------

double grade(double u, Grading g) {
    if (g == Grading::Uniform) return u;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u - std::sin(2.0 * std::numbers::pi * u) / (2.0 * std::numbers::pi);
}

Curve sample(const Edge& e, Grading g) {
    Curve c;
    int N = std::max(1, e.mesh);
    c.samples.reserve(N + 1);
    for (int k = 0; k <= N; ++k) c.samples.push_back(e.map(grade(static_cast<double>(k) / N, g)));
    if (e.orientation < 0) std::reverse(c.samples.begin(), c.samples.end());
    return c;
}

Curve reversed(const Curve& c) {
    Curve r = c;
    std::reverse(r.samples.begin(), r.samples.end());
    return r;
}

double integrate_curve(const OneForm& form, const Curve& curve) {
    if (curve.samples.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < curve.samples.size(); ++k) {
        const Vec& a = curve.samples[k].z;
        const Vec& b = curve.samples[k + 1].z;
        Point mid(Vec((a + b) / 2));
        sum += form.apply(mid, b - a);
    }
    return sum;
}

double integrate_chain1(const OneForm& form, const Chain1& chain, const QuadratureOptions& q) {
    double sum = 0.0;
    for (const auto& e : chain.edges) sum += integrate_curve(form, sample(e, q.grading));
    return sum;
}

namespace {

double integrate_cell(const TwoForm& form, const Cell2& cell, Grading g) {
    const int N = std::max(1, cell.mesh);
    std::vector<double> node(N + 1), mid(N);
    for (int k = 0; k <= N; ++k) node[k] = grade(static_cast<double>(k) / N, g);
    for (int k = 0; k < N; ++k) mid[k] = grade((k + 0.5) / N, g);

    std::vector<std::vector<Vec>> cols(N, std::vector<Vec>(N + 1));
    for (int k = 0; k < N; ++k)
        for (int l = 0; l <= N; ++l) cols[k][l] = cell.map(mid[k], node[l]).z;

    double sum = 0.0;
    std::vector<Vec> row(N + 1);
    for (int l = 0; l < N; ++l) {
        for (int k = 0; k <= N; ++k) row[k] = cell.map(node[k], mid[l]).z;
        double line = 0.0;
        for (int k = 0; k < N; ++k) {
            Point c = cell.map(mid[k], mid[l]);
            line += form.apply(c, row[k + 1] - row[k], cols[k][l + 1] - cols[k][l]);
        }
        sum += line;
    }
    return cell.orientation * sum;
}

}  // namespace

double integrate_chain2(const TwoForm& form, const Chain2& chain, const QuadratureOptions& q) {
    std::vector<double> parts(chain.cells.size(), 0.0);
    if (chain.cells.size() > 1)
        parallel_for(static_cast<int>(chain.cells.size()),
                     [&](int i) { parts[i] = integrate_cell(form, chain.cells[i], q.grading); });
    else if (chain.cells.size() == 1)
        parts[0] = integrate_cell(form, chain.cells[0], q.grading);
    double sum = 0.0;
    for (double v : parts) sum += v;
    return sum;
}

Chain1 boundary(const Chain2& chain) {
    Chain1 out;
    for (const auto& cell : chain.cells) {
        CellMap F = cell.map;
        int o = cell.orientation;
        int N = cell.mesh;
        out.edges.push_back({[F](double s) { return F(s, 0.0); }, o, N});
        out.edges.push_back({[F](double t) { return F(1.0, t); }, o, N});
        out.edges.push_back({[F](double s) { return F(s, 1.0); }, -o, N});
        out.edges.push_back({[F](double t) { return F(0.0, t); }, -o, N});
    }
    return out;
}

Chain2 reversed(const Chain2& chain) {
    Chain2 r = chain;
    for (auto& c : r.cells) c.orientation = -c.orientation;
    return r;
}

Chain2 concat(const Chain2& a, const Chain2& b) {
    Chain2 r = a;
    r.cells.insert(r.cells.end(), b.cells.begin(), b.cells.end());
    return r;
}

namespace {

// Integrals of z_k dz_l (matrix) and dz_l (vector) over a 1-chain, plus a length scale.
struct TestIntegrals {
    Mat I;
    Vec J;
    double scale = 0.0;
};

TestIntegrals test_integrals(const Chain1& c, int dim) {
    TestIntegrals t{Mat::Zero(dim, dim), Vec::Zero(dim), 0.0};
    for (const auto& e : c.edges) {
        Curve s = sample(e, Grading::Endpoint);
        for (std::size_t k = 0; k + 1 < s.samples.size(); ++k) {
            const Vec& a = s.samples[k].z;
            const Vec& b = s.samples[k + 1].z;
            Vec d = b - a;
            Vec m = (a + b) / 2;
            t.I += m * d.transpose();
            t.J += d;
            t.scale = std::max(t.scale, std::max(a.cwiseAbs().maxCoeff(), 1.0) * d.norm());
            t.scale += d.norm();
        }
    }
    return t;
}

int chain_dim(const Chain1& c) {
    for (const auto& e : c.edges) return e.map(0.0).dim();
    return 0;
}

}  // namespace

bool same_cycle(const Chain1& a, const Chain1& b, double tol) {
    int dim = std::max(chain_dim(a), chain_dim(b));
    if (dim == 0) return true;
    TestIntegrals ta = test_integrals(a, dim), tb = test_integrals(b, dim);
    double scale = 1.0 + ta.scale + tb.scale;
    return (ta.I - tb.I).cwiseAbs().maxCoeff() <= tol * scale * scale &&
           (ta.J - tb.J).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_closed(const Chain1& c, double tol) {
    int dim = chain_dim(c);
    if (dim == 0) return true;
    TestIntegrals t = test_integrals(c, dim);
    double scale = 1.0 + t.scale;
    Mat sym = t.I + t.I.transpose();
    return t.J.cwiseAbs().maxCoeff() <= tol * scale && sym.cwiseAbs().maxCoeff() <= tol * scale * scale;
}

double stokes_residual(const CEDPair& pair, const Chain1& cycle, const Chain2& filling, const QuadratureOptions& q) {
    Chain1 bd = boundary(filling);
    if (!same_cycle(cycle, bd, 1e-9)) throw BoundaryMismatchError("cycle is not the boundary of the filling");
    double lhs = integrate_chain1(pair.eta, cycle, q);
    double rhs = integrate_chain2(pair.deta, filling, q);
    return std::fabs(lhs - rhs);
}

// --- certification ------------------------------------------------------------------

namespace {

bool inside_grid(const DomainBox& d, const CellMap& F, double margin_frac, bool allow_natural_contact) {
    const int G = 9;
    Vec w = d.hi - d.lo;
    for (int a = 0; a <= G; ++a)
        for (int b = 0; b <= G; ++b) {
            Point p = F(static_cast<double>(a) / G, static_cast<double>(b) / G);
            for (int k = 0; k < d.dim(); ++k) {
                double lo_margin = (allow_natural_contact && d.natural_lo[k]) ? 0.0
                                   : d.natural_lo[k]                        ? 0.1 * w[k]
                                                                            : margin_frac * w[k];
                double hi_margin = (allow_natural_contact && d.natural_hi[k]) ? 0.0
                                   : d.natural_hi[k]                        ? 0.1 * w[k]
                                                                            : margin_frac * w[k];
                if (p.z[k] < d.lo[k] + lo_margin || p.z[k] > d.hi[k] - hi_margin) return false;
            }
        }
    return true;
}

Vec random_vec(std::mt19937_64& rng, const Vec& scale) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec v(scale.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = U(rng) * scale[k];
    return v;
}

}  // namespace

Chain2 random_cell(const DomainBox& domain, std::mt19937_64& rng, bool touch_face) {
    const int dim = domain.dim();
    Vec w = domain.hi - domain.lo;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int face = -1;
    if (touch_face)
        for (int k = 0; k < dim; ++k)
            if (domain.natural_lo[k]) {
                face = k;
                break;
            }
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec c(dim);
        for (int k = 0; k < dim; ++k) c[k] = domain.lo[k] + (0.3 + 0.4 * U(rng)) * w[k];
        Vec u = random_vec(rng, 0.2 * w), v = random_vec(rng, 0.2 * w);
        Vec k1 = random_vec(rng, 0.06 * w), k2 = random_vec(rng, 0.06 * w), k3 = random_vec(rng, 0.06 * w);
        CellMap F;
        if (face >= 0) {
            double len = (0.15 + 0.2 * U(rng)) * w[face];
            double tilt = 0.3 * (2.0 * U(rng) - 1.0);
            double lo = domain.lo[face];
            F = [=](double s, double t) {
                Vec z = c + (s - 0.5) * u + (t - 0.5) * v + (s - 0.5) * (t - 0.5) * k1 +
                        std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * t) * k2 +
                        ((t - 0.5) * (t - 0.5) - 1.0 / 12.0) * k3;
                z[face] = lo + s * len * (1.0 + tilt * t);
                return Point(z);
            };
        } else {
            F = [=](double s, double t) {
                Vec z = c + (s - 0.5) * u + (t - 0.5) * v + (s - 0.5) * (t - 0.5) * k1 +
                        std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * t) * k2 +
                        ((s - 0.5) * (s - 0.5) - 1.0 / 12.0) * k3;
                return Point(z);
            };
        }
        // reject nearly degenerate cells
        Point a = F(0, 0), b = F(1, 0), d = F(0, 1);
        Vec e1 = b.z - a.z, e2 = d.z - a.z;
        double area = std::sqrt(std::max(0.0, e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2)));
        if (area < 0.01 * w.squaredNorm() / dim) continue;
        if (!inside_grid(domain, F, 0.02, face >= 0)) continue;
        Chain2 ch;
        ch.cells.push_back({F, 1, 16});
        return ch;
    }
    throw PreconditionError("could not place a random cell in domain " + domain.str());
}

std::vector<Chain2> certification_suite(const DomainBox& domain, const CertifyOptions& opt) {
    bool has_face = false;
    for (int k = 0; k < domain.dim(); ++k) has_face = has_face || domain.natural_lo[k];
    int touching = has_face ? static_cast<int>(std::lround(opt.face_fraction * opt.chains)) : 0;
    std::vector<Chain2> suite;
    for (int c = 0; c < opt.chains; ++c) {
        auto rng = make_rng(opt.seed, static_cast<std::uint64_t>(c));
        suite.push_back(random_cell(domain, rng, c < touching));
    }
    return suite;
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!(r[k] > 0)) continue;
        double x = std::log(h[k]), y = std::log(r[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

StokesStudy stokes_study(const CEDPair& pair, const std::vector<Chain2>& suite, const CertifyOptions& opt) {
    StokesStudy st;
    QuadratureOptions q{opt.grading};
    for (int r = 0; r <= opt.refinements; ++r) {
        int N = opt.base_mesh << r;
        st.meshes.push_back(N);
        st.h.push_back(1.0 / N);
        std::vector<double> res(suite.size());
        parallel_for(static_cast<int>(suite.size()), [&](int c) {
            Chain2 ch = suite[c];
            for (auto& cell : ch.cells) cell.mesh = N;
            Chain1 bd = boundary(ch);
            double lhs = integrate_chain1(pair.eta, bd, q);
            double rhs = 0.0;
            for (const auto& cell : ch.cells) {
                Chain2 one;
                one.cells.push_back(cell);
                rhs += integrate_chain2(pair.deta, one, q);
            }
            res[c] = std::fabs(lhs - rhs);
        });
        st.residuals.push_back(res);
        st.max_residual.push_back(res.empty() ? 0.0 : *std::max_element(res.begin(), res.end()));
    }
    std::vector<double> h, r;
    for (std::size_t k = 0; k < st.h.size(); ++k)
        if (st.max_residual[k] > opt.roundoff) {
            h.push_back(st.h[k]);
            r.push_back(st.max_residual[k]);
        }
    if (h.size() < 2 && (st.max_residual.empty() || st.max_residual.back() <= opt.roundoff ||
                         st.max_residual.front() <= opt.roundoff)) {
        st.exact = h.empty();
        if (h.size() == 1) {
            // Dropped to roundoff after one refinement: faster than any algebraic order.
            st.order = std::numeric_limits<double>::infinity();
        }
    } else {
        st.order = fitted_order(h, r);
    }
    return st;
}

Certification certify(const CEDPair& pair, const CertifyOptions& opt) {
    auto suite = certification_suite(pair.domain, opt);
    StokesStudy st = stokes_study(pair, suite, opt);
    Certification c;
    c.exact = st.exact;
    c.order = st.order;
    c.mesh_h = st.h.back();
    c.residual = st.max_residual.back();
    c.h = st.h;
    c.residuals = st.max_residual;
    c.certified = st.exact || st.order >= 1.9;
    return c;
}

// --- mollification ----------------------------------------------------------------

namespace {

struct Stencil {
    std::vector<double> t, w, dw;  // nodes, value weights, derivative weights (without 1/scale)
};

Stencil make_stencil(int m) {
    Stencil s;
    double Z = 0.0;
    for (int a = 0; a < m; ++a) {
        double t = -1.0 + (2.0 * a + 1.0) / m;
        s.t.push_back(t);
        double psi = std::pow(1.0 - t * t, 4);
        s.w.push_back(psi);
        s.dw.push_back(-8.0 * t * std::pow(1.0 - t * t, 3));
        Z += psi;
    }
    for (int a = 0; a < m; ++a) {
        s.w[a] /= Z;
        s.dw[a] /= Z;
    }
    return s;
}

// sum over the tensor stencil of weight * f(p - scale * t); deriv < 0 means value weights only.
double convolve(const Evaluator& f, const Point& p, double scale, const Stencil& st, int deriv) {
    const int dim = p.dim();
    const int m = static_cast<int>(st.t.size());
    std::vector<int> idx(dim, 0);
    double sum = 0.0;
    Point q = p;
    while (true) {
        double weight = 1.0;
        for (int k = 0; k < dim; ++k) {
            weight *= (k == deriv) ? st.dw[idx[k]] / scale : st.w[idx[k]];
            q.z[k] = p.z[k] - scale * st.t[idx[k]];
        }
        sum += weight * f(q);
        int k = 0;
        while (k < dim && ++idx[k] == m) idx[k++] = 0;
        if (k == dim) break;
    }
    return sum;
}

}  // namespace

CEDPair mollify(const OneForm& form, const DomainBox& domain, double scale, const MollifyOptions& opt) {
    if (!(scale > 0)) throw PreconditionError("mollification scale must be positive");
    double reach = scale * (1.0 - 1.0 / opt.stencil);
    Vec w = domain.hi - domain.lo;
    if (2.0 * reach >= w.minCoeff()) throw PreconditionError("mollification scale exceeds the domain margin");
    auto st = std::make_shared<Stencil>(make_stencil(opt.stencil));
    const int dim = form.n() + 1;

    auto smooth = [&](const ScalarField& a) {
        Evaluator f = a.f;
        ScalarField out([f, scale, st](const Point& p) { return convolve(f, p, scale, *st, -1); });
        for (int k = 0; k < dim; ++k)
            out.partials.push_back([f, scale, st, k](const Point& p) { return convolve(f, p, scale, *st, k); });
        return out;
    };

    CEDPair out;
    out.eta.a0 = smooth(form.a0);
    for (const auto& a : form.a) out.eta.a.push_back(smooth(a));
    out.deta = exterior_derivative(out.eta);
    out.domain = DomainBox(Vec(domain.lo.array() + reach), Vec(domain.hi.array() - reach));
    if (opt.certify) out.certification = certify(out, opt.certify_options);
    return out;
}

// --- d^2 = 0 ------------------------------------------------------------------------

Chain2 cube_boundary(const std::function<Point(double, double, double)>& F, int mesh) {
    Chain2 ch;
    ch.cells.push_back({[F](double a, double b) { return F(1, a, b); }, +1, mesh});
    ch.cells.push_back({[F](double a, double b) { return F(0, a, b); }, -1, mesh});
    ch.cells.push_back({[F](double a, double b) { return F(a, 1, b); }, -1, mesh});
    ch.cells.push_back({[F](double a, double b) { return F(a, 0, b); }, +1, mesh});
    ch.cells.push_back({[F](double a, double b) { return F(a, b, 1); }, +1, mesh});
    ch.cells.push_back({[F](double a, double b) { return F(a, b, 0); }, -1, mesh});
    return ch;
}

std::vector<Chain2> random_closed_chains(const DomainBox& domain, int count, int mesh, std::uint64_t seed) {
    const int dim = domain.dim();
    if (dim != 3) throw PreconditionError("closed test chains are built for dimension 3");
    Vec w = domain.hi - domain.lo;
    std::vector<Chain2> out;
    for (int c = 0; c < count; ++c) {
        auto rng = make_rng(seed, static_cast<std::uint64_t>(c));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000) throw PreconditionError("could not place a closed chain in " + domain.str());
            Vec ctr(dim);
            for (int k = 0; k < dim; ++k) ctr[k] = domain.lo[k] + (0.35 + 0.3 * U(rng)) * w[k];
            std::function<Point(double, double, double)> F;
            if (c % 2 == 0) {
                Mat A(dim, dim);
                for (int k = 0; k < dim; ++k) A.col(k) = random_vec(rng, 0.18 * w);
                if (std::fabs(A.determinant()) < 1e-3 * w.prod()) continue;
                Vec k1 = random_vec(rng, 0.05 * w), k2 = random_vec(rng, 0.05 * w);
                F = [=](double s, double t, double r) {
                    Vec v(3);
                    v << s - 0.5, t - 0.5, r - 0.5;
                    return Point(Vec(ctr + A * v + v[0] * v[1] * k1 +
                                     std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * r) * k2));
                };
            } else {
                Vec R = (0.1 + 0.1 * U(rng)) * w;
                F = [=](double s, double t, double r) {
                    Vec v(3);
                    v << 2 * s - 1, 2 * t - 1, 2 * r - 1;
                    double n2 = v.norm();
                    Vec dir = n2 > 0 ? Vec(v * (v.cwiseAbs().maxCoeff() / n2)) : v;
                    return Point(Vec(ctr + R.cwiseProduct(dir)));
                };
            }
            bool ok = true;
            for (int a = 0; a <= 4 && ok; ++a)
                for (int b = 0; b <= 4 && ok; ++b)
                    for (int e = 0; e <= 4 && ok; ++e) {
                        Point p = F(a / 4.0, b / 4.0, e / 4.0);
                        for (int k = 0; k < dim; ++k) {
                            double m = domain.natural_lo[k] ? 0.1 * w[k] : 0.02 * w[k];
                            if (p.z[k] < domain.lo[k] + m || p.z[k] > domain.hi[k] - 0.02 * w[k]) ok = false;
                        }
                    }
            if (!ok) continue;
            out.push_back(cube_boundary(F, mesh));
            break;
        }
    }
    return out;
}

DdReport check_dd_zero(const CEDPair& pair, const std::vector<Chain2>& closed, const QuadratureOptions& q) {
    DdReport rep;
    for (const auto& ch : closed) {
        if (!is_closed(boundary(ch), 1e-9) || !same_cycle(boundary(ch), Chain1{}, 1e-9))
            throw PreconditionError("chain passed to check_dd_zero is not closed");
        double v = integrate_chain2(pair.deta, ch, q);
        rep.values.push_back(v);
        rep.max_abs = std::max(rep.max_abs, std::fabs(v));
    }
    return rep;
}

// --- norms, pasting -----------------------------------------------------------------

namespace {

template <class F>
void for_grid(const DomainBox& d, int G, F&& body) {
    const int dim = d.dim();
    std::vector<int> idx(dim, 0);
    Point p(Vec(d.lo));
    while (true) {
        for (int k = 0; k < dim; ++k) p.z[k] = d.lo[k] + (d.hi[k] - d.lo[k]) * idx[k] / std::max(1, G - 1);
        body(p);
        int k = 0;
        while (k < dim && ++idx[k] == G) idx[k++] = 0;
        if (k == dim) break;
    }
}

}  // namespace

double d_norm(const CEDPair& pair, int grid_per_axis) {
    double eta_sup = 0.0, deta_sup = 0.0;
    for_grid(pair.domain, grid_per_axis, [&](const Point& p) {
        eta_sup = std::max(eta_sup, pair.eta.coefficients(p).norm());
        Mat M = pair.deta.matrix(p);
        Eigen::JacobiSVD<Mat> svd(M);
        deta_sup = std::max(deta_sup, svd.singularValues()[0]);
    });
    return std::max(eta_sup, deta_sup);
}

CEDPair paste(const std::vector<PastePiece>& pieces, const DomainBox& domain, int check_grid,
              std::optional<CertifyOptions> recertify) {
    if (pieces.empty()) throw PreconditionError("paste needs at least one piece");
    const int n = pieces.front().pair.n();
    const int dim = n + 1;
    for (const auto& pc : pieces)
        for (int k = 0; k < dim; ++k)
            if (!pc.bump.has_partial(k)) throw PreconditionError("bump needs an analytic differential");
    for_grid(domain, check_grid, [&](const Point& p) {
        double s = 0.0;
        for (const auto& pc : pieces) s += pc.bump(p);
        if (std::fabs(s - 1.0) > 1e-9) throw PreconditionError("bumps do not sum to 1 at " + p.str());
    });

    auto coeff = [&](int slot) {
        std::vector<ScalarField> A, psi;
        for (const auto& pc : pieces) {
            A.push_back(slot < n ? pc.pair.eta.a[slot] : pc.pair.eta.a0);
            psi.push_back(pc.bump);
        }
        ScalarField out([A, psi](const Point& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < A.size(); ++i) s += psi[i](p) * A[i](p);
            return s;
        });
        for (int k = 0; k < dim; ++k) {
            bool ok = true;
            for (const auto& a : A) ok = ok && a.has_partial(k);
            if (!ok) {
                out.partials.push_back(nullptr);
                continue;
            }
            out.partials.push_back([A, psi, k](const Point& p) {
                double s = 0.0;
                for (std::size_t i = 0; i < A.size(); ++i)
                    s += psi[i].partial(k, p) * A[i](p) + psi[i](p) * A[i].partial(k, p);
                return s;
            });
        }
        return out;
    };

    CEDPair out;
    out.domain = domain;
    for (int i = 0; i < n; ++i) out.eta.a.push_back(coeff(i));
    out.eta.a0 = coeff(n);
    out.deta.dim = dim;
    out.deta.c.resize(dim * (dim - 1) / 2);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            std::vector<PastePiece> pcs = pieces;
            out.deta.at(i, j) = ScalarField([pcs, i, j, n](const Point& p) {
                double s = 0.0;
                for (const auto& pc : pcs) {
                    const ScalarField& Ai = i < n ? pc.pair.eta.a[i] : pc.pair.eta.a0;
                    const ScalarField& Aj = j < n ? pc.pair.eta.a[j] : pc.pair.eta.a0;
                    s += pc.bump.partial(i, p) * Aj(p) - pc.bump.partial(j, p) * Ai(p);
                    s += pc.bump(p) * pc.pair.deta.at(i, j)(p);
                }
                return s;
            });
        }
    if (recertify) out.certification = certify(out, *recertify);
    return out;
}

CEDPair scaled(const CEDPair& pair, double s) {
    auto scale_field = [s](const ScalarField& a) {
        ScalarField out;
        Evaluator f = a.f;
        out.f = [f, s](const Point& p) { return s * f(p); };
        for (const auto& d : a.partials)
            out.partials.push_back(d ? Evaluator([d, s](const Point& p) { return s * d(p); }) : Evaluator());
        out.modulus_tag = a.modulus_tag;
        return out;
    };
    CEDPair out = pair;
    out.eta.a0 = scale_field(pair.eta.a0);
    for (auto& a : out.eta.a) a = scale_field(a);
    for (auto& c : out.deta.c) c = scale_field(c);
    return out;
}

// --- CSV ------------------------------------------------------------------------------

void write_chain_csv(std::ostream& os, const Chain2& chain, Grading g) {
    if (chain.cells.empty()) return;
    int dim = chain.cells.front().map(0, 0).dim();
    os << "cell,s,t";
    for (int k = 0; k + 1 < dim; ++k) os << ",x" << (k + 1);
    os << ",y\n";
    os.precision(12);
    for (std::size_t c = 0; c < chain.cells.size(); ++c) {
        const auto& cell = chain.cells[c];
        int N = cell.mesh;
        for (int a = 0; a <= N; ++a)
            for (int b = 0; b <= N; ++b) {
                double s = grade(static_cast<double>(a) / N, g), t = grade(static_cast<double>(b) / N, g);
                Point p = cell.map(s, t);
                os << c << "," << s << "," << t;
                for (int k = 0; k < dim; ++k) os << "," << p.z[k];
                os << "\n";
            }
    }
}

void write_curve_csv(std::ostream& os, const std::vector<Curve>& curves) {
    if (curves.empty() || curves.front().samples.empty()) return;
    int dim = curves.front().samples.front().dim();
    os << "cell,s,t";
    for (int k = 0; k + 1 < dim; ++k) os << ",x" << (k + 1);
    os << ",y\n";
    os.precision(12);
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& cv = curves[c];
        std::size_t N = cv.samples.size();
        for (std::size_t k = 0; k < N; ++k) {
            os << c << "," << (N > 1 ? static_cast<double>(k) / (N - 1) : 0.0) << ",0";
            for (int j = 0; j < dim; ++j) os << "," << cv.samples[k].z[j];
            os << "\n";
        }
    }
}

}  // namespace subriemann

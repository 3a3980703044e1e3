#pragma once

#include "subriemann/fields.hpp"
#include "subriemann/modulus.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace subriemann {

enum class MetricKind { Euclidean, FrameOrthonormal };

// X_i = d_i + a_i d_y
struct AdaptedFrame {
    std::vector<ScalarField> a;
    double Ctilde = 1.0;
    Modulus omega;
    DomainBox domain;
    MetricKind metric = MetricKind::Euclidean;

    int n() const { return static_cast<int>(a.size()); }
    Vec X(int i, const Point& p) const;
    // dim x n matrix with columns X_1(p), ..., X_n(p).
    Mat frame(const Point& p) const;
};

struct FrameOptions {
    double a0_bound = 1e-6;
    int grid = 9;
    double tol = 1e-10;
};

AdaptedFrame adapted_frame(const CEDPair& pair, const Modulus& omega, double Ctilde, const FrameOptions& opt = {});

struct CtildeOptions {
    int pairs = 4000;
    std::uint64_t seed = 11;
    double inflation = 1.5;
};

// 1.5 x the largest sampled |a_i(p) - a_i(q)| / omega(|p - q|), at least 1.
double estimate_ctilde(const AdaptedFrame& frame, const DomainBox& domain, const CtildeOptions& opt = {});

double nonintegrability(const CEDPair& pair, const Point& p);

// d eta_p(X_i(p), X_j(p))
double deta_frame(const CEDPair& pair, const AdaptedFrame& frame, int i, int j, const Point& p);

// Coefficient of d_y in [X_i, X_j](p) = d eta(X_j, X_i) / a0.
double lie_bracket(const CEDPair& pair, const AdaptedFrame& frame, int i, int j, const Point& p);

// Per-point values behind the sampled extrema.
struct PointNorms {
    double eta_dy = 0.0;
    double m_deta = 0.0;      // min over unit simple bivectors of Delta_q
    double deta_delta = 0.0;  // max over unit simple bivectors of Delta_q
    double deta = 0.0;        // comass of d eta_q
    double eta = 0.0;
    double X_min = 0.0, X_max = 0.0;
    double wedge2_min = 0.0, wedge2_max = 0.0;
    double wedge_all = 0.0;
    double gram_dg = 1.0;
    Mat pair_values;  // d eta(X_i, X_j)
};

PointNorms point_norms(const CEDPair& pair, const AdaptedFrame& frame, const Point& p);

struct DomainConstants {
    DomainBox domain;
    int grid_per_axis = 0;
    int grid_points = 0;

    double eta_dy_inf = 0, eta_dy_sup = 0;
    double m_deta_inf = 0, deta_delta_sup = 0, deta_sup = 0, eta_sup = 0;
    double X_inf = 0, X_sup = 0;
    double wedge2_inf = 0, wedge2_sup = 0;
    double wedge_all_inf = 0, wedge_all_sup = 0;
    double d_g = 1.0;

    int witness_i = -1, witness_j = -1;
    double witness_inf = 0;  // inf |d eta(X_i, X_j)| over the grid
    double witness_sup = 0;
    int witness_sign = 0;
    double max_pair_abs = 0;  // largest |d eta(X_i, X_j)| seen, for diagnostics

    double Ctilde = 1.0;
    std::string omega;
    double cell_diameter = 0;
    double omega_margin = 0;  // Ctilde * omega(cell diameter)

    double gromov_c = 0.5;
    double gromov_delta = std::numeric_limits<double>::infinity();
    double eps0 = std::numeric_limits<double>::quiet_NaN();
    std::string eps0_status = "not computed";
    double K1 = 0, K2 = 0;

    int n = 2;
};

DomainConstants estimate_constants(const CEDPair& pair, const AdaptedFrame& frame, const DomainBox& domain,
                                   int grid_per_axis = 11, bool require_witness = true);

struct FixOptions {
    int grid_per_axis = 11;
    double floor_fraction = 1e-6;
};

struct FixResult {
    DomainBox U;
    DomainConstants constants;
    double r = 0;
    std::map<std::string, bool> checks;
    std::map<std::string, double> slack;
};

// Conditions on U (non-involutivity, norm bounds) with omega inflation; throws DegenerateBundleError.
std::map<std::string, bool> domain_checks(const DomainConstants& k, std::map<std::string, double>* slack = nullptr);
// remaininside1, estimate1 and estimate3 for a given U, base point and eps0. Natural faces of U
// do not count as boundary for remaininside1.
std::map<std::string, bool> eps0_checks(const DomainConstants& k, const Modulus& omega, const DomainBox& U,
                                        const Point& p0, double eps0, std::map<std::string, double>* slack = nullptr);
double estimate1_lhs(const DomainConstants& k, const Modulus& omega, double eps0);
double remaininside_reach(const DomainConstants& k, double eps0);

FixResult fix_domain(const CEDPair& pair, const AdaptedFrame& frame, const Point& p0, const FixOptions& opt = {});

// Re-evaluates every stored inequality on a refined grid.
std::map<std::string, bool> recheck_fix(const CEDPair& pair, const AdaptedFrame& frame, const FixResult& fix,
                                        const Point& p0, int grid_factor = 2);

double K1_of(double m_deta_inf, double eta_dy_sup);
double K2_of(int n, double gromov_c, double deta_delta_sup, double eta_dy_inf);

}  // namespace subriemann

#pragma once

#include "subriemann/bundle.hpp"
#include "subriemann/flows.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subriemann {

struct LoopOrientation {
    int si = 1;
    int sj = 1;
};

// kappa_1 = e^{s si X_i}(q1), kappa_2 = e^{s sj X_j}, kappa_3 = e^{-s si X_i}, kappa_4 = e^{-s sj X_j}
AdmissiblePath loop_path(const AdaptedFrame& frame, const Point& q1, double eps_tilde, int i, int j,
                         LoopOrientation o = {}, double h = 1e-3, const FlowOptions& opt = {});
Point loop_endpoint(const AdaptedFrame& frame, const Point& q1, double eps_tilde, int i, int j,
                    LoopOrientation o = {}, double h = 1e-3, const FlowOptions& opt = {});

// Sign of the vertical displacement of a small loop with orientation o, from the bracket at q1.
int predicted_loop_sign(const CEDPair& pair, const AdaptedFrame& frame, const Point& q1, int i, int j,
                        LoopOrientation o);

struct ShootOptions {
    double h = 1e-3;
    double gap_tol = 1e-10;
    int max_iter = 60;
    // Displacement reachable at eps_max according to the endpoint estimate; targets beyond it are rejected.
    std::optional<double> guarantee;
    bool keep_samples = false;
    FlowOptions flow;
};

struct ShootResult {
    double eps_tilde = 0.0;
    LoopOrientation orientation;
    AdmissiblePath path;
    int iterations = 0;
    double residual = 0.0;  // |q2.y - target.y|
    std::vector<std::string> skipped;  // orientations rejected because the loop escaped
};

ShootResult shoot_loop(const CEDPair& pair, const AdaptedFrame& frame, const Point& q1, const Point& target,
                       double eps_max, int i, int j, const ShootOptions& opt = {});

struct ConnectResult {
    Point q1;
    AdmissiblePath tau;
    AdmissiblePath gamma;
    AdmissiblePath path;
    double eps_tilde = 0.0;
    double g_length = 0.0;
    double budget = 0.0;
    bool within_budget = false;
};

struct ConnectOptions {
    double h = 1e-3;
    ShootOptions shoot;
};

// psi = gamma o tau: tau runs along W from 0 to the point q1 above x, gamma is the loop from q1 to p.
ConnectResult connect(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k, const Point& p,
                      double eps_budget, const SurfaceW* W = nullptr, const ConnectOptions& opt = {});

// Integral of d eta over {q + s1 X_i(q) + s2 X_j(q) : 0 <= s1, s2 <= eps}.
double parallelogram_integral(const CEDPair& pair, const AdaptedFrame& frame, const Point& q, int i, int j,
                              double eps, int mesh = 32);

// Cone over the length-weighted barycenter of a closed polygon; boundary is the polygon in order.
struct Filling {
    Chain2 chain;
    Point apex;
    double area = 0.0;
    double length = 0.0;
    double max_distance = 0.0;  // max distance from a point of the cone to the polygon
};
Filling gromov_fill(const std::vector<Point>& polygon, int mesh = 16, double closure_tol = 1e-9);

struct Prop22Report {
    Point q, q1, q2;
    double eps1 = 0, eps2 = 0, eps = 0;
    double ell = 0;
    double xi = 0;
    double gap = 0;  // |q1 - q2|
    double int_beta = 0;
    double int_P = 0;
    double int_C1 = 0, int_C2 = 0;
    double c = 0;
    double c_bound = 0;
    double lower = 0, upper = 0;
    double identity_residual = 0;  // |int_beta - (int_P + c)|
    // |int eta over polyline(gamma2) - polyline(gamma1)|: the sliver correction folded into c
    double path_defect = 0;
    int predicted_sign = 0;
    int observed_sign = 0;
    bool c_bound_ok = false;
    bool bracket_ok = false;
    bool sign_ok = false;
    bool pass() const { return c_bound_ok && bracket_ok && sign_ok; }
};

struct Prop22Options {
    int mesh = 128;  // per cone cell of the filling P
    double rel_tol = 1e-6;
    double abs_tol = 1e-11;
};

// gamma1, gamma2 must carry samples (FlowOptions::keep_samples).
Prop22Report verify_prop22(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                           const DomainBox& U, const AdmissiblePath& gamma1, const AdmissiblePath& gamma2,
                           const Prop22Options& opt = {});

// gamma1 = kappa_1^{-1} o kappa_2^{-1} and gamma2 = kappa_3 o kappa_4, both from the loop corner q.
std::pair<AdmissiblePath, AdmissiblePath> loop_halves(const AdaptedFrame& frame, const Point& q1, double eps_tilde,
                                                      int i, int j, LoopOrientation o = {}, double h = 1e-3,
                                                      const FlowOptions& opt = {});

struct PathPair {
    AdmissiblePath gamma1, gamma2;
    std::string kind;  // "loop" or "shuffle"
};

// Two admissible paths from a common start with equal x-displacement: either loop halves or a
// random control sequence and a reordering of it. Euclidean lengths stay below max_length and
// B(start, 2 l) stays inside U (natural faces excepted). Both paths carry samples.
PathPair random_path_pair(const AdaptedFrame& frame, const DomainBox& U, double max_length, std::mt19937_64& rng,
                          bool loop, double h = 1e-3);

}  // namespace subriemann

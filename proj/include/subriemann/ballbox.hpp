#pragma once

#include "subriemann/access.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace subriemann {

struct BoxSpec {
    enum class Kind { Diamond, Hourglass, Box, BWBox };

    Kind kind = Kind::Box;
    // Diamond: |x| + sqrt(K (|x| C omega(2|x|) + |y|)) <= eps
    // Hourglass: |x| <= eps, |y| <= K eps^2 + |x| C omega(2|x|)
    // Box: |x| <= eps, |y| <= K eps^2
    // BWBox: |x| <= eps, |y - W(x)| <= K eps^2
    double K = 1.0;
    double epsilon = 0.0;
    double Ctilde = 1.0;
    Modulus omega;
    std::shared_ptr<const SurfaceW> W;

    static BoxSpec diamond(double K, double eps, double Ctilde, Modulus omega);
    static BoxSpec hourglass(double K, double eps, double Ctilde, Modulus omega);
    static BoxSpec box(double K, double eps);
    static BoxSpec bw_box(double K, double eps, std::shared_ptr<const SurfaceW> W);
    std::string name() const;
};

struct Membership {
    bool member = false;
    double margin = 0.0;  // slack of the binding constraint, negative outside
};

Membership box_membership(const BoxSpec& spec, const Point& p, double tol = 0.0);

// Largest |x| admitted by a diamond and the vertical half-extent at a given |x|.
double diamond_radius(const BoxSpec& diamond);
double diamond_height(const BoxSpec& diamond, double r);

// --- chart straightening W --------------------------------------------------------

// phi(x, y) = (x, y - W(x)); in these coordinates W is the x-plane.
Point c1_forward(const SurfaceW& W, const Point& p);
Point c1_inverse(const SurfaceW& W, const Point& p);

// --- upper estimate from a filling --------------------------------------------------

struct GapEstimate {
    double gap = 0.0;    // |p - q| with q on W above x(p)
    double bound = 0.0;  // (|int_P d eta| + 4 l eps xi |d eta|) / |eta(d_y)|_inf
    double int_P = 0.0;
    double c = 0.0;
    double c_bound = 0.0;
    double fill_length = 0.0;
    bool ok = false;
};

// gamma1 starts at 0 and carries samples; gamma2 is the coordinate-ordered path along W.
GapEstimate upper_gap_estimate(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                               const DomainBox& U, const AdmissiblePath& gamma1, double h = 1e-3);

// --- inclusion chain -------------------------------------------------------------------

struct LowerSample {
    Point target;
    Point reached;
    double g_length = 0.0;
    double eps_tilde = 0.0;
    double tangency = 0.0;
    double diamond_margin = 0.0;
    bool pass = false;
    std::string error;
};

struct UpperSample {
    Point end;
    double g_length = 0.0;
    int segments = 0;
    double margin = 0.0;
    bool inside = false;
};

struct ReachOptions {
    int shells = 20;
    int heights = 20;
    int upper_paths = 10000;
    int max_segments = 20;
    int gap_paths = 0;
    double slack = 0.05;
    double h = 1e-3;
    std::uint64_t seed = 7;
    ConnectOptions connect;
};

struct ReachReport {
    double epsilon = 0.0;
    double slack = 0.05;
    std::uint64_t seed = 0;
    DomainConstants constants;
    double eps_lower = 0.0;  // eps / (4 d_g)
    double eps_upper = 0.0;  // 2 n d_g eps
    double r_max = 0.0;
    bool hypothesis = false;  // eps < eps0 / (2 n d_g)
    double hypothesis_bound = 0.0;
    std::vector<LowerSample> lower;
    std::vector<UpperSample> upper;
    std::vector<GapEstimate> gaps;
    int lower_failures = 0;
    int upper_failures = 0;
    int gap_failures = 0;
    double max_length_ratio = 0.0;  // max g_length / eps over lower samples
    double min_upper_margin = 0.0;
    double max_tangency = 0.0;

    bool pass() const { return lower_failures == 0 && upper_failures == 0 && gap_failures == 0; }
};

// Constants over hull(U, [-2 n d_g eps, 2 n d_g eps]^n x [...]) clipped to the pair's domain.
DomainConstants reach_constants(const CEDPair& pair, const AdaptedFrame& frame, const FixResult& fix, double eps,
                                int grid_per_axis = 11);

ReachReport verify_inclusions(const CEDPair& pair, const AdaptedFrame& frame, const DomainConstants& k,
                              double epsilon, const ReachOptions& opt = {}, const FixResult* fix = nullptr);

// Random admissible path with g-length at most `length` (before rescaling it is close to it).
AdmissiblePath random_admissible_path(const AdaptedFrame& frame, const Point& start, double length, int max_segments,
                                      std::mt19937_64& rng, double h = 1e-3, const FlowOptions& opt = {});

// --- box algebra at the linear modulus ----------------------------------------------------

struct BoxAlgebraReport {
    double K1 = 0, K2 = 0, Ctilde = 1, epsilon = 0;
    int samples = 0;
    int box_in_diamond = 0;
    int hourglass_in_box = 0;
    double min_diamond_margin = 0.0;
    double min_box_margin = 0.0;
    bool pass() const { return box_in_diamond == samples && hourglass_in_box == samples; }
};

// B(0, K1, eps) inside D(0, 1/K1, (1 + sqrt(2C/K1 + 1)) eps) and H(0, K2, eps) inside B(0, K2 + 2C, eps).
BoxAlgebraReport box_algebra(int n, double K1, double K2, double Ctilde, double eps, int samples, std::uint64_t seed);

}  // namespace subriemann

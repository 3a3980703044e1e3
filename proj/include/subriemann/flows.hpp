#pragma once

#include "subriemann/bundle.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace subriemann {

struct FlowSpec {
    int i = 0;
    int sign = 1;
    double t = 0.0;
    double h = 1e-3;
};

enum class Stepper { RK4, RK2 };

struct FlowOptions {
    int min_steps = 50;
    bool keep_samples = false;
    Stepper stepper = Stepper::RK4;
    // Overrides frame.domain as the region the trajectory must stay in.
    std::optional<DomainBox> domain;
    double escape_tol = 1e-12;
};

struct Segment {
    FlowSpec spec;
    Point start;
    Point end;
    double error = 0.0;   // |fine - coarse| Richardson discrepancy
    double length = 0.0;  // Euclidean length
    int steps = 0;
    std::vector<Point> samples;  // fine-grid nodes when kept
};

// Integrates s -> e^{s sign X_i}(q) for s in [0, t]. Only y needs integration: the x-part moves
// along e_i at unit speed. Runs N and 2N steps and returns the fine endpoint.
Segment flow_segment(const AdaptedFrame& frame, const FlowSpec& spec, const Point& q, const FlowOptions& opt = {});
Point flow(const AdaptedFrame& frame, const FlowSpec& spec, const Point& q, const FlowOptions& opt = {});

struct AdmissiblePath {
    Point start;
    std::vector<Segment> segments;
    MetricKind metric = MetricKind::Euclidean;

    Point end() const { return segments.empty() ? start : segments.back().end; }
    double euclidean_length() const;
    double g_length() const;
    double duration() const;
    double error() const;
    std::vector<FlowSpec> specs() const;
    // Polyline through all kept samples (segment endpoints if samples were not kept).
    std::vector<Point> polyline() const;
};

AdmissiblePath run_path(const AdaptedFrame& frame, const Point& start, const std::vector<FlowSpec>& specs,
                        const FlowOptions& opt = {});
AdmissiblePath concat(const AdmissiblePath& first, const AdmissiblePath& second);

// max |eta(gamma')| / |eta| over the stored samples of every segment.
double tangency_defect(const CEDPair& pair, const AdaptedFrame& frame, const AdmissiblePath& path);

// Coordinate-ordered flows e^{t_n X_n} o ... o e^{t_1 X_1}(0).
AdmissiblePath compose_T_path(const AdaptedFrame& frame, const Vec& times, double h = 1e-3,
                              const FlowOptions& opt = {});
Point compose_T(const AdaptedFrame& frame, const Vec& times, double h = 1e-3, const FlowOptions& opt = {});

struct SurfaceW {
    double epsilon = 0.0;
    int n = 2;
    std::vector<std::vector<double>> axes;  // t values per axis
    std::vector<Vec> t;                     // grid parameters, axis 0 fastest
    std::vector<Point> points;              // T_eps(t)
    std::vector<double> error;              // integrator estimate per sample
    double Ctilde = 1.0;
    Modulus omega;

    double max_x_defect = 0.0;      // max |x - t|
    double max_graph_defect = 0.0;  // max |y_h - y_{h/2}|
    bool graph_ok = true;
    double max_bound_ratio = 0.0;   // max |y| / (|x| C omega(2|x|))
    int bound_violations = 0;
    bool bound_ok = true;

    // Multilinear interpolation of y = a(x); throws ExtrapolationError off the grid.
    double height(const Vec& x) const;
    // omega-based uncertainty of height() between samples.
    double band(const Vec& x) const;
    bool covers(const Vec& x) const;
};

struct SurfaceOptions {
    int grid = 41;
    double h = 1e-3;
    double graph_tol = 1e-8;
    FlowOptions flow;
};

// Samples T_eps on a tensor grid over [-eps, eps]^n clipped to the frame's domain.
SurfaceW build_W(const AdaptedFrame& frame, double epsilon, const SurfaceOptions& opt = {});

struct FunnelTrial {
    Stepper stepper = Stepper::RK4;
    int steps = 0;
    double offset = 0.0;
    double endpoint_y = 0.0;
    double estimate = 0.0;
};

struct FunnelReport {
    std::vector<FunnelTrial> trials;
    double spread = 0.0;
    double reference = 0.0;  // max(trial estimates, tolerance floor)
    double ratio = 0.0;
    bool pass = false;
};

struct FunnelOptions {
    int trials = 12;
    double h = 1e-3;
    double tol = 1e-12;
    std::uint64_t seed = 5;
};

FunnelReport funnel_probe(const AdaptedFrame& frame, int k, const Point& q, double T, const FunnelOptions& opt = {});

// Frame with a_1 = sqrt|y| and a_i = 0 otherwise: y' = sqrt|y| along X_1 has non-unique solutions from y = 0.
AdaptedFrame sqrt_control_frame(int n, const DomainBox& domain);

}  // namespace subriemann

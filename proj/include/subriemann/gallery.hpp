#pragma once

#include "subriemann/bundle.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subriemann {

struct GalleryEntry {
    std::string name;
    std::string description;
    CEDPair pair;
    AdaptedFrame frame;
    Modulus omega;
    bool ctilde_estimated = false;
    bool smooth = true;         // coefficients C^1 up to the boundary
    bool noninvolutive = true;  // eta ^ d eta != 0 at the witness point
    Point witness;
    int witness_sign = 0;
    std::string modulus_note;

    // Closed forms where known.
    std::function<double(const Vec&)> W_height;  // y = T(x) on W
    std::optional<double> loop_coefficient;      // loop displacement = coefficient * eps^2 for (+X_1, +X_2)
    std::optional<double> density_at_witness;

    std::vector<std::string> oracles() const;
};

// eta = dy - x1 dx2 on [-1/2, 1/2]^3, linear modulus, C = 1.
GalleryEntry heisenberg();

enum class PaperVariant { Sqrt, Log };

// eta = dy + b dx + c dz with b = sin(y) g(x) z, c = cos(y) e^{(z+2)^{2/3}} x, where
// g(x) = e^{sqrt x} (Sqrt) or 1/log x (Log). Chart (x1, x2, y) = (x, z, y); x >= 0.
GalleryEntry paper_example(PaperVariant v);

// eta = a dy - b dx - c dz for user fields with the partials each slot needs.
GalleryEntry general_abc(const std::string& name, const ScalarField& a, const ScalarField& b, const ScalarField& c,
                         const DomainBox& domain, const Modulus& omega, std::optional<double> Ctilde = std::nullopt);

// eta = df with d eta = 0; df must be supplied through f's partials.
GalleryEntry exact_form(const std::string& name, const ScalarField& f, const DomainBox& domain);
GalleryEntry exact_flat();
GalleryEntry exact_quadratic();

// Two copies of paper:sqrt (the second translated by +0.4 in x2) blended by a smoothstep in x2 over [0.1, 0.3].
GalleryEntry pasted_example();

std::vector<std::string> gallery_names();
// Throws PreconditionError for an unknown name.
GalleryEntry gallery_entry(const std::string& name);

// Sign of eta ^ d eta on a grid, for entries where non-integrability is only guaranteed at some points.
struct DensityScan {
    int points = 0;
    int positive = 0;
    int negative = 0;
    int zero = 0;
    double min = 0.0, max = 0.0;
};
DensityScan density_scan(const GalleryEntry& e, int grid_per_axis = 9);

}  // namespace subriemann

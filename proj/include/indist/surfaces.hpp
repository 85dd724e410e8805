#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "indist/types.hpp"

namespace indist::surf {

/// Gaussian delay model per measured pair (AB, BC, CD): overlap
/// V_ij exp(-dt^2 w^2 / 2) along each axis of the relative-delay space.
struct DelayAxes {
    std::array<double, 3> visibility = {1.0, 1.0, 1.0};
    std::array<double, 3> width = {1.0, 1.0, 1.0};  // > 0
    /// Integration box half-width in units of 1/width per axis.
    double box_halfwidth_sigmas = 4.0;

    void validate() const;  // NonPositiveWidth on bad widths
};

/// Lower bound on genuine four-photon indistinguishability at the given
/// relative delays: r_AB(dt) + r_BC(dt) + r_CD(dt) - 2, not clamped (the
/// sign decides whether the bound is informative).
double c1_lower_at(const std::array<double, 3>& delays, const DelayAxes& axes);

enum class Region { inside, outside };

/// inside iff the c1 lower bound is positive at these delays.
Region classify_configuration(const std::array<double, 3>& delays, const DelayAxes& axes);

enum class VolumeMethod { grid, monte_carlo };

struct VolumeResult {
    double volume = 0.0;
    double standard_error = 0.0;  // Monte Carlo only; 0 for the grid method
    long long samples = 0;        // grid cells or MC samples
};

/// Volume of the delay region with a positive c1 lower bound. Grid method:
/// midpoint counting on resolution^3 cells (resolution >= 32). Monte Carlo:
/// uniform sampling with a binomial standard error. Throws BoxTooSmall when
/// the bound is still above 1e-2 somewhere on the box faces.
VolumeResult nontrivial_region_volume(const DelayAxes& axes, VolumeMethod method,
                                      long long samples_or_resolution,
                                      std::uint64_t seed = 1);
VolumeResult nontrivial_region_volume_serial(const DelayAxes& axes, VolumeMethod method,
                                             long long samples_or_resolution,
                                             std::uint64_t seed = 1);

struct RatioResult {
    double ratio = 0.0;
    double standard_error = 0.0;
    VolumeResult numerator;    // real-visibility region
    VolumeResult denominator;  // ideal region
};

/// Ratio of the region volume at the given visibilities to the ideal
/// (all-ones) region with the same widths. Independent of the widths: each
/// axis rescales both volumes by the same factor.
RatioResult volume_ratio(const DelayAxes& axes_real, VolumeMethod method,
                         long long samples_or_resolution, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Isosurface export
// ---------------------------------------------------------------------------

struct Mesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;  // 0-based corner indices
};

/// Zero level set of the c1 lower bound, extracted by marching tetrahedra
/// on a resolution^3 grid over the integration box.
Mesh extract_isosurface(const DelayAxes& axes, int resolution);

/// Plain-text mesh: lines "v x y z" and "f i j k" with 1-based indices.
std::string mesh_to_text(const Mesh& mesh);

}  // namespace indist::surf

#pragma once

#include <vector>

#include "indist/matrix.hpp"
#include "indist/types.hpp"

namespace indist::hom {

/// Two-photon HOM algebra: p_b = (1 + r) / 2.
///
/// bunching_to_overlap inverts that relation and clamps; a bunching
/// probability below 1/2 (possible with noisy counts) maps to r = 0 with the
/// clamp flag set. Throws OutOfRangeProbability outside [0, 1].
Clamped bunching_to_overlap(double p_bunch);

/// (1 + r) / 2. Throws OutOfRangeOverlap outside [0, 1].
double overlap_to_bunching(double r);

/// Gaussian delay dependence of a pairwise overlap:
/// r(dt) = visibility * exp(-dt^2 * width^2 / 2). At zero delay the overlap
/// equals the dip visibility.
struct DelayModel {
    double visibility = 1.0;  // value at zero delay, in [0, 1]
    double width = 1.0;       // spectral width (inverse time units), > 0
    double delay = 0.0;       // relative arrival time difference
};

double gaussian_overlap(const DelayModel& m);

/// Coincidence-dip model C(dx) = A (1 - B dx) {1 - V exp[-(dx - x0)^2 / sigma^2]}.
/// The linear factor absorbs slow drifts of the input rate during a scan.
struct DipCurveParams {
    double amplitude = 1.0;  // A > 0, baseline coincidence level
    double drift = 0.0;      // B
    double visibility = 1.0; // V in [0, 1]
    double center = 0.0;     // x0
    double width = 1.0;      // sigma > 0
};

double dip_curve(const DipCurveParams& p, double dx);

struct DipPoint {
    double dx = 0.0;
    double count = 0.0;
    double sigma = 0.0;  // <= 0 means "use max(1, sqrt(count))"
};

struct DipFit {
    DipCurveParams params;
    Mat covariance;          // 5x5, parameter order A, B, V, x0, sigma
    double residual_norm = 0.0;  // sqrt(chi^2)
    int iterations = 0;
};

/// Weighted least squares via damped Gauss-Newton. Deterministic: the start
/// point is derived from the data (coarse dip geometry), damping grows when a
/// step increases chi^2, and iteration stops when the relative step drops
/// below 1e-10. Throws InsufficientData (< 6 points) or NonConvergence
/// (200 iterations exhausted).
DipFit fit_dip(const std::vector<DipPoint>& points);

}  // namespace indist::hom

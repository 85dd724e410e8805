#include "indist/hom.hpp"

#include <algorithm>
#include <cmath>

namespace indist::hom {

Clamped bunching_to_overlap(double p_bunch) {
    if (!(p_bunch >= 0.0 && p_bunch <= 1.0))
        throw OutOfRangeProbability("bunching probability " + std::to_string(p_bunch) +
                                    " outside [0, 1]");
    return clamp01(2.0 * p_bunch - 1.0);
}

double overlap_to_bunching(double r) {
    if (!(r >= 0.0 && r <= 1.0))
        throw OutOfRangeOverlap("overlap " + std::to_string(r) + " outside [0, 1]");
    return 0.5 * (1.0 + r);
}

double gaussian_overlap(const DelayModel& m) {
    if (!(m.width > 0.0))
        throw NonPositiveWidth("delay model width must be positive, got " +
                               std::to_string(m.width));
    const double x = m.delay * m.width;
    return m.visibility * std::exp(-0.5 * x * x);
}

double dip_curve(const DipCurveParams& p, double dx) {
    const double d = dx - p.center;
    const double dip = 1.0 - p.visibility * std::exp(-d * d / (p.width * p.width));
    return p.amplitude * (1.0 - p.drift * dx) * dip;
}

namespace {

// Parameter vector order: A, B, V, x0, sigma.
DipCurveParams unpack(const std::vector<double>& th) {
    return {th[0], th[1], th[2], th[3], th[4]};
}

void model_and_jacobian(const std::vector<double>& th, double dx, double& value,
                        double grad[5]) {
    const double a = th[0], b = th[1], v = th[2], x0 = th[3], s = th[4];
    const double d = dx - x0;
    const double e = std::exp(-d * d / (s * s));
    const double lin = 1.0 - b * dx;
    const double dip = 1.0 - v * e;
    value = a * lin * dip;
    grad[0] = lin * dip;
    grad[1] = -a * dx * dip;
    grad[2] = -a * lin * e;
    grad[3] = -a * lin * v * e * (2.0 * d / (s * s));
    grad[4] = -a * lin * v * e * (2.0 * d * d / (s * s * s));
}

double chi2(const std::vector<double>& th, const std::vector<DipPoint>& pts,
            const std::vector<double>& w) {
    double acc = 0.0;
    double grad[5];
    for (size_t i = 0; i < pts.size(); ++i) {
        double value;
        model_and_jacobian(th, pts[i].dx, value, grad);
        const double r = value - pts[i].count;
        acc += w[i] * r * r;
    }
    return acc;
}

// Data-driven start point: baseline from the outer 20% of points, center at
// the count minimum, width from the half-depth crossings.
std::vector<double> initial_guess(const std::vector<DipPoint>& pts) {
    const size_t n = pts.size();
    size_t imin = 0;
    for (size_t i = 1; i < n; ++i)
        if (pts[i].count < pts[imin].count) imin = i;
    const double x0 = pts[imin].dx;
    const double cmin = pts[imin].count;

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::abs(pts[a].dx - x0) > std::abs(pts[b].dx - x0);
    });
    const size_t tail = std::max<size_t>(1, n / 5);
    double a0 = 0.0;
    for (size_t i = 0; i < tail; ++i) a0 += pts[order[i]].count;
    a0 /= static_cast<double>(tail);
    if (a0 <= 0.0) a0 = 1.0;

    double v0 = 1.0 - cmin / a0;
    v0 = std::clamp(v0, 0.05, 0.999);

    // half width at half depth, linear interpolation on either side
    const double level = cmin + 0.5 * (a0 - cmin);
    double span_lo = 0.0, span_hi = 0.0;
    for (size_t i = imin; i-- > 0;) {
        if (pts[i].count >= level) {
            const double x1 = pts[i].dx, y1 = pts[i].count;
            const double x2 = pts[i + 1].dx, y2 = pts[i + 1].count;
            const double t = (y1 == y2) ? 0.0 : (y1 - level) / (y1 - y2);
            span_lo = x0 - (x1 + t * (x2 - x1));
            break;
        }
    }
    for (size_t i = imin + 1; i < n; ++i) {
        if (pts[i].count >= level) {
            const double x1 = pts[i - 1].dx, y1 = pts[i - 1].count;
            const double x2 = pts[i].dx, y2 = pts[i].count;
            const double t = (y1 == y2) ? 0.0 : (level - y1) / (y2 - y1);
            span_hi = (x1 + t * (x2 - x1)) - x0;
            break;
        }
    }
    double s0 = 0.5 * (span_lo + span_hi);
    if (s0 <= 0.0) s0 = std::max(span_lo, span_hi);
    if (s0 <= 0.0) {
        double xmin = pts[0].dx, xmax = pts[0].dx;
        for (const auto& p : pts) {
            xmin = std::min(xmin, p.dx);
            xmax = std::max(xmax, p.dx);
        }
        s0 = 0.25 * (xmax - xmin);
    }
    return {a0, 0.0, v0, x0, s0};
}

}  // namespace

DipFit fit_dip(const std::vector<DipPoint>& points) {
    if (points.size() < 6)
        throw InsufficientData("dip fit needs at least 6 points, got " +
                               std::to_string(points.size()));

    const size_t n = points.size();
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) {
        double s = points[i].sigma;
        if (s <= 0.0) s = std::max(1.0, std::sqrt(std::max(0.0, points[i].count)));
        w[i] = 1.0 / (s * s);
    }

    std::vector<double> th = initial_guess(points);
    double best = chi2(th, points, w);
    double damping = 1e-3;
    const int max_iter = 200;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // normal equations
        Mat jtj(5, 5);
        std::vector<double> jtr(5, 0.0);
        double grad[5];
        for (size_t i = 0; i < n; ++i) {
            double value;
            model_and_jacobian(th, points[i].dx, value, grad);
            const double r = value - points[i].count;
            for (int a = 0; a < 5; ++a) {
                jtr[a] += w[i] * grad[a] * r;
                for (int b = a; b < 5; ++b) jtj(a, b) += w[i] * grad[a] * grad[b];
            }
        }
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);

        bool stepped = false;
        double rel_step = 0.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Mat damped = jtj;
            for (int a = 0; a < 5; ++a)
                damped(a, a) += damping * std::max(jtj(a, a), 1e-12);
            std::vector<double> delta;
            try {
                std::vector<double> rhs(5);
                for (int a = 0; a < 5; ++a) rhs[a] = -jtr[a];
                delta = solve_linear(damped, rhs);
            } catch (const std::runtime_error&) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> trial = th;
            for (int a = 0; a < 5; ++a) trial[a] += delta[a];
            trial[4] = std::max(std::abs(trial[4]), 1e-12);  // keep width positive
            const double c = chi2(trial, points, w);
            if (c <= best * (1.0 + 1e-14) || c < best + 1e-30) {
                rel_step = 0.0;
                for (int a = 0; a < 5; ++a)
                    rel_step = std::max(rel_step,
                                        std::abs(delta[a]) / std::max(std::abs(th[a]), 1e-12));
                th = std::move(trial);
                best = c;
                damping = std::max(damping * 0.3, 1e-12);
                stepped = true;
                break;
            }
            damping *= 10.0;
        }
        if (!stepped) break;                 // damping saturated: local minimum
        if (rel_step < 1e-10) break;         // converged
    }
    if (iter >= max_iter)
        throw NonConvergence("dip fit did not converge within 200 iterations");

    DipFit out;
    out.params = unpack(th);
    out.iterations = iter + 1;
    out.residual_norm = std::sqrt(best);

    Mat jtj(5, 5);
    double grad[5];
    for (size_t i = 0; i < n; ++i) {
        double value;
        model_and_jacobian(th, points[i].dx, value, grad);
        for (int a = 0; a < 5; ++a)
            for (int b = a; b < 5; ++b) jtj(a, b) += w[i] * grad[a] * grad[b];
    }
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);
    try {
        out.covariance = invert(jtj);
    } catch (const std::runtime_error&) {
        out.covariance = Mat(5, 5);  // degenerate fit geometry: no covariance
    }
    return out;
}

}  // namespace indist::hom

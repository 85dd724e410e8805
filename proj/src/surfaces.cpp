#include "indist/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "indist/rng.hpp"

namespace indist::surf {

void DelayAxes::validate() const {
    for (double w : width)
        if (!(w > 0.0)) throw NonPositiveWidth("delay axis width must be positive");
    for (double v : visibility)
        if (!(v >= 0.0 && v <= 1.0)) throw OutOfRangeOverlap("visibility outside [0, 1]");
    if (!(box_halfwidth_sigmas > 0.0)) throw BoxTooSmall("box half-width must be positive");
}

double c1_lower_at(const std::array<double, 3>& delays, const DelayAxes& axes) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double x = delays[k] * axes.width[k];
        sum += axes.visibility[k] * std::exp(-0.5 * x * x);
    }
    return sum - 2.0;
}

Region classify_configuration(const std::array<double, 3>& delays, const DelayAxes& axes) {
    return c1_lower_at(delays, axes) > 0.0 ? Region::inside : Region::outside;
}

namespace {

std::array<double, 3> box_halfwidths(const DelayAxes& axes) {
    return {axes.box_halfwidth_sigmas / axes.width[0],
            axes.box_halfwidth_sigmas / axes.width[1],
            axes.box_halfwidth_sigmas / axes.width[2]};
}

// The region must have essentially decayed at the box faces; a face value
// above this threshold means a meaningful part of the region is cut off.
constexpr double kBoundaryThreshold = 1e-2;

void check_box(const DelayAxes& axes) {
    const auto h = box_halfwidths(axes);
    constexpr int kFaceGrid = 65;
    double worst = -1e300;
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < kFaceGrid; ++i)
                for (int j = 0; j < kFaceGrid; ++j) {
                    std::array<double, 3> p{};
                    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                    p[axis] = side ? h[axis] : -h[axis];
                    p[u] = -h[u] + 2.0 * h[u] * i / (kFaceGrid - 1);
                    p[v] = -h[v] + 2.0 * h[v] * j / (kFaceGrid - 1);
                    worst = std::max(worst, c1_lower_at(p, axes));
                }
    if (worst >= kBoundaryThreshold)
        throw BoxTooSmall("nontrivial region reaches the integration box boundary "
                          "(face bound value " +
                          std::to_string(worst) + ")");
}

VolumeResult volume_grid(const DelayAxes& axes, long long resolution, bool parallel) {
    if (resolution < 32) throw Error("grid volume needs resolution >= 32");
    const auto h = box_halfwidths(axes);
    const long long n = resolution;
    long long inside = 0;
#pragma omp parallel for reduction(+ : inside) schedule(static) if (parallel)
    for (long long ix = 0; ix < n; ++ix) {
        const double x = -h[0] + (2.0 * h[0]) * (ix + 0.5) / n;
        for (long long iy = 0; iy < n; ++iy) {
            const double y = -h[1] + (2.0 * h[1]) * (iy + 0.5) / n;
            for (long long iz = 0; iz < n; ++iz) {
                const double z = -h[2] + (2.0 * h[2]) * (iz + 0.5) / n;
                if (c1_lower_at({x, y, z}, axes) > 0.0) ++inside;
            }
        }
    }
    const double cell = (2.0 * h[0] / n) * (2.0 * h[1] / n) * (2.0 * h[2] / n);
    VolumeResult out;
    out.volume = cell * static_cast<double>(inside);
    out.samples = n * n * n;
    return out;
}

VolumeResult volume_mc(const DelayAxes& axes, long long samples, std::uint64_t seed,
                       bool parallel) {
    if (samples < 1) throw Error("Monte Carlo volume needs at least one sample");
    const auto h = box_halfwidths(axes);
    const double box_volume = 8.0 * h[0] * h[1] * h[2];

    constexpr long long kChunk = 8192;
    const long long chunks = (samples + kChunk - 1) / kChunk;
    long long inside = 0;
#pragma omp parallel for reduction(+ : inside) schedule(static) if (parallel)
    for (long long c = 0; c < chunks; ++c) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(c));
        const long long count = std::min(kChunk, samples - c * kChunk);
        long long local = 0;
        for (long long i = 0; i < count; ++i) {
            const std::array<double, 3> p = {rng.uniform(-h[0], h[0]),
                                             rng.uniform(-h[1], h[1]),
                                             rng.uniform(-h[2], h[2])};
            if (c1_lower_at(p, axes) > 0.0) ++local;
        }
        inside += local;
    }
    const double frac = static_cast<double>(inside) / static_cast<double>(samples);
    VolumeResult out;
    out.volume = box_volume * frac;
    out.standard_error =
        box_volume * std::sqrt(std::max(0.0, frac * (1.0 - frac) / samples));
    out.samples = samples;
    return out;
}

VolumeResult volume_impl(const DelayAxes& axes, VolumeMethod method, long long arg,
                         std::uint64_t seed, bool parallel) {
    axes.validate();
    check_box(axes);
    return method == VolumeMethod::grid ? volume_grid(axes, arg, parallel)
                                        : volume_mc(axes, arg, seed, parallel);
}

}  // namespace

VolumeResult nontrivial_region_volume(const DelayAxes& axes, VolumeMethod method,
                                      long long samples_or_resolution, std::uint64_t seed) {
    return volume_impl(axes, method, samples_or_resolution, seed, true);
}

VolumeResult nontrivial_region_volume_serial(const DelayAxes& axes, VolumeMethod method,
                                             long long samples_or_resolution,
                                             std::uint64_t seed) {
    return volume_impl(axes, method, samples_or_resolution, seed, false);
}

RatioResult volume_ratio(const DelayAxes& axes_real, VolumeMethod method,
                         long long samples_or_resolution, std::uint64_t seed) {
    DelayAxes ideal = axes_real;
    ideal.visibility = {1.0, 1.0, 1.0};

    RatioResult out;
    out.denominator = volume_impl(ideal, method, samples_or_resolution, seed, true);
    out.numerator = volume_impl(axes_real, method, samples_or_resolution, seed, true);
    if (out.denominator.volume <= 0.0) throw Error("ideal region volume vanished");
    out.ratio = out.numerator.volume / out.denominator.volume;
    if (method == VolumeMethod::monte_carlo) {
        // Both volumes use the same sample points and the real region nests
        // inside the ideal one, so the ratio is a conditional fraction over
        // the samples landing in the ideal region.
        const auto h = box_halfwidths(axes_real);
        const double box_volume = 8.0 * h[0] * h[1] * h[2];
        const double inside_ideal = out.denominator.volume / box_volume *
                                    static_cast<double>(out.denominator.samples);
        const double p = out.ratio;
        out.standard_error =
            std::sqrt(std::max(0.0, p * (1.0 - p) / std::max(1.0, inside_ideal)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Marching tetrahedra
// ---------------------------------------------------------------------------

namespace {

// Cube corners carry bit-coded offsets (bit0 = x, bit1 = y, bit2 = z); the
// six tetrahedra share the main diagonal 0-7.
constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                             {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};

struct MeshBuilder {
    Mesh mesh;
    std::map<std::pair<long long, long long>, int> edge_vertex;

    int vertex_on_edge(long long ga, long long gb, const std::array<double, 3>& pa,
                       const std::array<double, 3>& pb, double fa, double fb) {
        const auto key = std::minmax(ga, gb);
        const auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double t = fa / (fa - fb);
        std::array<double, 3> p;
        for (int k = 0; k < 3; ++k) p[k] = pa[k] + t * (pb[k] - pa[k]);
        const int index = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        edge_vertex.emplace(key, index);
        return index;
    }
};

}  // namespace

Mesh extract_isosurface(const DelayAxes& axes, int resolution) {
    axes.validate();
    if (resolution < 8) throw Error("isosurface extraction needs resolution >= 8");
    const auto h = box_halfwidths(axes);
    const int n = resolution;
    const int np = n + 1;

    std::vector<double> f(static_cast<size_t>(np) * np * np);
    std::vector<double> coord[3];
    for (int k = 0; k < 3; ++k) {
        coord[k].resize(np);
        for (int i = 0; i < np; ++i) coord[k][i] = -h[k] + 2.0 * h[k] * i / n;
    }
    auto gid = [&](int ix, int iy, int iz) {
        return (static_cast<long long>(ix) * np + iy) * np + iz;
    };
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < np; ++ix)
        for (int iy = 0; iy < np; ++iy)
            for (int iz = 0; iz < np; ++iz)
                f[gid(ix, iy, iz)] =
                    c1_lower_at({coord[0][ix], coord[1][iy], coord[2][iz]}, axes);

    MeshBuilder builder;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                long long corner_id[8];
                std::array<double, 3> corner_p[8];
                double corner_f[8];
                for (int c = 0; c < 8; ++c) {
                    const int cx = ix + (c & 1), cy = iy + ((c >> 1) & 1),
                              cz = iz + ((c >> 2) & 1);
                    corner_id[c] = gid(cx, cy, cz);
                    corner_p[c] = {coord[0][cx], coord[1][cy], coord[2][cz]};
                    corner_f[c] = f[corner_id[c]];
                }
                for (const auto& tet : kTets) {
                    int inside[4], outside[4];
                    int n_in = 0, n_out = 0;
                    for (int v = 0; v < 4; ++v) {
                        if (corner_f[tet[v]] > 0.0)
                            inside[n_in++] = tet[v];
                        else
                            outside[n_out++] = tet[v];
                    }
                    auto edge = [&](int a, int b) {
                        return builder.vertex_on_edge(corner_id[a], corner_id[b], corner_p[a],
                                                      corner_p[b], corner_f[a], corner_f[b]);
                    };
                    if (n_in == 1) {
                        builder.mesh.triangles.push_back({edge(inside[0], outside[0]),
                                                          edge(inside[0], outside[1]),
                                                          edge(inside[0], outside[2])});
                    } else if (n_in == 3) {
                        builder.mesh.triangles.push_back({edge(outside[0], inside[0]),
                                                          edge(outside[0], inside[1]),
                                                          edge(outside[0], inside[2])});
                    } else if (n_in == 2) {
                        const int v00 = edge(inside[0], outside[0]);
                        const int v01 = edge(inside[0], outside[1]);
                        const int v10 = edge(inside[1], outside[0]);
                        const int v11 = edge(inside[1], outside[1]);
                        builder.mesh.triangles.push_back({v00, v01, v11});
                        builder.mesh.triangles.push_back({v00, v11, v10});
                    }
                }
            }
    return builder.mesh;
}

std::string mesh_to_text(const Mesh& mesh) {
    std::ostringstream os;
    os.precision(9);
    for (const auto& v : mesh.vertices) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles)
        os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    return os.str();
}

}  // namespace indist::surf

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "leaflab/julia.hpp"

namespace leaflab {

/// Upper half-space point z + t j.
struct HalfSpacePoint {
    Complex z{0.0, 0.0};
    double t = 1.0;
};

double hyp_dist(const HalfSpacePoint& p, const HalfSpacePoint& q);

/// Distance to the vertical geodesic over a.
double dist_to_vertical(const HalfSpacePoint& p, Complex a);
/// Distance to the geodesic with endpoints a != b.
double dist_to_geodesic(const HalfSpacePoint& p, Complex a, Complex b);

struct Circumdisk {
    Complex center;
    double radius = 0.0;
};

/// Convex hull of a finite planar set E together with infinity. Its floor
/// over conv(E) is the dome of Delaunay circumdisks; over the edges of
/// conv(E) it is bounded by vertical walls. Immutable after construction.
class HullModel {
public:
    /// Points closer than 1e-12 (relative) are merged. |E| < 2 is accepted
    /// here; the queries raise DegenerateInput.
    explicit HullModel(std::vector<Complex> points);
    explicit HullModel(const PointCloud& cloud);

    const std::vector<Complex>& points() const { return points_; }
    /// Counter-clockwise index triples.
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<Circumdisk>& empty_disks() const { return disks_; }
    /// Counter-clockwise polygon, collinear boundary points kept.
    const std::vector<Complex>& convex_hull() const { return hull_; }
    /// Boundary edges (a, b) of the triangulation, interior on the left; for
    /// collinear E the consecutive pairs along the line.
    const std::vector<std::array<int, 2>>& walls() const { return walls_; }
    bool degenerate() const { return points_.size() < 2; }
    bool collinear() const { return triangles_.empty() && points_.size() >= 2; }

    /// Index of a triangle containing z, or -1.
    int locate(Complex z) const;

private:
    void triangulate();
    void build_index();

    std::vector<Complex> points_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Circumdisk> disks_;
    std::vector<Complex> hull_;
    std::vector<std::array<int, 2>> walls_;
    double scale_ = 1.0;
    // Triangle buckets for point location.
    double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
    long nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

/// Lowest height of the hull over z: sup over empty disks D(c, r) containing
/// z of sqrt(r^2 - |z - c|^2). +inf outside conv(E). DegenerateInput when
/// |E| < 2 (the hull of one point and infinity is a vertical line).
double roof_height(const HullModel& model, Complex z);

bool in_hull(const HullModel& model, const HalfSpacePoint& p, double tol = 1e-12);

struct NearestPoint {
    HalfSpacePoint point;
    double distance = 0.0;
    /// Another boundary candidate within 1e-9 in distance but elsewhere.
    bool non_unique = false;
};

/// Nearest point of the hull; p itself (distance 0) when p is in the hull.
NearestPoint nearest_point(const HullModel& model, const HalfSpacePoint& p);
double hull_distance(const HullModel& model, const HalfSpacePoint& p);

/// Max over probes of the distance to the nearest vertical line over a
/// sample. Probes must lie in the hull (InvalidArgument otherwise).
double curtain_gap(const HullModel& model, const PointCloud& julia_samples, const std::vector<HalfSpacePoint>& probes);
double curtain_gap(const HullModel& model, const std::vector<Complex>& julia_samples,
                   const std::vector<HalfSpacePoint>& probes);

/// sup over probes of |d_E(p) - d_E'(p)|.
double hull_stability(const HullModel& a, const HullModel& b, const std::vector<HalfSpacePoint>& probes,
                      int workers = 1);

/// A path in product coordinates (w, r): w in the bounded complementary disk,
/// r the distance from the hull. An empty r means r = eps throughout.
struct LevelPath {
    std::vector<Complex> w;
    std::vector<double> r;
};

struct LevelMetricReport {
    /// Hyperbolic length over model length, per path.
    std::vector<double> ratios;
    std::vector<double> lengths;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    /// max(max_ratio, 1 / min_ratio).
    double bilipschitz = 0.0;
};

/// Point at distance r from the hull along the normal through the
/// retraction of w, for round E. w is in the unit-disk coordinate of the
/// circle.
HalfSpacePoint product_point(Complex center, double radius, Complex w, double r);

/// Compare path lengths in H^3 with dr^2 + cosh^2(r) dsigma^2, sigma the
/// Poincaré metric of the disk bounded by E. Only round E is supported
/// (UnsupportedComplement otherwise).
LevelMetricReport level_metric_check(const HullModel& model, double eps, const std::vector<LevelPath>& paths,
                                     int subdivisions = 64);

struct SideSeparation {
    /// Pairs (bounded side, unbounded side) whose joining geodesic meets the hull.
    std::size_t pairs = 0;
    std::size_t separated = 0;
    /// Smallest hull distance of the probes (w, t0) on each side.
    double bounded_min_distance = 0.0;
    double unbounded_min_distance = 0.0;
};

/// Probes (w, t0) over two families of Fatou points; the hull separates the
/// sides when every joining geodesic passes through it.
SideSeparation side_separation(const HullModel& model, const std::vector<Complex>& bounded,
                               const std::vector<Complex>& unbounded, double t0, int samples = 400);

struct ExtendOptions {
    int circle_resolution = 256;
    /// Golden-section steps refining the sampled circle maximum.
    int refine_steps = 60;
    double injectivity_tol = 1e-12;
};

/// e(phi)(z, t) = (phi(z), max_{|w| = t} |phi(z + w) - phi(z)|).
/// NotInjectiveOnCircle when two sampled images coincide within tolerance.
HalfSpacePoint extend_homeo(const std::function<Complex(Complex)>& phi, const HalfSpacePoint& p,
                            const ExtendOptions& options = {});

/// Boundary mesh as Wavefront OBJ: dome faces subdivided and lifted to the
/// roof, walls cut at height t_max.
void write_obj(const HullModel& model, std::ostream& out, int subdivisions = 4, double t_max = 2.0);

}  // namespace leaflab

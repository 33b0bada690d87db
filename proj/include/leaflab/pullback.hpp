#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "leaflab/continuation.hpp"
#include "leaflab/orbit.hpp"

namespace leaflab {

/// Closed curve sampled at integer parameters in [0, period). The base curve
/// is a round circle; every other curve is a lift of its parent under f and
/// its parameter s lies over the parent's s mod parent->period.
struct Curve {
    std::shared_ptr<Curve> parent;
    Complex center{0.0, 0.0};
    double radius = 0.0;
    std::int64_t period = 0;
    std::map<std::int64_t, Complex> nodes;

    std::vector<Complex> polygon() const;
};

struct Component {
    std::shared_ptr<Curve> curve;
    /// Degree of f from this component onto the parent region.
    int local_degree = 1;
};

struct PullbackOptions {
    int resolution = 256;
    /// Stop (truncating the trace) once the cumulative degree exceeds this.
    int max_degree = 4096;
    std::size_t max_nodes = 1 << 15;
    int refine_rounds = 6;
    /// A gap longer than this multiple of the median gap gets a midpoint.
    double refine_ratio = 3.0;
    TrackOptions track;
};

/// Lifts curves through f. Holds the map's critical data so repeated lifts
/// do not recompute it.
class Lifter {
public:
    Lifter(const RationalMap& f, PullbackOptions options);

    static std::shared_ptr<Curve> circle(Complex center, double radius, int resolution);

    /// Value of the curve at parameter s, computing and inserting it (and any
    /// missing ancestors) by continuation from the previous node if needed.
    Complex value_at(Curve& c, std::int64_t s);

    /// Every component of f^-1 of the region bounded by the parent curve,
    /// one per cycle of the boundary monodromy.
    std::vector<Component> lift_all(const std::shared_ptr<Curve>& parent);

    /// The component whose boundary winds around anchor.
    Component lift_containing(const std::shared_ptr<Curve>& parent, Complex anchor);

    /// Insert midpoints where consecutive nodes are far apart.
    void refine(Curve& c);

    const RationalMap& map() const { return f_; }
    const PullbackOptions& options() const { return options_; }

private:
    std::vector<Complex> parent_path(Curve& parent, std::int64_t from, std::int64_t to);
    void clear_parent(Curve& parent);
    std::vector<Complex> lift_sheet(Curve& parent, Complex start);

    const RationalMap& f_;
    PullbackOptions options_;
    std::vector<Complex> critical_values_;
    std::vector<CriticalPoint> finite_critical_;
};

struct PullbackLevel {
    int level = 0;
    SpherePoint anchor;
    std::vector<Complex> boundary;
    double diameter = 0.0;
    std::vector<CriticalPoint> critical_points_inside;
    int local_degree = 1;
    long long cumulative_degree = 1;
    /// local_degree == 1 + critical multiplicity inside (Riemann-Hurwitz for disks).
    bool hurwitz_consistent = true;
};

struct PullbackTrace {
    std::vector<PullbackLevel> levels;
    double base_radius = 0.0;
    int resolution = 0;
    bool truncated = false;
    std::string truncation_reason;
};

/// Pull D(z_0, radius) back along the orbit, level by level.
PullbackTrace pullback_disk(const RationalMap& f, const BackwardOrbit& orbit, double radius,
                            const PullbackOptions& options = {}, int depth = -1);

/// Finite critical points inside the polygon, with multiplicity.
std::vector<CriticalPoint> critical_points_inside(const RationalMap& f, const std::vector<Complex>& polygon);

}  // namespace leaflab

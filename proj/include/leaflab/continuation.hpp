#pragma once

#include <span>
#include <vector>

#include "leaflab/ratmap.hpp"

namespace leaflab {

struct TrackOptions {
    /// Minimum allowed distance from the path to a finite critical value.
    double eta = 1e-9;
    /// Bound on |dw| |f''| / |f'| for a predictor step.
    double safety = 0.2;
    double min_step = 1e-12;
    double newton_tol = 1e-14;
};

/// Preimage of path.back() obtained by continuing the branch of f^-1 that
/// sends path.front() to start along the polyline. Raises
/// PathThroughCriticalValue if some segment passes within eta of a finite
/// critical value, and TrackingDivergence when the step size collapses or the
/// branch leaves the finite chart.
Complex continue_inverse_along_path(const RationalMap& f, std::span<const Complex> path, Complex start,
                                    const TrackOptions& options = {});

/// One segment of the above, without the critical-value check.
Complex track_segment(const RationalMap& f, Complex a, Complex b, Complex start, const TrackOptions& options = {});

/// Euclidean distance from c to the segment [a, b].
double segment_distance(Complex c, Complex a, Complex b);

/// Raise PathThroughCriticalValue if the segment comes within eta of a
/// finite critical value of f.
void check_clear_of_critical_values(const std::vector<Complex>& critical_values, Complex a, Complex b, double eta);

/// Finite critical values of f.
std::vector<Complex> finite_critical_values(const RationalMap& f);

/// Solve f(z + x) - f(z) = d by Newton on the increment, starting at x.
Complex newton_increment(const RationalMap& f, Complex z, Complex d, Complex x);

/// Offset x with f(z_next + x) = f(z_next) + d on the branch continued from
/// z_cur = f(z_next). Offsets stay accurate when they are far below the
/// size of the points themselves.
Complex lift_offset(const RationalMap& f, Complex z_next, Complex z_cur, Complex d, const TrackOptions& track = {});

}  // namespace leaflab

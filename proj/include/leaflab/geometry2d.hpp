#pragma once

#include <vector>

#include "leaflab/types.hpp"

namespace leaflab {

/// Andrew's monotone chain, counter-clockwise. keep_collinear retains points
/// on hull edges.
std::vector<Complex> convex_hull_2d(std::vector<Complex> pts, bool keep_collinear = false);

/// Signed area (positive for counter-clockwise).
double polygon_area(const std::vector<Complex>& poly);

/// Winding number of the closed polygon around c.
int winding_number(const std::vector<Complex>& poly, Complex c);

/// Uniform bucket grid for Euclidean nearest-neighbour queries.
class NearestGrid {
public:
    /// cell <= 0 picks a cell with about two points per bucket.
    explicit NearestGrid(std::vector<Complex> points, double cell = 0.0);
    /// Distance to the nearest stored point; +inf when empty.
    double distance(Complex q) const;
    Complex nearest(Complex q) const;
    /// Indices (into the constructor's points) within distance r of q.
    std::vector<std::size_t> within(Complex q, double r) const;
    bool empty() const { return points_.empty(); }

private:
    double search(Complex q, std::size_t* index) const;
    std::vector<Complex> points_;
    double cell_ = 1.0;
    double x0_ = 0.0, y0_ = 0.0;
    long nx_ = 1, ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

/// Largest chordal distance between two points of the set.
double spherical_diameter(const std::vector<Complex>& pts);

}  // namespace leaflab

#include "leaflab/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leaflab {
namespace {

double cross(Complex o, Complex a, Complex b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

}  // namespace

std::vector<Complex> convex_hull_2d(std::vector<Complex> pts, bool keep_collinear) {
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto drop = [&](double c) { return keep_collinear ? c < 0.0 : c <= 0.0; };
    std::vector<Complex> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && drop(cross(hull[k - 2], hull[k - 1], p))) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && drop(cross(hull[k - 2], hull[k - 1], pts[i]))) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (keep_collinear) {
        // All points collinear: the upper pass walked back over the lower.
        std::vector<Complex> uniq;
        for (const auto& p : hull)
            if (std::find(uniq.begin(), uniq.end(), p) == uniq.end()) uniq.push_back(p);
        hull = std::move(uniq);
    }
    return hull;
}

double polygon_area(const std::vector<Complex>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Complex p = poly[i];
        const Complex q = poly[(i + 1) % poly.size()];
        a += p.real() * q.imag() - q.real() * p.imag();
    }
    return 0.5 * a;
}

int winding_number(const std::vector<Complex>& poly, Complex c) {
    double total = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Complex a = poly[i] - c;
        const Complex b = poly[(i + 1) % poly.size()] - c;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double spherical_diameter(const std::vector<Complex>& pts) {
    if (pts.size() < 2) return 0.0;
    double lo_x = pts[0].real(), hi_x = lo_x, lo_y = pts[0].imag(), hi_y = lo_y;
    for (const auto& p : pts) {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    // On a small set the chordal metric is a nearly constant multiple of the
    // Euclidean one and the extreme pair lies on the Euclidean hull. Large
    // sets can wrap toward the antipode, so they get the all-pairs scan.
    const bool small = std::max(hi_x - lo_x, hi_y - lo_y) < 0.5;
    const std::vector<Complex> cand = small ? convex_hull_2d(pts, true) : pts;
    const std::vector<Complex>& use = cand.size() >= 2 ? cand : pts;
    double best = 0.0;
    for (std::size_t i = 0; i < use.size(); ++i)
        for (std::size_t j = i + 1; j < use.size(); ++j) best = std::max(best, spherical_dist(use[i], use[j]));
    return best;
}

}  // namespace leaflab

namespace leaflab {

NearestGrid::NearestGrid(std::vector<Complex> points, double cell) : points_(std::move(points)) {
    if (points_.empty()) return;
    double x1 = points_[0].real(), y1 = points_[0].imag();
    x0_ = x1;
    y0_ = y1;
    for (const auto& p : points_) {
        x0_ = std::min(x0_, p.real());
        y0_ = std::min(y0_, p.imag());
        x1 = std::max(x1, p.real());
        y1 = std::max(y1, p.imag());
    }
    const double span = std::max({x1 - x0_, y1 - y0_, 1e-12});
    cell_ = cell > 0.0 ? cell : span / std::max(1.0, std::sqrt(static_cast<double>(points_.size()) / 2.0));
    nx_ = std::min<long>(4096, static_cast<long>((x1 - x0_) / cell_) + 1);
    ny_ = std::min<long>(4096, static_cast<long>((y1 - y0_) / cell_) + 1);
    cell_ = std::max({cell_, (x1 - x0_) / static_cast<double>(nx_) * (1 + 1e-12), (y1 - y0_) / static_cast<double>(ny_) * (1 + 1e-12)});
    std::vector<std::size_t> bucket(points_.size());
    std::vector<std::size_t> count(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const long cx = std::min(nx_ - 1, static_cast<long>((points_[i].real() - x0_) / cell_));
        const long cy = std::min(ny_ - 1, static_cast<long>((points_[i].imag() - y0_) / cell_));
        bucket[i] = static_cast<std::size_t>(cy * nx_ + cx);
        ++count[bucket[i] + 1];
    }
    for (std::size_t b = 1; b < count.size(); ++b) count[b] += count[b - 1];
    start_ = count;
    order_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) order_[count[bucket[i]]++] = i;
}

double NearestGrid::search(Complex q, std::size_t* index) const {
    if (points_.empty()) return std::numeric_limits<double>::infinity();
    // Queries outside the grid start from the nearest edge cell; the ring
    // lower bound below still holds for them.
    const long cx = std::clamp(static_cast<long>(std::floor((q.real() - x0_) / cell_)), 0L, nx_ - 1);
    const long cy = std::clamp(static_cast<long>(std::floor((q.imag() - y0_) / cell_)), 0L, ny_ - 1);
    double best = std::numeric_limits<double>::infinity();
    const long max_ring = std::max(nx_, ny_);
    for (long ring = 0; ring <= max_ring; ++ring) {
        // Every point outside this ring is at least (ring) cells away.
        if (best < (static_cast<double>(ring) - 1.0) * cell_) break;
        for (long y = cy - ring; y <= cy + ring; ++y) {
            if (y < 0 || y >= ny_) continue;
            const bool edge_row = y == cy - ring || y == cy + ring;
            for (long x = cx - ring; x <= cx + ring; x += edge_row ? 1 : 2 * ring) {
                if (x >= 0 && x < nx_) {
                    const auto b = static_cast<std::size_t>(y * nx_ + x);
                    for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
                        const double d = std::abs(points_[order_[k]] - q);
                        if (d < best) {
                            best = d;
                            if (index) *index = order_[k];
                        }
                    }
                }
                if (ring == 0) break;
            }
        }
    }
    return best;
}

double NearestGrid::distance(Complex q) const { return search(q, nullptr); }

std::vector<std::size_t> NearestGrid::within(Complex q, double r) const {
    std::vector<std::size_t> out;
    if (points_.empty()) return out;
    const long x_lo = std::max(0L, static_cast<long>(std::floor((q.real() - r - x0_) / cell_)));
    const long x_hi = std::min(nx_ - 1, static_cast<long>(std::floor((q.real() + r - x0_) / cell_)));
    const long y_lo = std::max(0L, static_cast<long>(std::floor((q.imag() - r - y0_) / cell_)));
    const long y_hi = std::min(ny_ - 1, static_cast<long>(std::floor((q.imag() + r - y0_) / cell_)));
    for (long y = y_lo; y <= y_hi; ++y)
        for (long x = x_lo; x <= x_hi; ++x) {
            const auto b = static_cast<std::size_t>(y * nx_ + x);
            for (std::size_t k = start_[b]; k < start_[b + 1]; ++k)
                if (std::abs(points_[order_[k]] - q) <= r) out.push_back(order_[k]);
        }
    std::sort(out.begin(), out.end());
    return out;
}

Complex NearestGrid::nearest(Complex q) const {
    std::size_t i = 0;
    search(q, &i);
    return points_.at(i);
}

}  // namespace leaflab

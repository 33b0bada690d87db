#include "leaflab/hull3.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"
#include "leaflab/parallel.hpp"

namespace leaflab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(Complex o, Complex a, Complex b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Orientation with a tolerance relative to the edge lengths.
int orient(Complex a, Complex b, Complex c) {
    const double v = cross(a, b, c);
    const double tol = 1e-12 * std::abs(b - a) * std::abs(c - a);
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
}

bool lex_less(Complex a, Complex b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

std::uint64_t edge_key(int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); }

// > 0 when d is strictly inside the circle through the ccw triangle abc.
double incircle(Complex a, Complex b, Complex c, Complex d) {
    const Complex A = a - d, B = b - d, C = c - d;
    const double det = std::norm(A) * cross(0.0, B, C) - std::norm(B) * cross(0.0, A, C) + std::norm(C) * cross(0.0, A, B);
    const double m = std::max({std::norm(A), std::norm(B), std::norm(C)});
    return det / (m * m);
}

Circumdisk circumdisk(Complex a, Complex b, Complex c) {
    const Complex B = b - a, C = c - a;
    const double d = 2.0 * cross(0.0, B, C);
    const Complex u((C.imag() * std::norm(B) - B.imag() * std::norm(C)) / d,
                    (B.real() * std::norm(C) - C.real() * std::norm(B)) / d);
    return {a + u, std::abs(u)};
}

bool in_triangle(Complex a, Complex b, Complex c, Complex z, double tol) {
    return cross(a, b, z) >= -tol * std::abs(b - a) && cross(b, c, z) >= -tol * std::abs(c - b) &&
           cross(c, a, z) >= -tol * std::abs(a - c);
}

// Inversion in the unit sphere about the boundary point b: an isometry.
HalfSpacePoint invert(const HalfSpacePoint& p, Complex b) {
    const double n = std::norm(p.z - b) + p.t * p.t;
    return {b + (p.z - b) / n, p.t / n};
}

HalfSpacePoint foot_on_vertical(const HalfSpacePoint& p, Complex a) {
    return {a, std::sqrt(std::norm(p.z - a) + p.t * p.t)};
}

HalfSpacePoint foot_on_geodesic(const HalfSpacePoint& p, Complex a, Complex b) {
    const HalfSpacePoint q = invert(p, b);
    const Complex a2 = b + (a - b) / std::norm(a - b);
    return invert(foot_on_vertical(q, a2), b);
}

struct Candidate {
    HalfSpacePoint point;
    double distance;
};

}  // namespace

double hyp_dist(const HalfSpacePoint& p, const HalfSpacePoint& q) {
    // 2 asinh(chord / (2 sqrt(t t'))) is the same quantity without the
    // cancellation of acosh near 1.
    const double chord = std::sqrt(std::norm(p.z - q.z) + (p.t - q.t) * (p.t - q.t));
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.t * q.t)));
}

double dist_to_vertical(const HalfSpacePoint& p, Complex a) { return std::asinh(std::abs(p.z - a) / p.t); }

double dist_to_geodesic(const HalfSpacePoint& p, Complex a, Complex b) {
    const HalfSpacePoint q = invert(p, b);
    return dist_to_vertical(q, b + (a - b) / std::norm(a - b));
}

HullModel::HullModel(std::vector<Complex> points) {
    double extent = 0.0;
    for (const auto& z : points) extent = std::max({extent, std::abs(z.real()), std::abs(z.imag())});
    scale_ = extent > 0.0 ? extent : 1.0;
    std::sort(points.begin(), points.end(), lex_less);
    // Merge near-duplicates through a hash of tol-sized cells.
    const double tol = 1e-12 * scale_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    auto cell_of = [&](Complex z) {
        return std::pair<long long, long long>{static_cast<long long>(std::floor(z.real() / tol)),
                                               static_cast<long long>(std::floor(z.imag() / tol))};
    };
    auto key = [](long long i, long long j) {
        return static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(j);
    };
    for (const auto& z : points) {
        const auto [ci, cj] = cell_of(z);
        bool dup = false;
        for (long long di = -1; di <= 1 && !dup; ++di)
            for (long long dj = -1; dj <= 1 && !dup; ++dj) {
                auto it = cells.find(key(ci + di, cj + dj));
                if (it == cells.end()) continue;
                for (int k : it->second)
                    if (std::abs(points_[k] - z) <= tol) dup = true;
            }
        if (dup) continue;
        cells[key(ci, cj)].push_back(static_cast<int>(points_.size()));
        points_.push_back(z);
    }
    triangulate();
    build_index();
}

HullModel::HullModel(const PointCloud& cloud)
    : HullModel([&] {
          std::vector<Complex> pts;
          for (const auto& p : cloud.points)
              if (p.is_finite()) pts.push_back(p.value());
          return pts;
      }()) {}

void HullModel::triangulate() {
    const int n = static_cast<int>(points_.size());
    if (n < 2) {
        hull_ = points_;
        return;
    }
    const auto& P = points_;
    int k = 2;
    while (k < n && orient(P[0], P[k - 1], P[k]) == 0) ++k;
    if (k == n) {
        for (int i = 0; i + 1 < n; ++i) walls_.push_back({i, i + 1});
        hull_ = {P.front(), P.back()};
        return;
    }

    // Sweep: each new point is lexicographically last, hence outside the
    // current hull; cone it to the visible edges.
    std::vector<int> H;
    if (orient(P[0], P[k - 1], P[k]) > 0) {
        for (int i = 0; i + 1 < k; ++i) triangles_.push_back({i, i + 1, k});
        for (int i = 0; i <= k; ++i) H.push_back(i);
    } else {
        for (int i = 0; i + 1 < k; ++i) triangles_.push_back({i + 1, i, k});
        H.push_back(0);
        H.push_back(k);
        for (int i = k - 1; i >= 1; --i) H.push_back(i);
    }
    for (int m = k + 1; m < n; ++m) {
        const std::size_t h = H.size();
        std::vector<char> vis(h);
        bool any = false;
        for (std::size_t i = 0; i < h; ++i) {
            vis[i] = orient(P[H[i]], P[H[(i + 1) % h]], P[m]) < 0;
            any = any || vis[i];
        }
        if (!any) continue;  // on the hull within rounding
        std::size_t s = 0;
        while (!(vis[s] && !vis[(s + h - 1) % h])) ++s;
        std::size_t e = s;
        while (vis[e % h]) {
            triangles_.push_back({H[(e + 1) % h], H[e % h], m});
            ++e;
        }
        std::vector<int> next;
        for (std::size_t i = e; i <= s + h; ++i) next.push_back(H[i % h]);
        next.push_back(m);
        H = std::move(next);
    }

    // Lawson flips to the Delaunay triangulation.
    std::unordered_map<std::uint64_t, int> owner;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& T = triangles_[t];
        for (int j = 0; j < 3; ++j) owner[edge_key(T[j], T[(j + 1) % 3])] = static_cast<int>(t);
    }
    auto third = [&](int t, int a, int b) {
        for (int v : triangles_[t])
            if (v != a && v != b) return v;
        return -1;
    };
    std::vector<std::pair<int, int>> stack;
    for (const auto& [key, t] : owner) {
        const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
        if (a < b && owner.count(edge_key(b, a))) stack.emplace_back(a, b);
    }
    std::sort(stack.begin(), stack.end());
    const std::size_t budget = 64 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + 1024;
    std::size_t flips = 0;
    while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        auto i1 = owner.find(edge_key(a, b));
        auto i2 = owner.find(edge_key(b, a));
        if (i1 == owner.end() || i2 == owner.end()) continue;
        const int t1 = i1->second, t2 = i2->second;
        const int c = third(t1, a, b), d = third(t2, a, b);
        if (incircle(P[a], P[b], P[c], P[d]) <= 1e-12) continue;
        if (orient(P[a], P[d], P[c]) <= 0 || orient(P[b], P[c], P[d]) <= 0) continue;
        if (++flips > budget) fail(ErrorCode::BudgetExceeded, "Delaunay flips did not terminate");
        triangles_[t1] = {a, d, c};
        triangles_[t2] = {b, c, d};
        owner.erase(edge_key(a, b));
        owner.erase(edge_key(b, a));
        owner[edge_key(a, d)] = t1;
        owner[edge_key(d, c)] = t1;
        owner[edge_key(c, a)] = t1;
        owner[edge_key(b, c)] = t2;
        owner[edge_key(c, d)] = t2;
        owner[edge_key(d, b)] = t2;
        stack.emplace_back(std::min(a, d), std::max(a, d));
        stack.emplace_back(std::min(d, b), std::max(d, b));
        stack.emplace_back(std::min(b, c), std::max(b, c));
        stack.emplace_back(std::min(c, a), std::max(c, a));
    }

    for (const auto& T : triangles_) disks_.push_back(circumdisk(P[T[0]], P[T[1]], P[T[2]]));
    for (const auto& T : triangles_)
        for (int j = 0; j < 3; ++j) {
            const int a = T[j], b = T[(j + 1) % 3];
            if (!owner.count(edge_key(b, a))) walls_.push_back({a, b});
        }
    std::sort(walls_.begin(), walls_.end());
    hull_ = convex_hull_2d(points_, true);
}

void HullModel::build_index() {
    if (triangles_.empty()) return;
    double x1 = -kInf, y1 = -kInf;
    x0_ = y0_ = kInf;
    for (const auto& z : points_) {
        x0_ = std::min(x0_, z.real());
        y0_ = std::min(y0_, z.imag());
        x1 = std::max(x1, z.real());
        y1 = std::max(y1, z.imag());
    }
    const double side = std::max({x1 - x0_, y1 - y0_, 1e-300});
    const long per_side = std::max(1L, static_cast<long>(std::sqrt(static_cast<double>(triangles_.size()))));
    cell_ = side / static_cast<double>(per_side);
    nx_ = static_cast<long>((x1 - x0_) / cell_) + 1;
    ny_ = static_cast<long>((y1 - y0_) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    auto clampi = [](long v, long hi) { return std::clamp(v, 0L, hi - 1); };
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        double ax = kInf, ay = kInf, bx = -kInf, by = -kInf;
        for (int v : triangles_[t]) {
            ax = std::min(ax, points_[v].real());
            ay = std::min(ay, points_[v].imag());
            bx = std::max(bx, points_[v].real());
            by = std::max(by, points_[v].imag());
        }
        const long i0 = clampi(static_cast<long>((ax - x0_) / cell_) - 1, nx_);
        const long i1 = clampi(static_cast<long>((bx - x0_) / cell_) + 1, nx_);
        const long j0 = clampi(static_cast<long>((ay - y0_) / cell_) - 1, ny_);
        const long j1 = clampi(static_cast<long>((by - y0_) / cell_) + 1, ny_);
        for (long i = i0; i <= i1; ++i)
            for (long j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<int>(t));
    }
}

int HullModel::locate(Complex z) const {
    if (buckets_.empty()) return -1;
    const double gx = (z.real() - x0_) / cell_, gy = (z.imag() - y0_) / cell_;
    if (gx < -1.0 || gy < -1.0 || gx > static_cast<double>(nx_) + 1.0 || gy > static_cast<double>(ny_) + 1.0) return -1;
    const long i = std::clamp(static_cast<long>(std::floor(gx)), 0L, nx_ - 1);
    const long j = std::clamp(static_cast<long>(std::floor(gy)), 0L, ny_ - 1);
    for (int t : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
        const auto& T = triangles_[t];
        if (in_triangle(points_[T[0]], points_[T[1]], points_[T[2]], z, 1e-12)) return t;
    }
    return -1;
}

double roof_height(const HullModel& model, Complex z) {
    if (model.degenerate()) fail(ErrorCode::DegenerateInput, "hull of fewer than two points and infinity");
    const auto& P = model.points();
    if (model.collinear()) {
        const Complex a = P.front(), b = P.back();
        const Complex dir = (b - a) / std::abs(b - a);
        const Complex u = (z - a) / dir;
        const double len = std::abs(b - a);
        if (std::abs(u.imag()) > 1e-12 * len) return kInf;
        const double s = u.real();
        if (s < -1e-12 * len || s > len * (1.0 + 1e-12)) return kInf;
        for (const auto& w : model.walls()) {
            const double s0 = std::real((P[w[0]] - a) / dir), s1 = std::real((P[w[1]] - a) / dir);
            if (s >= s0 - 1e-12 * len && s <= s1 + 1e-12 * len) return std::sqrt(std::max(0.0, (s - s0) * (s1 - s)));
        }
        return kInf;
    }
    const int t = model.locate(z);
    if (t < 0) return kInf;
    const auto& D = model.empty_disks()[t];
    return std::sqrt(std::max(0.0, D.radius * D.radius - std::norm(z - D.center)));
}

bool in_hull(const HullModel& model, const HalfSpacePoint& p, double tol) {
    const double roof = roof_height(model, p.z);
    return std::isfinite(roof) && p.t >= roof - tol * std::max(1.0, roof);
}

NearestPoint nearest_point(const HullModel& model, const HalfSpacePoint& p) {
    if (model.degenerate()) fail(ErrorCode::DegenerateInput, "hull of fewer than two points and infinity");
    if (!(p.t > 0.0)) fail(ErrorCode::InvalidArgument, "height must be positive");
    if (in_hull(model, p)) return {p, 0.0, false};
    const auto& P = model.points();
    std::vector<Candidate> cand;

    // Dome faces: the perpendicular from p meets the hemisphere over
    // D(c, r) at c + (z - c) 2 r^2 / (|z - c|^2 + t^2 + r^2).
    for (std::size_t i = 0; i < model.triangles().size(); ++i) {
        const auto& T = model.triangles()[i];
        const auto& D = model.empty_disks()[i];
        const double s = std::norm(p.z - D.center) + p.t * p.t;
        const Complex f = D.center + (p.z - D.center) * (2.0 * D.radius * D.radius / (s + D.radius * D.radius));
        if (!in_triangle(P[T[0]], P[T[1]], P[T[2]], f, 1e-12)) continue;
        const double h = std::sqrt(std::max(0.0, D.radius * D.radius - std::norm(f - D.center)));
        cand.push_back({{f, h}, std::asinh(std::abs(s - D.radius * D.radius) / (2.0 * D.radius * p.t))});
    }
    // Walls: the perpendicular is the semicircle about the projection of z.
    std::vector<int> wall_vertices;
    for (const auto& w : model.walls()) {
        const Complex a = P[w[0]], b = P[w[1]];
        const double len2 = std::norm(b - a);
        const double s = std::real((p.z - a) * std::conj(b - a)) / len2;
        const Complex u = a + s * (b - a);
        const double delta = std::abs(p.z - u);
        const double R = std::sqrt(delta * delta + p.t * p.t);
        if (s >= 0.0 && s <= 1.0 && R * R >= std::abs(u - a) * std::abs(b - u))
            cand.push_back({{u, R}, std::asinh(delta / p.t)});
        wall_vertices.push_back(w[0]);
        wall_vertices.push_back(w[1]);
    }
    // Edges of the faces: semicircles between vertices, vertical lines over
    // the hull vertices.
    std::vector<std::pair<int, int>> edges;
    for (const auto& T : model.triangles())
        for (int j = 0; j < 3; ++j) edges.emplace_back(std::min(T[j], T[(j + 1) % 3]), std::max(T[j], T[(j + 1) % 3]));
    for (const auto& w : model.walls()) edges.emplace_back(std::min(w[0], w[1]), std::max(w[0], w[1]));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& [a, b] : edges) {
        const HalfSpacePoint q = foot_on_geodesic(p, P[a], P[b]);
        cand.push_back({q, dist_to_geodesic(p, P[a], P[b])});
    }
    std::sort(wall_vertices.begin(), wall_vertices.end());
    wall_vertices.erase(std::unique(wall_vertices.begin(), wall_vertices.end()), wall_vertices.end());
    for (int v : wall_vertices) cand.push_back({foot_on_vertical(p, P[v]), dist_to_vertical(p, P[v])});

    std::size_t best = 0;
    for (std::size_t i = 1; i < cand.size(); ++i)
        if (cand[i].distance < cand[best].distance) best = i;
    NearestPoint out{cand[best].point, cand[best].distance, false};
    for (const auto& c : cand)
        if (c.distance <= out.distance + 1e-9 && hyp_dist(c.point, out.point) > 1e-6) out.non_unique = true;
    return out;
}

double hull_distance(const HullModel& model, const HalfSpacePoint& p) { return nearest_point(model, p).distance; }

double curtain_gap(const HullModel& model, const std::vector<Complex>& julia_samples,
                   const std::vector<HalfSpacePoint>& probes) {
    if (julia_samples.empty()) fail(ErrorCode::InvalidArgument, "no curtain samples");
    const NearestGrid grid(julia_samples);
    double gap = 0.0;
    for (const auto& p : probes) {
        if (!in_hull(model, p, 1e-9)) fail(ErrorCode::InvalidArgument, "curtain probe outside the hull");
        gap = std::max(gap, std::asinh(grid.distance(p.z) / p.t));
    }
    return gap;
}

double curtain_gap(const HullModel& model, const PointCloud& julia_samples, const std::vector<HalfSpacePoint>& probes) {
    std::vector<Complex> pts;
    for (const auto& p : julia_samples.points)
        if (p.is_finite()) pts.push_back(p.value());
    return curtain_gap(model, pts, probes);
}

double hull_stability(const HullModel& a, const HullModel& b, const std::vector<HalfSpacePoint>& probes, int workers) {
    std::vector<double> diff(probes.size());
    parallel_for(probes.size(), workers,
                 [&](std::size_t i) { diff[i] = std::abs(hull_distance(a, probes[i]) - hull_distance(b, probes[i])); });
    double sup = 0.0;
    for (double d : diff) sup = std::max(sup, d);
    return sup;
}

HalfSpacePoint product_point(Complex center, double radius, Complex w, double r) {
    // Image of (0, e^-r) under the disk automorphism sending 0 to w.
    const double s2 = std::exp(-2.0 * r);
    const double n = std::norm(w);
    const double den = 1.0 + n * s2;
    return {center + radius * w * ((1.0 + s2) / den), radius * std::exp(-r) * (1.0 - n) / den};
}

LevelMetricReport level_metric_check(const HullModel& model, double eps, const std::vector<LevelPath>& paths,
                                     int subdivisions) {
    const auto& P = model.points();
    if (P.size() < 3) fail(ErrorCode::UnsupportedComplement, "need at least three points of a round circle");
    // Algebraic circle fit x^2 + y^2 + D x + E y + F = 0.
    double m[3][4] = {};
    for (const auto& z : P) {
        const double row[3] = {z.real(), z.imag(), 1.0};
        const double rhs = -std::norm(z);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
            m[i][3] += row[i] * rhs;
        }
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        if (std::abs(m[c][c]) < 1e-300) fail(ErrorCode::UnsupportedComplement, "points do not determine a circle");
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    const double D = m[0][3] / m[0][0], E = m[1][3] / m[1][1], F = m[2][3] / m[2][2];
    const Complex center(-D / 2.0, -E / 2.0);
    const double radius = std::sqrt(std::max(0.0, std::norm(center) - F));
    for (const auto& z : P)
        if (!(std::abs(std::abs(z - center) - radius) <= 1e-6 * radius))
            fail(ErrorCode::UnsupportedComplement, "sample set is not a round circle");

    auto lengths = [&](const LevelPath& path, int sub) {
        double hyp = 0.0, model_len = 0.0;
        for (std::size_t i = 0; i + 1 < path.w.size(); ++i) {
            const double r0 = path.r.empty() ? eps : path.r[i];
            const double r1 = path.r.empty() ? eps : path.r[i + 1];
            for (int k = 0; k < sub; ++k) {
                const double a = static_cast<double>(k) / sub, b = static_cast<double>(k + 1) / sub;
                const Complex wa = path.w[i] + a * (path.w[i + 1] - path.w[i]);
                const Complex wb = path.w[i] + b * (path.w[i + 1] - path.w[i]);
                const double ra = r0 + a * (r1 - r0), rb = r0 + b * (r1 - r0);
                hyp += hyp_dist(product_point(center, radius, wa, ra), product_point(center, radius, wb, rb));
                const Complex wm = 0.5 * (wa + wb);
                const double rm = 0.5 * (ra + rb);
                const double ds = 2.0 * std::abs(wb - wa) / (1.0 - std::norm(wm));
                model_len += std::hypot(rb - ra, std::cosh(rm) * ds);
            }
        }
        return std::pair<double, double>{hyp, model_len};
    };

    LevelMetricReport rep;
    rep.min_ratio = kInf;
    for (const auto& path : paths) {
        if (path.w.size() < 2) fail(ErrorCode::InvalidArgument, "path needs two samples");
        if (!path.r.empty() && path.r.size() != path.w.size())
            fail(ErrorCode::InvalidArgument, "path heights and points differ in length");
        for (std::size_t i = 0; i < path.w.size(); ++i) {
            const double r = path.r.empty() ? eps : path.r[i];
            if (!(std::abs(path.w[i]) < 1.0) || !(r >= 0.0))
                fail(ErrorCode::InvalidArgument, "path leaves the product region");
        }
        // Both sides are second-order sums; one Richardson step each.
        const auto [h1, m1] = lengths(path, subdivisions);
        const auto [h2, m2] = lengths(path, 2 * subdivisions);
        const double hyp = (4.0 * h2 - h1) / 3.0, mod = (4.0 * m2 - m1) / 3.0;
        const double ratio = hyp / mod;
        rep.ratios.push_back(ratio);
        rep.lengths.push_back(hyp);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    if (paths.empty()) rep.min_ratio = rep.max_ratio = 1.0;
    rep.bilipschitz = std::max(rep.max_ratio, 1.0 / rep.min_ratio);
    return rep;
}

SideSeparation side_separation(const HullModel& model, const std::vector<Complex>& bounded,
                               const std::vector<Complex>& unbounded, double t0, int samples) {
    SideSeparation out;
    out.bounded_min_distance = out.unbounded_min_distance = kInf;
    for (const auto& w : bounded) out.bounded_min_distance = std::min(out.bounded_min_distance, hull_distance(model, {w, t0}));
    for (const auto& w : unbounded)
        out.unbounded_min_distance = std::min(out.unbounded_min_distance, hull_distance(model, {w, t0}));
    for (const auto& b : bounded)
        for (const auto& u : unbounded) {
            ++out.pairs;
            // Geodesic through (b, t0) and (u, t0): semicircle about the midpoint.
            const Complex m = 0.5 * (b + u);
            const Complex half = 0.5 * (u - b);
            const double R = std::sqrt(std::norm(half) + t0 * t0);
            const Complex dir = half / std::abs(half);
            const double th0 = std::atan2(t0, -std::abs(half)), th1 = std::atan2(t0, std::abs(half));
            for (int k = 0; k <= samples; ++k) {
                const double th = th0 + (th1 - th0) * k / samples;
                if (in_hull(model, {m + dir * (R * std::cos(th)), R * std::sin(th)})) {
                    ++out.separated;
                    break;
                }
            }
        }
    return out;
}

HalfSpacePoint extend_homeo(const std::function<Complex(Complex)>& phi, const HalfSpacePoint& p,
                            const ExtendOptions& options) {
    if (!(p.t > 0.0)) fail(ErrorCode::InvalidArgument, "height must be positive");
    const int N = std::max(options.circle_resolution, 8);
    const Complex c = phi(p.z);
    std::vector<Complex> img(N);
    for (int k = 0; k < N; ++k) img[k] = phi(p.z + std::polar(p.t, 2.0 * kPi * k / N));
    const double tol = options.injectivity_tol * std::max(1.0, std::abs(c));
    const NearestGrid grid(img);
    for (int k = 0; k < N; ++k) {
        if (grid.within(img[k], tol).size() > 1 || std::abs(img[k] - c) <= tol)
            fail(ErrorCode::NotInjectiveOnCircle, "sampled circle images coincide");
    }
    auto g = [&](double th) { return std::abs(phi(p.z + std::polar(p.t, th)) - c); };
    int best = 0;
    for (int k = 1; k < N; ++k)
        if (std::abs(img[k] - c) > std::abs(img[best] - c)) best = k;
    double top = std::abs(img[best] - c);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 2.0 * kPi * (best - 1) / N, b = 2.0 * kPi * (best + 1) / N;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < options.refine_steps; ++i) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        }
    }
    top = std::max({top, f1, f2});
    return {c, top};
}

void write_obj(const HullModel& model, std::ostream& out, int subdivisions, double t_max) {
    const auto& P = model.points();
    const int s = std::max(subdivisions, 1);
    long next = 1;
    out << "# hull boundary\n";
    auto vertex = [&](Complex z, double t) {
        out << "v " << z.real() << ' ' << z.imag() << ' ' << std::min(t, t_max) << '\n';
        return next++;
    };
    for (std::size_t i = 0; i < model.triangles().size(); ++i) {
        const auto& T = model.triangles()[i];
        const auto& D = model.empty_disks()[i];
        const Complex a = P[T[0]], b = P[T[1]], c = P[T[2]];
        std::vector<std::vector<long>> id(s + 1);
        for (int u = 0; u <= s; ++u)
            for (int v = 0; u + v <= s; ++v) {
                const Complex z = a + (b - a) * (static_cast<double>(u) / s) + (c - a) * (static_cast<double>(v) / s);
                id[u].push_back(vertex(z, std::sqrt(std::max(0.0, D.radius * D.radius - std::norm(z - D.center)))));
            }
        for (int u = 0; u < s; ++u)
            for (int v = 0; u + v < s; ++v) {
                out << "f " << id[u][v] << ' ' << id[u + 1][v] << ' ' << id[u][v + 1] << '\n';
                if (u + v + 1 < s) out << "f " << id[u + 1][v] << ' ' << id[u + 1][v + 1] << ' ' << id[u][v + 1] << '\n';
            }
    }
    for (const auto& w : model.walls()) {
        const Complex a = P[w[0]], b = P[w[1]];
        long prev_lo = 0, prev_hi = 0;
        for (int k = 0; k <= s; ++k) {
            const Complex z = a + (b - a) * (static_cast<double>(k) / s);
            const double floor = std::sqrt(std::max(0.0, std::abs(z - a) * std::abs(b - z)));
            const long lo = vertex(z, floor), hi = vertex(z, t_max);
            if (k > 0) {
                out << "f " << prev_lo << ' ' << lo << ' ' << hi << '\n';
                out << "f " << prev_lo << ' ' << hi << ' ' << prev_hi << '\n';
            }
            prev_lo = lo;
            prev_hi = hi;
        }
    }
}

}  // namespace leaflab

#include "leaflab/scenery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"
#include "leaflab/parallel.hpp"

namespace leaflab {
namespace {

std::vector<Complex> clip(const std::vector<Complex>& pts, const Window& w) {
    std::vector<Complex> out;
    for (const auto& p : pts)
        if (w.contains(p)) out.push_back(p);
    return out;
}

std::vector<Complex> finite_points(const PointCloud& c) {
    std::vector<Complex> out;
    out.reserve(c.points.size());
    for (const auto& p : c.points)
        if (p.is_finite()) out.push_back(p.value());
    return out;
}

bool geometry_failure(const Error& e) {
    return e.code() == ErrorCode::PathThroughCriticalValue || e.code() == ErrorCode::TrackingDivergence ||
           e.code() == ErrorCode::UnsupportedChart || e.code() == ErrorCode::ZeroDerivative;
}

}  // namespace

std::string to_string(ConicalOutcome c) {
    return c == ConicalOutcome::ConicalEvidence ? "conical_evidence" : "not_conical_up_to_depth";
}

SceneryFrame rescaled_frame(const RationalMap& f, const BackwardOrbit& orbit, int n, const Window& window,
                            const FrameOptions& options) {
    verify_orbit(f, orbit, 1e-8);
    if (n < 0 || n > orbit.depth()) fail(ErrorCode::InvalidArgument, "frame depth outside the orbit");
    if (!(window.half_width > 0.0) || !std::isfinite(window.half_width)) fail(ErrorCode::InvalidArgument, "window must be bounded");
    for (int k = 0; k <= n; ++k)
        if (orbit.at(k).is_infinite()) fail(ErrorCode::UnsupportedChart, "orbit passes through infinity");
    const Complex scale = orbit_derivative(f, orbit, n);
    if (scale == Complex(0.0)) fail(ErrorCode::ZeroDerivative, "orbit passes through a critical point at or before level n");

    SceneryFrame frame;
    frame.orbit_depth = n;
    frame.window = window;
    frame.scale_log = options.scale_log;
    frame.scale = scale;
    frame.offset = orbit.at(n).value();
    frame.map_fingerprint = f.fingerprint();
    frame.cloud.source = CloudSource::Rescaled;
    frame.cloud.seed = options.seed;
    const double grow = std::exp(options.scale_log);
    const Complex z0 = orbit.at(0).value();

    // Mesh the preimage window z_-n + W / (e^t scale) by offsets and push it
    // forward with exact increments; each sample of J is then solved for
    // in offset coordinates by Newton from the nearest pushed vertex. This
    // picks points of J inside the window without choosing paths.
    auto push = [&](Complex s, Complex* deriv) {
        Complex e = s;
        Complex dv = 1.0;
        for (int k = n; k >= 1; --k) {
            const Complex zk = orbit.at(k).value();
            dv *= f.derivative(zk + e);
            e = f.increment(zk, e);
        }
        if (deriv) *deriv = dv;
        return e;
    };
    const int mesh = 64;
    const int side = mesh + 1;
    const Complex to_offset = 1.0 / (grow * scale);
    std::vector<Complex> src, img;
    for (int i = 0; i <= mesh; ++i)
        for (int j = 0; j <= mesh; ++j) {
            const Complex w = window.center + window.half_width * Complex(2.0 * j / mesh - 1.0, 2.0 * i / mesh - 1.0);
            src.push_back(w * to_offset);
            img.push_back(push(src.back(), nullptr));
        }
    const double spacing = 2.0 * window.half_width / mesh * std::abs(to_offset);

    // Image bounding boxes of the mesh cells, bucketed on a coarse grid.
    struct Cell {
        double x0, x1, y0, y1;
        Complex center;
    };
    std::vector<Cell> cells;
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (int i = 0; i < mesh; ++i)
        for (int j = 0; j < mesh; ++j) {
            Cell c{1e300, -1e300, 1e300, -1e300, 0.0};
            bool finite = true;
            for (int k : {i * side + j, i * side + j + 1, (i + 1) * side + j, (i + 1) * side + j + 1}) {
                const Complex v = img[static_cast<std::size_t>(k)];
                finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
                c.x0 = std::min(c.x0, v.real());
                c.x1 = std::max(c.x1, v.real());
                c.y0 = std::min(c.y0, v.imag());
                c.y1 = std::max(c.y1, v.imag());
            }
            if (!finite) continue;
            // Cell images bulge past the hull of their corners.
            const double pad = 0.25 * std::max(c.x1 - c.x0, c.y1 - c.y0);
            c.x0 -= pad;
            c.x1 += pad;
            c.y0 -= pad;
            c.y1 += pad;
            c.center = 0.5 * (src[static_cast<std::size_t>(i * side + j)] + src[static_cast<std::size_t>((i + 1) * side + j + 1)]);
            bx0 = std::min(bx0, c.x0);
            bx1 = std::max(bx1, c.x1);
            by0 = std::min(by0, c.y0);
            by1 = std::max(by1, c.y1);
            cells.push_back(c);
        }
    const int nb = 128;
    const double bw = std::max(bx1 - bx0, 1e-300) / nb;
    const double bh = std::max(by1 - by0, 1e-300) / nb;
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(nb * nb));
    std::vector<std::size_t> big;
    auto bucket_of = [&](double v, double lo, double w) { return std::clamp(static_cast<int>((v - lo) / w), 0, nb - 1); };
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& c = cells[k];
        const int i0 = bucket_of(c.x0, bx0, bw), i1 = bucket_of(c.x1, bx0, bw);
        const int j0 = bucket_of(c.y0, by0, bh), j1 = bucket_of(c.y1, by0, bh);
        if ((i1 - i0 + 1) * (j1 - j0 + 1) > nb * nb / 16) {
            big.push_back(k);
            continue;
        }
        for (int jj = j0; jj <= j1; ++jj)
            for (int ii = i0; ii <= i1; ++ii) buckets[static_cast<std::size_t>(jj * nb + ii)].push_back(k);
    }

    InverseIterationOptions io;
    io.mode = options.sampler;
    io.n_samples = options.n_samples;
    io.seed = options.seed;
    io.workers = options.workers;
    const auto samples = finite_points(julia_inverse_iteration(f, io));

    // A window that is not univalently covered can hold several preimages
    // of one sample, so Newton runs from every separate group of nearby
    // vertices.
    std::vector<std::vector<Complex>> lifted(samples.size());
    parallel_for(samples.size(), options.workers, [&](std::size_t i) {
        const Complex target = samples[i] - z0;
        if (target.real() < bx0 || target.real() > bx1 || target.imag() < by0 || target.imag() > by1) return;
        std::vector<std::size_t> cand;
        auto consider = [&](std::size_t k) {
            const auto& c = cells[k];
            if (target.real() >= c.x0 && target.real() <= c.x1 && target.imag() >= c.y0 && target.imag() <= c.y1) cand.push_back(k);
        };
        for (std::size_t k : buckets[static_cast<std::size_t>(bucket_of(target.imag(), by0, bh) * nb + bucket_of(target.real(), bx0, bw))])
            consider(k);
        for (std::size_t k : big) consider(k);
        std::vector<Complex> found;
        for (std::size_t c : cand) {
            bool near_found = false;
            for (const auto& s0 : found) near_found = near_found || std::abs(cells[c].center - s0) < 1.5 * spacing;
            if (near_found) continue;
            Complex s = cells[c].center;
            bool ok = false;
            for (int it = 0; it < 40; ++it) {
                Complex dv;
                const Complex e = push(s, &dv);
                if (dv == Complex(0.0) || !std::isfinite(e.real()) || !std::isfinite(e.imag())) break;
                const Complex step = (e - target) / dv;
                s -= step;
                if (std::abs(step * scale) <= 1e-13) {
                    ok = true;
                    break;
                }
            }
            if (!ok) continue;
            bool dup = false;
            for (const auto& s0 : found) dup = dup || std::abs((s - s0) * scale) < 1e-9;
            if (dup) continue;
            found.push_back(s);
            const Complex p = grow * scale * s;
            if (window.contains(p)) lifted[i].push_back(p);
        }
    });
    for (const auto& ps : lifted)
        for (const auto& p : ps) frame.cloud.points.emplace_back(p);
    return frame;
}
std::vector<SceneryFrame> flow_frames(const SceneryFrame& frame, const std::vector<double>& t_values) {
    std::vector<SceneryFrame> out;
    for (double t : t_values) {
        SceneryFrame g = frame;
        g.scale_log += t;
        g.cloud.points.clear();
        const double e = std::exp(t);
        for (const auto& p : frame.cloud.points) {
            const Complex q = e * p.value();
            if (g.window.contains(q)) g.cloud.points.emplace_back(q);
        }
        out.push_back(std::move(g));
    }
    return out;
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b, const Window& window) {
    const auto ca = clip(a, window);
    const auto cb = clip(b, window);
    if (ca.empty() || cb.empty()) fail(ErrorCode::EmptyAfterClip, "a cloud is empty inside the window");
    const NearestGrid ga(ca);
    const NearestGrid gb(cb);
    double h = 0.0;
    for (const auto& p : ca) h = std::max(h, gb.distance(p));
    for (const auto& p : cb) h = std::max(h, ga.distance(p));
    return h;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b, const Window& window) {
    return hausdorff_distance(finite_points(a), finite_points(b), window);
}

double julia_distance_estimate(const RationalMap& f, Complex z, const std::vector<SpherePoint>& cloud, int max_n) {
    // Repelling or parabolic cycles lie in J.
    {
        SpherePoint w = z;
        for (int p = 1; p <= 8; ++p) {
            w = f(w);
            if (w.is_infinite()) break;
            if (std::abs(w.value() - z) <= 1e-12 * (1.0 + std::abs(z))) {
                std::vector<SpherePoint> pts{z};
                SpherePoint v = z;
                for (int j = 1; j < p; ++j) pts.push_back(v = f(v));
                if (std::abs(cycle_multiplier(f, pts)) >= 1.0 - 1e-9) return 0.0;
                break;
            }
        }
    }
    std::vector<Complex> pts;
    for (const auto& p : cloud)
        if (p.is_finite()) pts.push_back(p.value());
    const NearestGrid grid(pts);
    const double escape = f.is_polynomial() ? default_escape_radius(f.as_polynomial()) : 1e6;
    double best = grid.distance(z);
    Complex w = z;
    Complex deriv = 1.0;
    for (int n = 1; n <= max_n && best > 0.0; ++n) {
        deriv *= f.derivative(w);
        const SpherePoint next = f(w);
        // Rounding pushes orbits of J off it eventually; stop once escaped.
        if (next.is_infinite() || std::abs(next.value()) > escape) break;
        w = next.value();
        if (deriv == Complex(0.0)) break;
        best = std::min(best, grid.distance(w) / std::abs(deriv));
    }
    return best;
}

ConicalVerdict conical_test(const RationalMap& f, const SpherePoint& z0, double r, int degree_bound, int depth,
                            const ConicalOptions& options) {
    if (!(r > 0.0) || degree_bound < 1 || depth < 1) fail(ErrorCode::InvalidArgument, "need r > 0, degree_bound >= 1, depth >= 1");
    if (z0.is_infinite()) fail(ErrorCode::UnsupportedChart, "z0 must be finite");
    InverseIterationOptions io;
    io.mode = SamplerMode::Cover;
    io.n_samples = options.cloud_samples;
    io.seed = options.seed;
    const auto cloud = julia_inverse_iteration(f, io);

    ConicalVerdict v;
    v.radius = r;
    v.degree_bound = degree_bound;
    v.depth = depth;
    v.julia_distance = julia_distance_estimate(f, z0.value(), cloud.points);
    if (!(v.julia_distance <= options.julia_tol))
        fail(ErrorCode::PreconditionEvidenceFailure, "z0 is not within " + std::to_string(options.julia_tol) + " of J");

    std::vector<SpherePoint> forward{z0};
    for (int k = 1; k <= depth; ++k) {
        forward.push_back(f(forward.back()));
        if (forward.back().is_infinite()) fail(ErrorCode::UnsupportedChart, "forward orbit reaches infinity");
    }

    PullbackOptions po;
    po.resolution = options.resolution;
    po.max_degree = degree_bound;
    v.degrees.assign(static_cast<std::size_t>(depth), 0);
    parallel_for(static_cast<std::size_t>(depth), options.workers, [&](std::size_t i) {
        const int n = static_cast<int>(i) + 1;
        BackwardOrbit o = make_orbit(f, forward[static_cast<std::size_t>(n)]);
        for (int k = n - 1; k >= 0; --k) o = extend_backward_toward(f, o, forward[static_cast<std::size_t>(k)]);
        try {
            const auto trace = pullback_disk(f, o, r, po);
            const long long deg = trace.levels.back().cumulative_degree;
            if (deg > degree_bound) {
                v.degrees[i] = degree_bound + 1;
            } else if (!trace.truncated) {
                v.degrees[i] = deg;
            }
        } catch (const Error& e) {
            if (!geometry_failure(e)) throw;
        }
    });

    const int first = options.burn_in + 1;
    const int tested = depth - first + 1;
    if (tested <= 0) return v;
    const int tail_start = depth - std::max(1, static_cast<int>(std::ceil(options.tail_fraction * tested))) + 1;
    bool tail_hit = false;
    for (int n = first; n <= depth; ++n) {
        const long long d = v.degrees[static_cast<std::size_t>(n - 1)];
        if (d >= 1 && d <= degree_bound) {
            v.witnesses.push_back(n);
            if (n >= tail_start) tail_hit = true;
        }
    }
    v.hit_rate = static_cast<double>(v.witnesses.size()) / tested;
    v.verdict = v.hit_rate >= options.hit_rate && tail_hit ? ConicalOutcome::ConicalEvidence : ConicalOutcome::NotConicalUpToDepth;
    return v;
}

}  // namespace leaflab

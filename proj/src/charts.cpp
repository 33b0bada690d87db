#include "leaflab/charts.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"
#include "leaflab/parallel.hpp"

namespace leaflab {
namespace {

constexpr int kSeriesOrder = 16;

void require_fixed(const RationalMap& f, Complex alpha) {
    const SpherePoint image = f(alpha);
    if (image.is_infinite() || std::abs(image.value() - alpha) > 1e-9 * (1.0 + std::abs(alpha)))
        fail(ErrorCode::InvalidArgument, to_string(alpha) + " is not a fixed point");
}

// Dual stopping: small and still contracting, or already at rounding level.
bool settled(const std::vector<double>& trace, double tol, double scale) {
    if (trace.empty()) return false;
    const double last = trace.back();
    if (!(last < tol * scale)) return false;
    if (last <= 1e-14 * scale) return true;
    return trace.size() >= 2 && trace[trace.size() - 2] > 0.0 && last / trace[trace.size() - 2] < 0.9;
}

Complex eval_series(const std::vector<Complex>& b, Complex u) {
    Complex acc = 0.0;
    for (std::size_t k = b.size(); k-- > 1;) acc = (acc + b[k]) * u;
    return acc;
}

class Koenigs {
public:
    Koenigs(const RationalMap& f, Complex alpha) : f_(f), alpha_(alpha) {
        require_fixed(f, alpha);
        lambda_ = f.derivative(alpha);
        if (!(std::abs(lambda_) > 1.0)) fail(ErrorCode::NotRepelling, "|f'(alpha)| = " + std::to_string(std::abs(lambda_)));
        radius_ = koenigs_radius(f, alpha);
        const auto a = f.taylor_at(alpha, kSeriesOrder);
        const auto n = static_cast<std::size_t>(kSeriesOrder);
        // powers[j][m] = [w^m] F(w)^j, F(w) = sum_{k>=1} a_k w^k.
        std::vector<std::vector<Complex>> powers(n + 1, std::vector<Complex>(n + 1, 0.0));
        for (std::size_t m = 1; m <= n; ++m) powers[1][m] = a[m];
        for (std::size_t j = 2; j <= n; ++j)
            for (std::size_t m = j; m <= n; ++m)
                for (std::size_t k = 1; k + j - 1 <= m; ++k) powers[j][m] += a[k] * powers[j - 1][m - k];
        series_.assign(n + 1, 0.0);
        series_[1] = 1.0;
        for (std::size_t m = 2; m <= n; ++m) {
            Complex t = 0.0;
            for (std::size_t j = 1; j < m; ++j) t += series_[j] * powers[j][m];
            series_[m] = t / (lambda_ - std::pow(lambda_, static_cast<double>(m)));
        }
    }

    Complex lambda() const { return lambda_; }
    double radius() const { return radius_; }

    ChartValue value(Complex z, const LimitOptions& options) const {
        ChartValue out;
        Complex u = z - alpha_;
        if (u == Complex(0.0)) return out;
        if (std::abs(u) >= radius_)
            fail(ErrorCode::InvalidArgument, "z lies outside the linearization disk of radius " + std::to_string(radius_));
        Complex scale = 1.0;
        Complex prev = eval_series(series_, u);
        for (int n = 1; n <= options.max_iter; ++n) {
            const bool local = std::abs(u) < 0.05 * radius_;
            Complex x0 = local ? u / lambda_ : track_segment(f_, alpha_, alpha_ + u, alpha_) - alpha_;
            u = newton_increment(f_, alpha_, u, x0);
            scale *= lambda_;
            const Complex cur = scale * eval_series(series_, u);
            out.trace.push_back(std::abs(cur - prev));
            out.value = cur;
            out.iterations = n;
            out.residual = out.trace.back();
            prev = cur;
            if (u == Complex(0.0) || settled(out.trace, options.tol, std::max(1.0, std::abs(cur)))) return out;
        }
        fail(ErrorCode::ConvergenceBudgetExceeded,
             "Koenigs limit not settled after " + std::to_string(options.max_iter) + " steps, residual " +
                 std::to_string(out.residual));
    }

private:
    const RationalMap& f_;
    Complex alpha_;
    Complex lambda_;
    double radius_ = 0.0;
    std::vector<Complex> series_;
};

}  // namespace

double koenigs_radius(const RationalMap& f, Complex alpha) {
    double best = 1e8;
    for (const Complex& v : finite_critical_values(f)) best = std::min(best, std::abs(v - alpha));
    return 0.95 * best;
}

ChartValue koenigs_chart(const RationalMap& f, Complex alpha, Complex z, const LimitOptions& options) {
    return Koenigs(f, alpha).value(z, options);
}

double koenigs_residual(const RationalMap& f, Complex alpha, Complex z, const LimitOptions& options) {
    const Koenigs k(f, alpha);
    const SpherePoint fz = f(z);
    if (fz.is_infinite()) fail(ErrorCode::InvalidArgument, "f(z) is infinite");
    return std::abs(k.value(fz.value(), options).value - k.lambda() * k.value(z, options).value);
}

ChartValue bottcher_chart(const RationalMap& f, const SpherePoint& alpha, const SpherePoint& z, const LimitOptions& options) {
    if (alpha.is_infinite()) {
        const SpherePoint u = z.is_infinite() ? SpherePoint(0.0) : SpherePoint(1.0 / z.value());
        if (u.is_infinite()) fail(ErrorCode::InvalidArgument, "z = 0 is the other end of the chart");
        return bottcher_chart(f.inverted(), 0.0, u, options);
    }
    if (z.is_infinite()) fail(ErrorCode::InvalidArgument, "z must be finite for a finite superattracting point");
    const Complex a0 = alpha.value();
    require_fixed(f, a0);
    if (std::abs(f.derivative(a0)) > 1e-10) fail(ErrorCode::NotSuperattracting, "f'(alpha) != 0");
    const auto c = f.taylor_at(a0, f.degree());
    double scale = 0.0;
    for (const auto& x : c) scale = std::max(scale, std::abs(x));
    int k = 2;
    while (k <= f.degree() && std::abs(c[static_cast<std::size_t>(k)]) <= 1e-12 * scale) ++k;
    if (k > f.degree()) fail(ErrorCode::NotSuperattracting, "no leading term at alpha");
    const Complex a = c[static_cast<std::size_t>(k)];
    const Complex b = std::exp(std::log(a) / static_cast<double>(k - 1));

    ChartValue out;
    const Complex h0 = z.value() - a0;
    if (h0 == Complex(0.0)) return out;
    Complex h = h0;
    Complex log_sum = 0.0;
    double weight = 1.0;
    for (int n = 0; n < options.max_iter; ++n) {
        weight /= k;
        const Complex next = f.increment(a0, h);
        const Complex r = next / (a * std::pow(h, k));
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || r == Complex(0.0))
            fail(ErrorCode::ConvergenceBudgetExceeded, "Böttcher product left the basin");
        const Complex term = std::log(r) * weight;
        log_sum += term;
        out.value = b * h0 * std::exp(log_sum);
        out.trace.push_back(std::abs(term) * std::abs(out.value));
        out.residual = out.trace.back();
        out.iterations = n + 1;
        h = next;
        if (h == Complex(0.0) || settled(out.trace, options.tol, std::max(1.0, std::abs(out.value)))) return out;
    }
    fail(ErrorCode::ConvergenceBudgetExceeded, "Böttcher product not settled, residual " + std::to_string(out.residual));
}

ChartValue fatou_coordinate(const RationalMap& f, Complex alpha, Petal petal, Complex z, const FatouOptions& options) {
    require_fixed(f, alpha);
    const Complex lambda = f.derivative(alpha);
    if (classify_multiplier(lambda) != CycleClass::Parabolic) fail(ErrorCode::NotParabolic, "multiplier " + to_string(lambda));
    int q = 1;
    while (q <= RationalMap::kMaxRootOfUnityOrder && std::abs(std::pow(lambda, q) - 1.0) > RationalMap::kParabolicTol) ++q;
    const RationalMap g = q == 1 ? f : f.iterate(q);
    const auto c = g.taylor_at(alpha, 3);
    const Complex a = c[2];
    if (std::abs(a) < 1e-10)
        fail(ErrorCode::UnsupportedChart, "parabolic point with more than one attracting petal");
    const Complex shape = 1.0 - c[3] / (a * a);
    const bool attracting = petal == Petal::Attracting;

    auto step = [&](Complex h) {
        if (attracting) return g.increment(alpha, h);
        return newton_increment(g, alpha, h, h - a * h * h);
    };
    auto chart = [&](Complex h) {
        const Complex w = -1.0 / (a * h);
        return attracting ? w - shape * std::log(w) : w - shape * std::log(-w);
    };

    Complex h = z - alpha;
    if (h == Complex(0.0)) fail(ErrorCode::NotInPetal, "z is the parabolic point");
    {
        Complex t = h;
        for (int j = 0; j < options.drift_steps; ++j) {
            const Complex next = step(t);
            if (!(std::abs(next) < std::abs(t))) fail(ErrorCode::NotInPetal, "orbit does not drift toward alpha");
            t = next;
        }
    }

    std::vector<int> checkpoints;
    for (int m = options.depth; m >= 1; m /= 2) checkpoints.push_back(m);
    std::reverse(checkpoints.begin(), checkpoints.end());
    ChartValue out;
    std::vector<Complex> values;
    std::size_t next_cp = 0;
    const double sign = attracting ? -1.0 : 1.0;
    for (int n = 1; n <= options.depth; ++n) {
        h = step(h);
        if (h == Complex(0.0) || !std::isfinite(h.real())) fail(ErrorCode::ConvergenceBudgetExceeded, "orbit collapsed");
        if (n == checkpoints[next_cp]) {
            values.push_back(chart(h) + sign * static_cast<double>(n));
            if (values.size() >= 2) out.trace.push_back(std::abs(values.back() - values[values.size() - 2]));
            ++next_cp;
        }
    }
    out.value = values.back();
    out.iterations = options.depth;
    out.residual = out.trace.empty() ? 0.0 : out.trace.back();
    if (!settled(out.trace, options.tol, 1.0))
        fail(ErrorCode::ConvergenceBudgetExceeded, "Fatou coordinate not settled at depth " + std::to_string(options.depth) +
                                                         ", residual " + std::to_string(out.residual));
    return out;
}

BackwardOrbit lift_along_leaf(const RationalMap& f, const BackwardOrbit& base, const BackwardOrbit& prefix, int depth,
                              const TrackOptions& track) {
    if (depth > base.depth()) fail(ErrorCode::InvalidArgument, "base orbit is shorter than the requested depth");
    BackwardOrbit out = prefix;
    const int start = prefix.depth();
    if (start > depth) {
        out.points.resize(static_cast<std::size_t>(depth) + 1);
        out.branch_choices.resize(static_cast<std::size_t>(depth));
        out.local_degrees.resize(static_cast<std::size_t>(depth));
        return out;
    }
    if (out.at(start).is_infinite() || base.at(start).is_infinite())
        fail(ErrorCode::UnsupportedChart, "leaf lift through infinity");
    Complex d = out.at(start).value() - base.at(start).value();
    for (int n = start; n < depth; ++n) {
        if (base.at(n + 1).is_infinite()) fail(ErrorCode::UnsupportedChart, "base orbit passes through infinity");
        const Complex zn = base.at(n + 1).value();
        d = lift_offset(f, zn, base.at(n).value(), d, track);
        out.points.emplace_back(zn + d);
        out.branch_choices.push_back(-1);
        out.local_degrees.push_back(1);
    }
    return out;
}

double geometric_rate(const std::vector<double>& residuals, std::size_t from) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t j = from; j < residuals.size(); ++j) {
        if (!(residuals[j] > 0.0)) continue;
        const double x = static_cast<double>(j);
        const double y = std::log(residuals[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::exp(slope);
}

ChartProbe affine_chart(const RationalMap& f, const BackwardOrbit& base, const std::vector<BackwardOrbit>& queries, int depth,
                        const AffineOptions& options) {
    verify_orbit(f, base, 1e-8);
    if (depth < 1 || depth > base.depth()) fail(ErrorCode::InvalidArgument, "depth must lie in [1, base depth]");
    for (const auto& p : base.points)
        if (p.is_infinite()) fail(ErrorCode::UnsupportedChart, "base orbit passes through infinity");

    // Leaf evidence is gathered to a moderate depth; deeper pullbacks are
    // below the resolution of the boundary polygons.
    const int check_depth = std::max(2, std::min(depth, 24));
    BackwardOrbit head = base;
    head.points.resize(static_cast<std::size_t>(std::min(check_depth, base.depth())) + 1);
    head.branch_choices.resize(head.points.size() - 1);
    head.local_degrees.resize(head.points.size() - 1);
    PullbackTrace trace;
    const auto verdict = regularity_test(f, head, options.radius_schedule, options.pullback, &trace);
    if (!verdict.regular_up_to_depth)
        fail(ErrorCode::PreconditionEvidenceFailure, "base orbit failed the regularity test: " + verdict.note);
    const int level = *verdict.first_univalent_level;
    if (level >= depth) fail(ErrorCode::InvalidArgument, "depth does not reach past the first univalent level");

    ChartProbe probe;
    probe.base_orbit = base;
    probe.depth = depth;
    probe.normalization_level = level;
    probe.radius = verdict.radius;
    probe.queries = queries;
    Complex acc = 1.0;
    for (int n = level; n <= depth; ++n) {
        if (n > level) acc *= f.derivative(base.at(n).value());
        if (acc == Complex(0.0)) fail(ErrorCode::ZeroDerivative, "base tail passes through a critical point past the univalent level");
        probe.alpha.push_back(acc);
        probe.beta.push_back(base.at(n).value());
    }

    const std::size_t nq = queries.size();
    probe.values.assign(nq, 0.0);
    probe.residuals.assign(nq, {});
    std::vector<int> conv(nq, 0);
    std::vector<int> koebe(nq, 1);
    parallel_for(nq, options.workers, [&](std::size_t qi) {
        const BackwardOrbit& q = queries[qi];
        if (q.depth() < level)
            fail(ErrorCode::InvalidArgument, "query must supply its points up to level " + std::to_string(level));
        for (int n = 0; n <= std::min(q.depth(), depth); ++n)
            if (q.at(n).is_infinite()) fail(ErrorCode::UnsupportedChart, "query passes through infinity");
        for (int n = 0; n < std::min(q.depth(), level); ++n)
            if (spherical_dist(f(q.at(n + 1)), q.at(n)) > 1e-8) fail(ErrorCode::InvalidArgument, "query prefix is not an orbit");

        auto check_inside = [&](int n, Complex zeta) {
            if (options.check_leaf && n < static_cast<int>(trace.levels.size()) &&
                winding_number(trace.levels[static_cast<std::size_t>(n)].boundary, zeta) == 0)
                fail(ErrorCode::LeafMismatch, "query leaves the base pullback at level " + std::to_string(n));
        };
        for (int n = 0; n <= level; ++n) check_inside(n, q.at(n).value());

        Complex d = q.at(level).value() - base.at(level).value();
        Complex prev = probe.alpha[0] * d;
        auto& res = probe.residuals[qi];
        for (int n = level + 1; n <= depth; ++n) {
            const Complex zn = base.at(n).value();
            d = lift_offset(f, zn, base.at(n - 1).value(), d, options.pullback.track);
            const Complex zeta = zn + d;
            check_inside(n, zeta);
            if (n <= q.depth() && spherical_dist(q.at(n), zeta) > 1e-8)
                fail(ErrorCode::LeafMismatch, "query point at level " + std::to_string(n) + " is not on the base leaf");
            const Complex cur = probe.alpha[static_cast<std::size_t>(n - level)] * d;
            res.push_back(std::abs(cur - prev));
            prev = cur;
        }
        probe.values[qi] = prev;
        conv[qi] = settled(res, options.tol, std::max(1.0, std::abs(prev)));
        if (level == 0) {
            const double r = probe.radius;
            const double t = std::abs(q.at(0).value() - base.at(0).value()) / r;
            const double v = std::abs(prev);
            const double slack = 1e-9 * std::max(1.0, v);
            koebe[qi] = t < 1.0 && v >= r * t / ((1 + t) * (1 + t)) - slack && v <= r * t / ((1 - t) * (1 - t)) + slack;
        }
    });
    probe.converged.assign(conv.begin(), conv.end());
    probe.koebe_ok.assign(koebe.begin(), koebe.end());
    return probe;
}

Complex branch_root(Complex v, int k, double base_angle) {
    if (v == Complex(0.0)) return 0.0;
    double d = std::arg(v) - base_angle;
    d = std::remainder(d, 2.0 * kPi);
    if (kPi - std::abs(d) < 1e-12) fail(ErrorCode::BranchTrackingFailure, "value lies on the branch cut");
    return std::polar(std::pow(std::abs(v), 1.0 / k), (base_angle + d) / k);
}

OrbifoldChart orbifold_chart(const ChartProbe& base, int k, const std::set<long long>* profile) {
    if (k < 2) fail(ErrorCode::InvalidArgument, "branch degree must be >= 2");
    if (profile && !profile->count(k)) fail(ErrorCode::InvalidArgument, "k is not in the branching profile");
    OrbifoldChart out;
    out.base = base;
    out.branch_degree = k;
    for (const Complex& v : base.values)
        if (v != Complex(0.0)) {
            out.base_angle = std::arg(v);
            break;
        }
    for (const Complex& v : base.values) out.values.push_back(branch_root(v, k, out.base_angle));
    return out;
}

std::vector<LeafComponent> leaf_component_ratios(const RationalMap& f, Complex alpha, Complex center, double radius,
                                                 std::size_t count, int max_level, int resolution) {
    const Koenigs chart(f, alpha);
    PullbackOptions po;
    po.resolution = resolution;
    Lifter lifter(f, po);
    const LimitOptions lim;

    std::vector<LeafComponent> found;
    std::vector<std::pair<std::shared_ptr<Curve>, int>> current{{Lifter::circle(center, radius, resolution), 1}};
    Complex scale = 1.0;
    for (int level = 0; level <= max_level; ++level) {
        for (const auto& [curve, degree] : current) {
            const auto poly = curve->polygon();
            bool inside = true;
            for (const auto& w : poly) inside = inside && std::abs(w - alpha) < chart.radius();
            if (!inside || winding_number(poly, alpha) != 0) continue;
            LeafComponent comp;
            comp.level = level;
            comp.local_degree = degree;
            for (const auto& w : poly) comp.boundary.push_back(scale * chart.value(w, lim).value);
            comp.distance = 1e300;
            for (const auto& w : comp.boundary) comp.distance = std::min(comp.distance, std::abs(w));
            for (std::size_t i = 0; i < comp.boundary.size(); ++i)
                for (std::size_t j = i + 1; j < comp.boundary.size(); ++j)
                    comp.diameter = std::max(comp.diameter, std::abs(comp.boundary[i] - comp.boundary[j]));
            comp.ratio = comp.diameter / comp.distance;
            Complex centroid = 0.0;
            for (const auto& w : comp.boundary) centroid += w;
            centroid /= static_cast<double>(comp.boundary.size());
            bool duplicate = false;
            for (const auto& g : found) {
                Complex c2 = 0.0;
                for (const auto& w : g.boundary) c2 += w;
                c2 /= static_cast<double>(g.boundary.size());
                if (std::abs(c2 - centroid) < 0.05 * std::max(g.diameter, comp.diameter)) duplicate = true;
            }
            if (!duplicate) found.push_back(std::move(comp));
        }
        if (level == max_level) break;
        std::vector<std::pair<std::shared_ptr<Curve>, int>> next;
        for (const auto& [curve, degree] : current) {
            try {
                for (const auto& c : lifter.lift_all(curve)) next.emplace_back(c.curve, degree * c.local_degree);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::PathThroughCriticalValue && e.code() != ErrorCode::TrackingDivergence &&
                    e.code() != ErrorCode::UnsupportedChart)
                    throw;
            }
        }
        current.swap(next);
        scale *= chart.lambda();
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
    if (found.size() > count) found.resize(count);
    return found;
}

}  // namespace leaflab

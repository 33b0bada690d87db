#include "leaflab/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"

namespace leaflab {
namespace {

constexpr int kParamShift = 20;

std::int64_t wrap(std::int64_t s, std::int64_t period) {
    s %= period;
    return s < 0 ? s + period : s;
}

}  // namespace

std::vector<Complex> Curve::polygon() const {
    std::vector<Complex> out;
    out.reserve(nodes.size());
    for (const auto& [s, v] : nodes) out.push_back(v);
    return out;
}

Lifter::Lifter(const RationalMap& f, PullbackOptions options) : f_(f), options_(options) {
    critical_values_ = finite_critical_values(f);
    for (const auto& c : f.critical_points())
        if (c.point.is_finite()) finite_critical_.push_back(c);
}

std::shared_ptr<Curve> Lifter::circle(Complex center, double radius, int resolution) {
    if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
    if (resolution < 3) fail(ErrorCode::InvalidArgument, "boundary resolution must be at least 3");
    auto c = std::make_shared<Curve>();
    c->center = center;
    c->radius = radius;
    c->period = static_cast<std::int64_t>(resolution) << kParamShift;
    for (int i = 0; i < resolution; ++i)
        c->nodes.emplace(static_cast<std::int64_t>(i) << kParamShift,
                         center + std::polar(radius, 2.0 * kPi * i / resolution));
    return c;
}

Complex Lifter::value_at(Curve& c, std::int64_t s) {
    s = wrap(s, c.period);
    if (auto it = c.nodes.find(s); it != c.nodes.end()) return it->second;
    if (!c.parent) {
        const double angle = 2.0 * kPi * static_cast<double>(s) / static_cast<double>(c.period);
        const Complex v = c.center + std::polar(c.radius, angle);
        c.nodes.emplace(s, v);
        return v;
    }
    // Continue from the previous node along the parent between the two parameters.
    auto it = c.nodes.lower_bound(s);
    std::int64_t from;
    Complex start;
    if (it == c.nodes.begin()) {
        from = c.nodes.rbegin()->first - c.period;
        start = c.nodes.rbegin()->second;
    } else {
        --it;
        from = it->first;
        start = it->second;
    }
    const auto path = parent_path(*c.parent, from, s);
    Complex w = start;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        check_clear_of_critical_values(critical_values_, path[i], path[i + 1], options_.track.eta);
        w = track_segment(f_, path[i], path[i + 1], w, options_.track);
    }
    c.nodes.emplace(s, w);
    return w;
}

std::vector<Complex> Lifter::parent_path(Curve& parent, std::int64_t from, std::int64_t to) {
    const std::int64_t lp = parent.period;
    const std::int64_t a = wrap(from, lp);
    const std::int64_t span = to - from;
    std::vector<Complex> path{value_at(parent, a)};
    const Complex end = value_at(parent, a + span);
    // Parent nodes strictly between a and a + span, possibly wrapping past 0.
    auto collect = [&](std::int64_t lo, std::int64_t hi) {
        for (auto it = parent.nodes.upper_bound(lo); it != parent.nodes.end() && it->first < hi; ++it)
            path.push_back(it->second);
    };
    if (a + span <= lp) {
        collect(a, a + span);
    } else {
        collect(a, lp);
        if (auto z = parent.nodes.find(0); z != parent.nodes.end() && a + span > lp) path.push_back(z->second);
        collect(0, a + span - lp);
    }
    path.push_back(end);
    return path;
}

void Lifter::clear_parent(Curve& parent) {
    // Refine chords that pass close to a critical value relative to their
    // length, so the polygon and the curve it samples pass on the same side.
    for (int round = 0; round < 64; ++round) {
        std::vector<std::int64_t> mids;
        for (auto it = parent.nodes.begin(); it != parent.nodes.end(); ++it) {
            auto next = std::next(it);
            const std::int64_t s1 = next == parent.nodes.end() ? parent.period + parent.nodes.begin()->first : next->first;
            const Complex b = next == parent.nodes.end() ? parent.nodes.begin()->second : next->second;
            const double len = std::abs(b - it->second);
            for (const auto& v : critical_values_) {
                const double d = segment_distance(v, it->second, b);
                if (d < 0.5 * len && s1 - it->first >= 2) {
                    mids.push_back(it->first + (s1 - it->first) / 2);
                    break;
                }
            }
        }
        if (mids.empty()) break;
        for (auto m : mids) value_at(parent, m);
    }
    for (auto it = parent.nodes.begin(); it != parent.nodes.end(); ++it) {
        auto next = std::next(it);
        const Complex b = next == parent.nodes.end() ? parent.nodes.begin()->second : next->second;
        check_clear_of_critical_values(critical_values_, it->second, b, options_.track.eta);
    }
}

std::vector<Complex> Lifter::lift_sheet(Curve& parent, Complex start) {
    std::vector<Complex> vals;
    vals.reserve(parent.nodes.size() + 1);
    vals.push_back(start);
    Complex w = start;
    auto it = parent.nodes.begin();
    Complex prev = it->second;
    for (++it; it != parent.nodes.end(); ++it) {
        w = track_segment(f_, prev, it->second, w, options_.track);
        vals.push_back(w);
        prev = it->second;
    }
    w = track_segment(f_, prev, parent.nodes.begin()->second, w, options_.track);
    vals.push_back(w);
    return vals;
}

namespace {

std::size_t nearest(const std::vector<SpherePoint>& pre, Complex z) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pre.size(); ++i)
        if (spherical_dist(pre[i], z) < spherical_dist(pre[best], z)) best = i;
    return best;
}

}  // namespace

std::vector<Component> Lifter::lift_all(const std::shared_ptr<Curve>& parent) {
    std::vector<Component> out;
    clear_parent(*parent);
    if (parent->nodes.begin()->first != 0) value_at(*parent, 0);
    const Complex p0 = parent->nodes.begin()->second;
    const auto pre = f_.preimages(p0);
    for (const auto& q : pre)
        if (q.is_infinite()) fail(ErrorCode::UnsupportedChart, "a preimage of the boundary lies at infinity");
    std::vector<bool> used(pre.size(), false);
    std::vector<std::int64_t> params;
    for (const auto& [s, v] : parent->nodes) params.push_back(s);

    for (std::size_t j = 0; j < pre.size(); ++j) {
        if (used[j]) continue;
        std::vector<std::vector<Complex>> sheets;
        std::size_t cur = j;
        do {
            if (used[cur]) fail(ErrorCode::TrackingDivergence, "boundary monodromy is not a permutation");
            used[cur] = true;
            auto vals = lift_sheet(*parent, pre[cur].value());
            const Complex end = vals.back();
            vals.pop_back();
            sheets.push_back(std::move(vals));
            const std::size_t next = nearest(pre, end);
            if (spherical_dist(pre[next], end) > 1e-7)
                fail(ErrorCode::TrackingDivergence, "lifted loop did not close on a preimage");
            cur = next;
        } while (cur != j);

        auto child = std::make_shared<Curve>();
        child->parent = parent;
        child->period = parent->period * static_cast<std::int64_t>(sheets.size());
        for (std::size_t t = 0; t < sheets.size(); ++t)
            for (std::size_t i = 0; i < params.size(); ++i)
                child->nodes.emplace(static_cast<std::int64_t>(t) * parent->period + params[i], sheets[t][i]);
        refine(*child);
        out.push_back({child, static_cast<int>(sheets.size())});
    }
    return out;
}

Component Lifter::lift_containing(const std::shared_ptr<Curve>& parent, Complex anchor) {
    clear_parent(*parent);
    if (parent->nodes.begin()->first != 0) value_at(*parent, 0);
    const Complex p0 = parent->nodes.begin()->second;
    const auto pre = f_.preimages(p0);
    for (const auto& q : pre)
        if (q.is_infinite()) fail(ErrorCode::UnsupportedChart, "a preimage of the boundary lies at infinity");
    std::vector<std::size_t> order(pre.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(pre[a].value() - anchor) < std::abs(pre[b].value() - anchor);
    });
    std::vector<bool> used(pre.size(), false);
    std::vector<std::int64_t> params;
    for (const auto& [s, v] : parent->nodes) params.push_back(s);

    for (std::size_t j : order) {
        if (used[j]) continue;
        std::vector<std::vector<Complex>> sheets;
        std::size_t cur = j;
        do {
            if (used[cur]) fail(ErrorCode::TrackingDivergence, "boundary monodromy is not a permutation");
            used[cur] = true;
            auto vals = lift_sheet(*parent, pre[cur].value());
            const Complex end = vals.back();
            vals.pop_back();
            sheets.push_back(std::move(vals));
            const std::size_t next = nearest(pre, end);
            if (spherical_dist(pre[next], end) > 1e-7)
                fail(ErrorCode::TrackingDivergence, "lifted loop did not close on a preimage");
            cur = next;
        } while (cur != j);
        std::vector<Complex> poly;
        for (const auto& s : sheets) poly.insert(poly.end(), s.begin(), s.end());
        if (winding_number(poly, anchor) == 0) continue;

        auto child = std::make_shared<Curve>();
        child->parent = parent;
        child->period = parent->period * static_cast<std::int64_t>(sheets.size());
        for (std::size_t t = 0; t < sheets.size(); ++t)
            for (std::size_t i = 0; i < params.size(); ++i)
                child->nodes.emplace(static_cast<std::int64_t>(t) * parent->period + params[i], sheets[t][i]);
        refine(*child);
        return {child, static_cast<int>(sheets.size())};
    }
    fail(ErrorCode::TrackingDivergence, "no lifted component encloses the anchor " + to_string(anchor));
}

void Lifter::refine(Curve& c) {
    for (int round = 0; round < options_.refine_rounds; ++round) {
        if (c.nodes.size() >= options_.max_nodes) return;
        std::vector<double> gaps;
        std::vector<std::pair<std::int64_t, std::int64_t>> spans;
        gaps.reserve(c.nodes.size());
        for (auto it = c.nodes.begin(); it != c.nodes.end(); ++it) {
            auto next = std::next(it);
            const bool last = next == c.nodes.end();
            const Complex b = last ? c.nodes.begin()->second : next->second;
            const std::int64_t s1 = last ? c.period + c.nodes.begin()->first : next->first;
            gaps.push_back(std::abs(b - it->second));
            spans.emplace_back(it->first, s1);
        }
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const double threshold = options_.refine_ratio * sorted[sorted.size() / 2];
        std::vector<std::int64_t> mids;
        for (std::size_t i = 0; i < gaps.size(); ++i)
            if (gaps[i] > threshold && spans[i].second - spans[i].first >= 2)
                mids.push_back(spans[i].first + (spans[i].second - spans[i].first) / 2);
        if (mids.empty()) return;
        for (auto m : mids) {
            if (c.nodes.size() >= options_.max_nodes) return;
            value_at(c, m);
        }
    }
}

std::vector<CriticalPoint> critical_points_inside(const RationalMap& f, const std::vector<Complex>& polygon) {
    std::vector<CriticalPoint> out;
    for (const auto& c : f.critical_points())
        if (c.point.is_finite() && winding_number(polygon, c.point.value()) != 0) out.push_back(c);
    return out;
}

PullbackTrace pullback_disk(const RationalMap& f, const BackwardOrbit& orbit, double radius,
                            const PullbackOptions& options, int depth) {
    verify_orbit(f, orbit, 1e-8);
    if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
    const int n_levels = depth < 0 ? orbit.depth() : std::min(depth, orbit.depth());
    if (orbit.at(0).is_infinite()) fail(ErrorCode::UnsupportedChart, "the base point must be finite");

    Lifter lifter(f, options);
    PullbackTrace trace;
    trace.base_radius = radius;
    trace.resolution = options.resolution;

    auto curve = Lifter::circle(orbit.at(0).value(), radius, options.resolution);
    auto record = [&](int level, const Curve& c, int local_degree, long long cumulative) {
        PullbackLevel lv;
        lv.level = level;
        lv.anchor = orbit.at(level);
        lv.boundary = c.polygon();
        lv.diameter = spherical_diameter(lv.boundary);
        lv.critical_points_inside = critical_points_inside(f, lv.boundary);
        lv.local_degree = local_degree;
        lv.cumulative_degree = cumulative;
        int mult = 0;
        for (const auto& cp : lv.critical_points_inside) mult += cp.multiplicity;
        lv.hurwitz_consistent = level == 0 || local_degree == 1 + mult;
        trace.levels.push_back(std::move(lv));
    };
    record(0, *curve, 1, 1);

    long long cumulative = 1;
    for (int n = 1; n <= n_levels; ++n) {
        if (orbit.at(n).is_infinite()) fail(ErrorCode::UnsupportedChart, "orbit point at infinity");
        const Component comp = lifter.lift_containing(curve, orbit.at(n).value());
        cumulative *= comp.local_degree;
        curve = comp.curve;
        record(n, *curve, comp.local_degree, cumulative);
        if (cumulative > options.max_degree) {
            trace.truncated = true;
            trace.truncation_reason = "cumulative degree " + std::to_string(cumulative) + " exceeds budget " +
                                      std::to_string(options.max_degree) + " at level " + std::to_string(n);
            break;
        }
        if (curve->nodes.size() >= options.max_nodes) {
            trace.truncated = true;
            trace.truncation_reason = "boundary node budget reached at level " + std::to_string(n);
            break;
        }
    }
    return trace;
}

}  // namespace leaflab

#include "leaflab/julia.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <unordered_map>

#include "leaflab/errors.hpp"
#include "leaflab/parallel.hpp"

namespace leaflab {

std::string to_string(CloudSource s) {
    switch (s) {
        case CloudSource::InverseIteration: return "inverse_iteration";
        case CloudSource::EscapeBoundary: return "escape_boundary";
        case CloudSource::Rescaled: return "rescaled";
    }
    return "unknown";
}

namespace {

struct CellKey {
    std::int64_t x, y;
    int chart;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        return std::hash<std::int64_t>()(k.x * 0x9e3779b97f4a7c15LL ^ k.y) ^ static_cast<std::size_t>(k.chart);
    }
};

CellKey cell_of(const SpherePoint& p, double h) {
    if (p.is_infinite()) return {0, 0, 2};
    Complex z = p.value();
    int chart = 0;
    if (std::abs(z) > 1.0) {
        z = 1.0 / z;
        chart = 1;
    }
    return {static_cast<std::int64_t>(std::floor(z.real() / h)), static_cast<std::int64_t>(std::floor(z.imag() / h)),
            chart};
}

PointCloud cover_sample(const RationalMap& f, const InverseIterationOptions& options) {
    std::mt19937_64 rng(mix_seed(options.seed, 0xc0de));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SpherePoint z = std::polar(options.start_radius * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
    for (int k = 0; k < std::max(options.burn_in, 1); ++k) {
        const auto pre = f.preimages(z);
        z = pre[std::uniform_int_distribution<std::size_t>(0, pre.size() - 1)(rng)];
    }

    PointCloud cloud;
    cloud.source = CloudSource::InverseIteration;
    cloud.seed = options.seed;
    auto& out = cloud.points;
    double h = 0.1;
    std::deque<SpherePoint> queue{z};
    std::unordered_map<CellKey, int, CellHash> occupied;
    auto push_preimages = [&](const SpherePoint& w) {
        auto pre = f.preimages(w);
        std::shuffle(pre.begin(), pre.end(), rng);
        for (const auto& q : pre) queue.push_back(q);
    };
    while (out.size() < options.n_samples) {
        if (queue.empty()) {
            if (h < 1e-12) break;
            // Exhausted at this resolution: refine and restart from every
            // point emitted so far.
            h *= 0.5;
            occupied.clear();
            for (const auto& p : out) occupied[cell_of(p, h)] = 1;
            for (const auto& p : out) push_preimages(p);
            continue;
        }
        const SpherePoint w = queue.front();
        queue.pop_front();
        int& count = occupied[cell_of(w, h)];
        if (count > 0) continue;
        count = 1;
        out.push_back(w);
        push_preimages(w);
    }
    return cloud;
}

}  // namespace

PointCloud julia_inverse_iteration(const RationalMap& f, const InverseIterationOptions& options) {
    if (options.mode == SamplerMode::Cover) return cover_sample(f, options);
    if (options.chains < 1) fail(ErrorCode::InvalidArgument, "need at least one chain");
    const auto chains = static_cast<std::size_t>(options.chains);
    std::vector<std::vector<SpherePoint>> per_chain(chains);

    parallel_for(chains, options.workers, [&](std::size_t c) {
        const std::size_t count = options.n_samples / chains + (c < options.n_samples % chains ? 1 : 0);
        std::mt19937_64 rng(mix_seed(options.seed, c));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        SpherePoint z = std::polar(options.start_radius * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
        auto& out = per_chain[c];
        out.reserve(count);
        const std::size_t total = count + static_cast<std::size_t>(std::max(options.burn_in, 0));
        for (std::size_t k = 0; k < total; ++k) {
            const auto pre = f.preimages(z);
            std::uniform_int_distribution<std::size_t> pick(0, pre.size() - 1);
            z = pre[pick(rng)];
            if (k >= total - count) out.push_back(z);
        }
    });

    PointCloud cloud;
    cloud.source = CloudSource::InverseIteration;
    cloud.seed = options.seed;
    cloud.points.reserve(options.n_samples);
    for (auto& chain : per_chain) cloud.points.insert(cloud.points.end(), chain.begin(), chain.end());
    return cloud;
}

Complex pixel_center(const Window& w, int resolution, int row, int col) {
    const double step = 2.0 * w.half_width / resolution;
    return {w.center.real() - w.half_width + (col + 0.5) * step, w.center.imag() + w.half_width - (row + 0.5) * step};
}

double default_escape_radius(const Polynomial& p) {
    const int d = p.degree();
    const double lead = std::abs(p.leading());
    double sum = 0.0;
    for (int i = 0; i < d; ++i) sum += std::abs(p.coeff(i));
    return 2.0 + sum / lead + std::pow(2.0 / lead, 1.0 / (d - 1));
}

std::int32_t escape_count(const Polynomial& p, Complex z, int max_iter, double escape_radius) {
    const double r2 = escape_radius * escape_radius;
    for (int n = 0; n < max_iter; ++n) {
        if (std::norm(z) > r2) return n;
        z = p(z);
    }
    return max_iter;
}

EscapeRaster escape_time_grid(const RationalMap& f, const Window& window, int resolution, int max_iter,
                              std::optional<double> escape_radius, int workers) {
    if (!f.is_polynomial()) fail(ErrorCode::NotAPolynomial, "escape-time rendering needs a polynomial map");
    if (resolution < 1 || max_iter < 1) fail(ErrorCode::InvalidArgument, "resolution and max_iter must be positive");
    const Polynomial p = f.as_polynomial();
    EscapeRaster out;
    out.resolution = resolution;
    out.max_iter = max_iter;
    out.window = window;
    out.escape_radius = escape_radius.value_or(default_escape_radius(p));
    out.counts.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    parallel_for(static_cast<std::size_t>(resolution), workers, [&](std::size_t row) {
        const int r = static_cast<int>(row);
        for (int c = 0; c < resolution; ++c)
            out.counts[row * resolution + c] = escape_count(p, pixel_center(window, resolution, r, c), max_iter,
                                                            out.escape_radius);
    });
    return out;
}

namespace {

// Newton refinement of a point of period p, evaluated by iteration.
SpherePoint refine_periodic(const RationalMap& f, SpherePoint x, int p) {
    if (x.is_infinite()) return x;
    Complex z = x.value();
    for (int it = 0; it < 20; ++it) {
        Complex w = z;
        Complex dw = 1.0;
        for (int i = 0; i < p; ++i) {
            Complex fv, df, ddf;
            f.eval_derivs(w, fv, df, ddf);
            dw *= df;
            w = fv;
        }
        if (!std::isfinite(std::abs(w)) || dw == Complex(1.0)) break;
        const Complex step = (w - z) / (dw - 1.0);
        if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3) break;
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

}  // namespace

PostcriticalReport postcritical_scan(const RationalMap& f, int depth, double merge_tol, double recurrence_tol) {
    if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be at least 1");
    PostcriticalReport report;
    report.depth = depth;
    report.merge_tol = merge_tol;
    report.recurrence_tol = recurrence_tol;
    report.finite = true;

    auto add_unique = [&](std::vector<SpherePoint>& set, const SpherePoint& p) {
        for (const auto& q : set)
            if (spherical_dist(p, q) < merge_tol) return;
        set.push_back(p);
    };

    for (const auto& cp : f.critical_points()) {
        CriticalOrbit co;
        co.critical_point = cp.point;
        co.multiplicity = cp.multiplicity;
        co.orbit.push_back(cp.point);
        int land_i = -1;
        int land_p = 0;
        for (int k = 1; k <= depth && land_i < 0; ++k) {
            const SpherePoint next = f(co.orbit.back());
            co.orbit.push_back(next);
            for (int j = 0; j < k; ++j) {
                if (spherical_dist(next, co.orbit[static_cast<std::size_t>(j)]) < merge_tol) {
                    land_i = j;
                    land_p = k - j;
                    break;
                }
            }
        }
        for (std::size_t k = 1; k < co.orbit.size(); ++k)
            if (spherical_dist(co.orbit[k], cp.point) < recurrence_tol) co.recurrent = true;
        for (std::size_t k = 1; k < co.orbit.size(); ++k) add_unique(report.postcritical_set, co.orbit[k]);

        if (land_i >= 0) {
            co.preperiod = land_i;
            CycleInfo cyc;
            cyc.period = land_p;
            SpherePoint x = refine_periodic(f, co.orbit[static_cast<std::size_t>(land_i)], land_p);
            for (int k = 0; k < land_p; ++k) {
                cyc.points.push_back(x);
                x = f(x);
            }
            cyc.multiplier = cycle_multiplier(f, cyc.points);
            cyc.cls = classify_multiplier(cyc.multiplier);
            std::optional<std::size_t> idx;
            for (std::size_t c = 0; c < report.landing_cycles.size() && !idx; ++c)
                for (const auto& q : report.landing_cycles[c].points)
                    if (spherical_dist(q, cyc.points.front()) < 1e-7) idx = c;
            if (!idx) {
                report.landing_cycles.push_back(cyc);
                idx = report.landing_cycles.size() - 1;
            }
            co.landing_cycle = idx;
            const CycleClass cls = report.landing_cycles[*idx].cls;
            // Settling onto a non-superattracting attracting or a neutral
            // cycle is convergence, not landing.
            if (cls == CycleClass::Attracting || cls == CycleClass::Parabolic ||
                cls == CycleClass::IrrationallyIndifferent)
                report.finite = false;
        } else {
            report.finite = false;
        }
        report.orbits.push_back(std::move(co));
    }
    std::stable_sort(report.postcritical_set.begin(), report.postcritical_set.end(), canonical_less);
    return report;
}

std::vector<SpherePoint> exclusion_evidence(const RationalMap& f, const PostcriticalReport& report, int cycle_period) {
    std::vector<SpherePoint> out;
    for (int p = 1; p <= cycle_period; ++p) {
        double budget = 1.0;
        for (int i = 0; i < p; ++i) budget *= f.degree();
        if (budget > kCycleBudget) break;
        for (const auto& c : find_cycles(f, p))
            if (c.cls == CycleClass::Parabolic) out.insert(out.end(), c.points.begin(), c.points.end());
    }
    for (const auto& c : report.landing_cycles)
        if (c.cls == CycleClass::Parabolic) out.insert(out.end(), c.points.begin(), c.points.end());
    for (const auto& o : report.orbits) {
        if (!o.recurrent) continue;
        const std::size_t start = o.orbit.size() / 2;
        out.insert(out.end(), o.orbit.begin() + static_cast<std::ptrdiff_t>(start), o.orbit.end());
    }
    return out;
}

}  // namespace leaflab

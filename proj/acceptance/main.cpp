// Acceptance run: one line per criterion, exit status 1 if any fails.
// Tolerances and time budgets are fixed here and printed with each line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "leaflab/charts.hpp"
#include "leaflab/errors.hpp"
#include "leaflab/hull3.hpp"
#include "leaflab/scenery.hpp"

using namespace leaflab;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

BackwardOrbit fixed_lift(const RationalMap& f, Complex alpha, int depth) {
    BackwardOrbit o = make_orbit(f, alpha);
    for (int i = 0; i < depth; ++i) o = extend_backward_toward(f, o, alpha);
    return o;
}

BackwardOrbit julia_orbit(const RationalMap& f, int depth, std::uint64_t seed) {
    InverseIterationOptions opt;
    opt.n_samples = 1;
    opt.chains = 1;
    opt.seed = seed;
    const auto cloud = julia_inverse_iteration(f, opt);
    std::mt19937_64 rng(seed);
    return extend_random(f, make_orbit(f, cloud.points[0]), depth, rng);
}

std::vector<Complex> finite(const PointCloud& c) {
    std::vector<Complex> out;
    for (const auto& p : c.points) out.push_back(p.value());
    return out;
}

std::vector<Complex> circle(int n) {
    std::vector<Complex> out;
    for (int k = 0; k < n; ++k) out.push_back(std::polar(1.0, 2.0 * kPi * k / n));
    return out;
}

// Random point in the hyperbolic ball of radius rho_max about (0, h).
HalfSpacePoint ball_point(std::mt19937_64& rng, double h, double rho_max) {
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double x = n01(rng), y = n01(rng), z = n01(rng);
    const double norm = std::sqrt(x * x + y * y + z * z);
    const double rho = rho_max * u01(rng);
    return {h * std::sinh(rho) * Complex(x, y) / norm, h * (std::cosh(rho) + std::sinh(rho) * z / norm)};
}

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

Outcome chebyshev_segment() {
    InverseIterationOptions opt;
    opt.n_samples = 10000;
    const auto cloud = julia_inverse_iteration(chebyshev(2), opt);
    double worst = 0.0;
    for (const auto& p : cloud.points) {
        const Complex z = p.value();
        const double x = std::clamp(z.real(), -1.0, 1.0);
        worst = std::max(worst, std::abs(z - Complex(x, 0.0)));
    }
    return {cloud.points.size() == 10000 && worst < 1e-6, fmt("samples=%zu max_dist=%.2e tol=1e-6", cloud.points.size(), worst)};
}

Outcome koenigs_grid() {
    double worst = 0.0;
    for (auto [c, alpha] : {std::pair<double, double>{0.0, 1.0}, {-1.0, kGolden}}) {
        const auto f = quadratic(c);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const Complex z = alpha + Complex(-0.1 + 0.02 * i + 0.001, -0.1 + 0.02 * j + 0.001);
                worst = std::max(worst, koenigs_residual(f, alpha, z));
            }
    }
    return {worst < 1e-8, fmt("points=200 max_residual=%.2e tol=1e-8", worst)};
}

Outcome affine_equivariance() {
    double worst = 0.0, worst_rate = 0.0;
    bool all_converged = true;
    for (double c : {0.0, -1.0}) {
        const auto f = quadratic(c);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto base = julia_orbit(f, 50, seed);
            const auto shifted = shift_forward(f, base);
            std::mt19937_64 rng(seed + 1000);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::vector<BackwardOrbit> queries, pushed;
            for (int i = 0; i < 10; ++i) {
                const Complex zeta = base.at(0).value() + std::polar(0.001 * (1 + 2 * u(rng)), 2 * kPi * u(rng));
                queries.push_back(make_orbit(f, zeta));
                pushed.push_back(shift_forward(f, queries.back()));
            }
            const auto probe = affine_chart(f, base, queries, 48);
            const auto probe_f = affine_chart(f, shifted, pushed, 49);
            const Complex df = f.derivative(base.at(0).value());
            for (std::size_t q = 0; q < queries.size(); ++q) {
                all_converged = all_converged && probe.converged[q] && probe.koebe_ok[q];
                const double scale = std::max(1.0, std::abs(probe_f.values[q]));
                worst = std::max(worst, std::abs(probe_f.values[q] - df * probe.values[q]) / scale);
                worst_rate = std::max(worst_rate, geometric_rate(probe.residuals[q], 0));
            }
        }
    }
    return {all_converged && worst < 1e-6 && worst_rate < 0.9,
            fmt("queries=400 max_rel_residual=%.2e tol=1e-6 max_decay_rate=%.3f tol=0.9", worst, worst_rate)};
}

Outcome fatou_abel() {
    const RationalMap f(Polynomial{0.0, 1.0, 1.0});
    FatouOptions opt;
    opt.depth = 10000;
    double worst = 0.0;
    int n = 0;
    for (double x : {-0.03, -0.05, -0.08, -0.1, -0.12})
        for (double y : {-0.01, 0.015}) {
            const Complex z(x, y);
            const auto a = fatou_coordinate(f, 0.0, Petal::Attracting, z, opt);
            const auto b = fatou_coordinate(f, 0.0, Petal::Attracting, f(z).value(), opt);
            worst = std::max(worst, std::abs(b.value - a.value - 1.0));
            ++n;
        }
    return {worst < 1e-4, fmt("points=%d depth=10000 max_residual=%.2e tol=1e-4", n, worst)};
}

Outcome shrinking() {
    const auto f = quadratic(-1.0);
    double worst30 = 0.0;
    bool decreasing = true;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto orbit = julia_orbit(f, 30, seed);
        const auto trace = pullback_disk(f, orbit, 0.05);
        if (trace.levels.size() != 31) return {false, fmt("seed=%llu truncated", static_cast<unsigned long long>(seed))};
        worst30 = std::max(worst30, trace.levels[30].diameter);
        decreasing = decreasing && trace.levels[30].diameter < trace.levels[5].diameter;
    }
    return {worst30 < 1e-3 && decreasing,
            fmt("orbits=50 max_diam30=%.2e tol=1e-3 below_diam5=%s", worst30, decreasing ? "yes" : "no")};
}

Outcome scenery() {
    const Window unit{{0.0, 0.0}, 1.0};
    const auto f = quadratic(0.0);
    const auto frame = rescaled_frame(f, fixed_lift(f, 1.0, 12), 6, unit);
    std::vector<Complex> segment;
    for (int k = -1000; k <= 1000; ++k) segment.emplace_back(0.0, k / 1000.0);
    const double tangent = hausdorff_distance(finite(frame.cloud), segment, unit);

    const auto b = quadratic(-1.0);
    InverseIterationOptions io;
    io.n_samples = 3;
    io.chains = 1;
    io.seed = 11;
    std::mt19937_64 rng(4);
    FrameOptions opt;
    opt.n_samples = 40000;
    double equi = 0.0;
    for (const auto& z : julia_inverse_iteration(b, io).points) {
        const auto orbit = extend_random(b, make_orbit(b, z), 12, rng);
        const auto up = shift_forward(b, orbit);
        const Complex df = b.derivative(orbit.at(0).value());
        const auto lhs = rescaled_frame(b, up, 9, unit, opt);
        const auto rhs = rescaled_frame(b, orbit, 8, Window{{0.0, 0.0}, 1.5 / std::abs(df)}, opt);
        std::vector<Complex> pushed;
        for (const auto& p : rhs.cloud.points) pushed.push_back(df * p.value());
        equi = std::max(equi, hausdorff_distance(finite(lhs.cloud), pushed, unit));
    }
    return {tangent < 0.05 && equi < 0.02, fmt("tangent_hausdorff=%.4f tol=0.05 equivariance=%.4f tol=0.02", tangent, equi)};
}

Outcome conical() {
    const auto f = quadratic(-1.0);
    InverseIterationOptions io;
    io.mode = SamplerMode::Cover;
    io.n_samples = 100;
    io.seed = 7;
    const auto pts = julia_inverse_iteration(f, io).points;
    int pass = 0;
    for (const auto& z : pts)
        if (conical_test(f, z, 0.05, 4, 40).verdict == ConicalOutcome::ConicalEvidence) ++pass;
    return {pass == 100 && pts.size() == 100, fmt("conical=%d/%zu r=0.05 degree<=4 depth=40", pass, pts.size())};
}

Outcome hull_closed_forms() {
    const auto E = circle(1440);
    const HullModel m(E);
    const double d1 = hull_distance(m, {2.0, 1.0}), d2 = hull_distance(m, {0.0, 0.5});
    const double roof = roof_height(m, 0.0);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0), h(0.0, 3.0);
    std::vector<HalfSpacePoint> probes;
    while (probes.size() < 100) {
        const Complex z(u(rng), u(rng));
        if (std::abs(z) >= 1.0) continue;
        probes.push_back({z, roof_height(m, z) + h(rng)});
    }
    const double gap = curtain_gap(m, E, probes);
    const double e1 = std::abs(d1 - std::acosh(std::sqrt(2.0))), e2 = std::abs(d2 - std::log(2.0));
    const double e3 = std::abs(roof - 1.0);
    return {e1 < 1e-4 && e2 < 1e-4 && e3 < 5e-3 && gap < 1.0,
            fmt("err(2,1)=%.1e err(0,1/2)=%.1e tol=1e-4 roof_err=%.1e tol=5e-3 curtain_gap=%.3f tol=1", e1, e2, e3, gap)};
}

Outcome hull_stability_check() {
    const auto E = circle(360);
    const HullModel m(E);
    std::mt19937_64 rng(61);
    std::vector<HalfSpacePoint> probes;
    for (int i = 0; i < 50; ++i) probes.push_back(ball_point(rng, 2.0, 2.0));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> jittered;
    for (const auto& e : E) {
        Complex d;
        do d = Complex(u(rng), u(rng));
        while (std::abs(d) > 1.0);
        jittered.push_back(e + 0.01 * d);
    }
    const double jitter = hull_stability(m, HullModel(jittered), probes);

    std::vector<Complex> R, RE;
    for (int i = 0; i < 50; ++i) R.emplace_back(u(rng), u(rng));
    const Complex rot = std::polar(1.0, 0.7), shift(0.3, -0.2);
    for (const auto& e : R) RE.push_back(rot * e + shift);
    const HullModel a(R), b(RE);
    double iso = 0.0;
    for (int i = 0; i < 50; ++i) {
        const HalfSpacePoint p = ball_point(rng, 1.0, 2.5);
        iso = std::max(iso, std::abs(hull_distance(a, p) - hull_distance(b, {rot * p.z + shift, p.t})));
    }
    return {jitter <= 0.05 && iso < 1e-9, fmt("jitter_change=%.4f tol=0.05 isometry_err=%.1e tol=1e-9", jitter, iso)};
}

Outcome extension() {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * kPi);
    double sim_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Complex a = 2.0 * Complex(u(rng), u(rng)), b(u(rng), u(rng));
        if (std::abs(a) < 0.1) continue;
        const HalfSpacePoint p{Complex(u(rng), u(rng)), 0.1 + std::abs(u(rng))};
        const auto e = extend_homeo([&](Complex z) { return a * z + b; }, p);
        sim_err = std::max({sim_err, std::abs(e.z - (a * p.z + b)), std::abs(e.t - std::abs(a) * p.t)});
    }
    int good = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::tuple<Complex, Complex, double>> waves;
        for (int k = 0; k < 3; ++k) waves.emplace_back(0.1 * std::polar(1.0, ang(rng)), Complex(2 * u(rng), 2 * u(rng)), ang(rng));
        auto phi = [waves](Complex z) {
            Complex out = z;
            for (const auto& [amp, freq, ph] : waves) out += amp * std::sin(std::real(std::conj(freq) * z) + ph);
            return out;
        };
        const Complex z(u(rng), u(rng));
        double prev = 0.0;
        bool ok = true;
        for (double t = 0.05; t < 3.0; t *= 1.3) {
            const auto e = extend_homeo(phi, {z, t});
            ok = ok && e.z == phi(z) && e.t > prev;
            prev = e.t;
        }
        good += ok;
    }
    return {sim_err < 1e-12 && good == 100, fmt("similarity_err=%.1e tol=1e-12 monotone_vertical=%d/100", sim_err, good)};
}

Outcome branching() {
    const auto f = chebyshev(2);
    for (const auto& c : find_cycles(f, 1)) {
        if (c.points[0].is_infinite() || std::abs(c.points[0].value() - 1.0) > 1e-9) continue;
        const auto profile = branching_profile(f, c, 8);
        std::string s;
        for (auto d : profile) s += (s.empty() ? "" : ",") + std::to_string(d);
        return {profile == std::set<long long>{1, 2}, "profile={" + s + "} expected={1,2} depth=8"};
    }
    return {false, "fixed point 1 not found"};
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"chebyshev-julia-segment", 1.0, chebyshev_segment},
        {"koenigs-functional-equation", 1.0, koenigs_grid},
        {"affine-chart-equivariance", 10.0, affine_equivariance},
        {"fatou-abel-equation", 5.0, fatou_abel},
        {"pullback-shrinking", 30.0, shrinking},
        {"scenery-tangent-line", 5.0, scenery},
        {"conical-points-basilica", 120.0, conical},
        {"hull-closed-forms", 10.0, hull_closed_forms},
        {"hull-stability", 10.0, hull_stability_check},
        {"extension-of-homeomorphisms", 5.0, extension},
        {"branching-profile", 5.0, branching},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.ok && secs < c.budget_s;
        failures += !ok;
        std::printf("%s %2zu %-28s %s time=%.2fs budget=%.0fs\n", ok ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs,
                    c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

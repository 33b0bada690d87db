#include "leaflab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leaflab/errors.hpp"

namespace leaflab {

double segment_distance(Complex c, Complex a, Complex b) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(c - a);
    const double t = std::clamp(std::real((c - a) * std::conj(ab)) / len2, 0.0, 1.0);
    return std::abs(c - (a + t * ab));
}

std::vector<Complex> finite_critical_values(const RationalMap& f) {
    std::vector<Complex> out;
    for (const auto& v : f.critical_values())
        if (v.is_finite()) out.push_back(v.value());
    return out;
}

void check_clear_of_critical_values(const std::vector<Complex>& critical_values, Complex a, Complex b, double eta) {
    for (const auto& v : critical_values) {
        const double d = segment_distance(v, a, b);
        if (d < eta)
            fail(ErrorCode::PathThroughCriticalValue, "path passes within " + std::to_string(d) +
                                                          " of critical value " + to_string(v));
    }
}

Complex track_segment(const RationalMap& f, Complex a, Complex b, Complex start, const TrackOptions& opt) {
    Complex w = start;
    double s = 0.0;
    double h = 1.0;
    const Complex dp = b - a;
    if (dp == Complex(0.0)) return w;
    while (s < 1.0) {
        h = std::min(h, 1.0 - s);
        if (h < opt.min_step) fail(ErrorCode::TrackingDivergence, "step size collapsed near " + to_string(w));
        Complex fv, df, ddf;
        f.eval_derivs(w, fv, df, ddf);
        if (df == Complex(0.0)) fail(ErrorCode::TrackingDivergence, "derivative vanished at " + to_string(w));
        const double s_next = s + h;
        const Complex target = s_next >= 1.0 ? b : a + s_next * dp;
        // Predictor: Newton step from the current point toward the new target,
        // which also absorbs the residual of the previous corrector.
        const Complex dw = (target - fv) / df;
        if (std::abs(dw) * std::abs(ddf) > opt.safety * std::abs(df)) {
            h *= 0.5;
            continue;
        }
        Complex x = w + dw;
        bool ok = false;
        double last = std::abs(dw);
        for (int it = 0; it < 8; ++it) {
            f.eval_derivs(x, fv, df, ddf);
            if (df == Complex(0.0)) break;
            const Complex step = (target - fv) / df;
            const double m = std::abs(step);
            if (!std::isfinite(m) || m > 0.5 * last + opt.newton_tol * (1.0 + std::abs(x))) {
                // Stagnation at rounding level near a small derivative.
                ok = it > 0 && last <= 1e-10 * (1.0 + std::abs(x));
                break;
            }
            x += step;
            last = m;
            if (m <= opt.newton_tol * (1.0 + std::abs(x))) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            h *= 0.5;
            continue;
        }
        if (std::abs(x) > RationalMap::kChartSwitch)
            fail(ErrorCode::TrackingDivergence, "continued branch left the finite chart");
        w = x;
        s = s_next;
        h *= 2.0;
    }
    return w;
}

Complex continue_inverse_along_path(const RationalMap& f, std::span<const Complex> path, Complex start,
                                    const TrackOptions& options) {
    if (path.empty()) fail(ErrorCode::InvalidArgument, "empty path");
    const SpherePoint image = f(start);
    if (spherical_dist(image, path.front()) > 1e-8)
        fail(ErrorCode::InvalidArgument, "start is not a preimage of the path's first point");
    const auto cvs = finite_critical_values(f);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) check_clear_of_critical_values(cvs, path[i], path[i + 1], options.eta);
    Complex w = start;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) w = track_segment(f, path[i], path[i + 1], w, options);
    return w;
}

Complex newton_increment(const RationalMap& f, Complex z, Complex d, Complex x) {
    for (int it = 0; it < 40; ++it) {
        const Complex step = (f.increment(z, x) - d) / f.derivative(z + x);
        x -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
    }
    return x;
}

Complex lift_offset(const RationalMap& f, Complex z_next, Complex z_cur, Complex d, const TrackOptions& track) {
    if (d == Complex(0.0)) return 0.0;
    Complex fz, df, ddf;
    f.eval_derivs(z_next, fz, df, ddf);
    if (df == Complex(0.0)) fail(ErrorCode::ZeroDerivative, "lift through a critical point");
    Complex x0;
    const bool local = std::abs(d) * std::abs(ddf) < 0.05 * std::norm(df);
    if (local) {
        x0 = d / df;
    } else {
        x0 = track_segment(f, z_cur, z_cur + d, z_next, track) - z_next;
    }
    Complex x = newton_increment(f, z_next, d, x0);
    if (std::abs(f.increment(z_next, x) - d) > 1e-10 * std::abs(d) || !std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        if (local) {
            x0 = track_segment(f, z_cur, z_cur + d, z_next, track) - z_next;
            x = newton_increment(f, z_next, d, x0);
        }
        if (std::abs(f.increment(z_next, x) - d) > 1e-10 * std::abs(d))
            fail(ErrorCode::TrackingDivergence, "offset lift did not converge");
    }
    return x;
}

}  // namespace leaflab

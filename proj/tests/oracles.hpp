#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;

inline double chordal(C a, C b) {
    return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

// Textbook quadratic formula; fine for the well-separated cases tested.
inline std::vector<C> quadratic_roots(C a, C b, C c) {
    const C s = std::sqrt(b * b - 4.0 * a * c);
    return {(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)};
}

// Cos-form Chebyshev value, valid on [-1, 1].
inline double chebyshev_cos(int d, double x) { return std::cos(d * std::acos(std::clamp(x, -1.0, 1.0))); }

// Numerical derivative by central differences.
template <class F>
C central_diff(F f, C z, double h = 1e-6) {
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

inline double hyp_dist(C z1, double t1, C z2, double t2) {
    return std::acosh(1.0 + (std::norm(z1 - z2) + (t1 - t2) * (t1 - t2)) / (2.0 * t1 * t2));
}

// Distance from a point to the segment [a, b].
inline double dist_to_segment(C p, C a, C b) {
    const C ab = b - a;
    double t = std::real((p - a) * std::conj(ab)) / std::norm(ab);
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

// Brute-force golden-section minimization of a unimodal function on [lo, hi].
template <class F>
double golden_min(F f, double lo, double hi, int iters = 200) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < iters; ++i) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return f(0.5 * (a + b));
}

}  // namespace oracle

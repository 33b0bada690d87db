#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace leaflab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// A point of the Riemann sphere: a finite complex number or the point at infinity.
class SpherePoint {
public:
    SpherePoint() = default;
    SpherePoint(Complex z) : value_(z) {}  // NOLINT(google-explicit-constructor)
    SpherePoint(double x) : value_(x, 0.0) {}  // NOLINT(google-explicit-constructor)

    static SpherePoint infinity() {
        SpherePoint p;
        p.infinite_ = true;
        return p;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// Finite value; meaningless for the point at infinity.
    Complex value() const { return value_; }

    bool operator==(const SpherePoint& other) const {
        if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
        return value_ == other.value_;
    }

private:
    Complex value_{0.0, 0.0};
    bool infinite_ = false;
};

/// Chordal metric 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), extended to infinity.
inline double spherical_dist(const SpherePoint& z, const SpherePoint& w) {
    if (z.is_infinite() && w.is_infinite()) return 0.0;
    if (z.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(w.value()));
    if (w.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(z.value()));
    const Complex a = z.value();
    const Complex b = w.value();
    return 2.0 * std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

std::string to_string(const SpherePoint& p);
std::string to_string(Complex z);

}  // namespace leaflab

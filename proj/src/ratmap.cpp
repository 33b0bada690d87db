#include "leaflab/ratmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "leaflab/errors.hpp"
#include "leaflab/roots.hpp"

namespace leaflab {
namespace {

constexpr double kTrimTol = 1e-13;
constexpr double kClusterTol = 1e-6;
constexpr double kCriticalClusterTol = 1e-5;

Complex quotient_derivative(const Polynomial& a, const Polynomial& b, Complex x) {
    const Complex bv = b(x);
    return (a.derivative()(x) * bv - a(x) * b.derivative()(x)) / (bv * bv);
}

Polynomial normalized(const Polynomial& p) {
    const double m = p.max_abs_coeff();
    return m > 0.0 ? Complex(1.0 / m) * p : p;
}

std::uint64_t fnv1a(const Polynomial& p, std::uint64_t h) {
    for (const Complex& c : p.coeffs()) {
        double parts[2] = {c.real(), c.imag()};
        unsigned char bytes[sizeof parts];
        std::memcpy(bytes, parts, sizeof parts);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    // Separator so (a)(b,c) and (a,b)(c) differ.
    h ^= 0xff;
    h *= 0x100000001b3ULL;
    return h;
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

std::string to_string(CycleClass c) {
    switch (c) {
        case CycleClass::Attracting: return "attracting";
        case CycleClass::Superattracting: return "superattracting";
        case CycleClass::Repelling: return "repelling";
        case CycleClass::Parabolic: return "parabolic";
        case CycleClass::IrrationallyIndifferent: return "irrationally-indifferent";
    }
    return "unknown";
}

bool canonical_less(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_finite() && b.is_infinite();
    const double ka = std::round(a.value().real() * 1e9);
    const double kb = std::round(b.value().real() * 1e9);
    if (ka != kb) return ka < kb;
    return a.value().imag() < b.value().imag();
}

RationalMap::RationalMap(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) fail(ErrorCode::InvalidMap, "denominator is identically zero");
    degree_ = std::max(num_.degree(), den_.degree());
    if (degree_ < 2) fail(ErrorCode::InvalidMap, "degree must be at least 2, got " + std::to_string(degree_));
    if (num_.degree() >= 1 && den_.degree() >= 1) {
        const double res = std::abs(resultant(normalized(num_), normalized(den_)));
        if (!(res > 1e-10))
            fail(ErrorCode::InvalidMap, "numerator and denominator share a root (|resultant| = " + std::to_string(res) + ")");
    }
    num_rev_ = num_.reversed(degree_);
    den_rev_ = den_.reversed(degree_);

    // Finite critical points are zeros of W = num' den - num den'; the
    // remaining 2d-2-deg W sit at infinity.
    const Polynomial w = (num_.derivative() * den_ - num_ * den_.derivative()).trimmed(kTrimTol);
    if (w.degree() >= 1) {
        const auto roots = polynomial_roots(w);
        auto clusters = cluster_roots(roots, kCriticalClusterTol);
        sort_canonical(clusters);
        for (const auto& c : clusters) critical_.push_back({c.value, c.multiplicity});
    }
    const int at_inf = 2 * degree_ - 2 - std::max(w.degree(), 0);
    if (at_inf > 0) critical_.push_back({SpherePoint::infinity(), at_inf});

    fingerprint_ = fnv1a(den_, fnv1a(num_, 0xcbf29ce484222325ULL));
}

Polynomial RationalMap::as_polynomial() const {
    if (!is_polynomial()) fail(ErrorCode::NotAPolynomial, "map has a nonconstant denominator");
    return Complex(1.0) / den_.coeff(0) * num_;
}

SpherePoint RationalMap::operator()(const SpherePoint& z) const {
    Complex a;
    Complex b;
    if (z.is_infinite()) {
        a = num_.coeff(degree_);
        b = den_.coeff(degree_);
    } else if (std::abs(z.value()) > kChartSwitch) {
        const Complex u = 1.0 / z.value();
        a = num_rev_(u);
        b = den_rev_(u);
    } else {
        a = num_(z.value());
        b = den_(z.value());
    }
    if (b == Complex(0.0)) return SpherePoint::infinity();
    const Complex v = a / b;
    if (!finite(v)) return SpherePoint::infinity();
    return v;
}

Complex RationalMap::eval_finite(Complex z) const { return num_(z) / den_(z); }

void RationalMap::eval_derivs(Complex z, Complex& f, Complex& df, Complex& ddf) const {
    if (is_polynomial()) {
        num_.eval3(z, f, df, ddf);
        const Complex c = den_.coeff(0);
        f /= c;
        df /= c;
        ddf /= c;
        return;
    }
    Complex n, dn, ddn, d, dd, ddd;
    num_.eval3(z, n, dn, ddn);
    den_.eval3(z, d, dd, ddd);
    f = n / d;
    df = (dn - f * dd) / d;
    ddf = (ddn - 2.0 * df * dd - f * ddd) / d;
}

Complex RationalMap::derivative(Complex z) const {
    Complex f, df, ddf;
    eval_derivs(z, f, df, ddf);
    return df;
}

Complex RationalMap::chart_derivative(const SpherePoint& z) const {
    const SpherePoint fz = (*this)(z);
    if (z.is_finite() && fz.is_finite()) return quotient_derivative(num_, den_, z.value());
    if (z.is_finite()) return quotient_derivative(den_, num_, z.value());
    if (fz.is_finite()) return quotient_derivative(num_rev_, den_rev_, 0.0);
    return quotient_derivative(den_rev_, num_rev_, 0.0);
}

Complex RationalMap::increment(Complex z, Complex delta) const {
    const Complex dn = delta * num_.divided_difference(z, delta);
    if (is_polynomial()) return dn / den_.coeff(0);
    const Complex dd = delta * den_.divided_difference(z, delta);
    const Complex n0 = num_(z);
    const Complex d0 = den_(z);
    return (dn * d0 - n0 * dd) / ((d0 + dd) * d0);
}

std::vector<Complex> RationalMap::taylor_at(Complex z, int order) const {
    const Polynomial ns = num_.shifted(z);
    const Polynomial ds = den_.shifted(z);
    const Complex d0 = ds.coeff(0);
    if (d0 == Complex(0.0)) fail(ErrorCode::InvalidArgument, "Taylor expansion requested at a pole");
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        Complex acc = ns.coeff(k);
        for (int j = 1; j <= k; ++j) acc -= ds.coeff(j) * c[static_cast<std::size_t>(k - j)];
        c[static_cast<std::size_t>(k)] = acc / d0;
    }
    return c;
}

std::vector<SpherePoint> RationalMap::preimages(const SpherePoint& w) const {
    Polynomial p;
    if (w.is_infinite()) {
        p = den_;
    } else if (std::abs(w.value()) > kChartSwitch) {
        p = (den_ - Complex(1.0) / w.value() * num_).trimmed(kTrimTol);
    } else {
        p = (num_ - w.value() * den_).trimmed(kTrimTol);
    }
    std::vector<SpherePoint> out;
    if (p.degree() >= 1) {
        for (const Complex& r : polynomial_roots(p)) out.emplace_back(r);
    }
    for (int k = std::max(p.degree(), 0); k < degree_; ++k) out.push_back(SpherePoint::infinity());
    std::stable_sort(out.begin(), out.end(), canonical_less);
    return out;
}

std::vector<PreimageCluster> RationalMap::distinct_preimages(const SpherePoint& w) const {
    const auto pts = preimages(w);
    std::vector<Complex> finite_pts;
    int at_inf = 0;
    for (const auto& p : pts) {
        if (p.is_infinite())
            ++at_inf;
        else
            finite_pts.push_back(p.value());
    }
    auto clusters = cluster_roots(finite_pts, kClusterTol);
    sort_canonical(clusters);
    std::vector<PreimageCluster> out;
    for (const auto& c : clusters) out.push_back({c.value, c.multiplicity});
    if (at_inf > 0) out.push_back({SpherePoint::infinity(), at_inf});
    return out;
}

std::vector<SpherePoint> RationalMap::critical_values() const {
    std::vector<SpherePoint> out;
    out.reserve(critical_.size());
    for (const auto& c : critical_) out.push_back((*this)(c.point));
    return out;
}

int RationalMap::local_degree(const SpherePoint& z, double tol) const {
    for (const auto& c : critical_)
        if (spherical_dist(c.point, z) < tol) return 1 + c.multiplicity;
    return 1;
}

RationalMap RationalMap::compose(const RationalMap& inner) const {
    // f(P/Q) = sum a_i P^i Q^(d-i) / sum b_i P^i Q^(d-i) with d = deg f.
    const int d = degree_;
    std::vector<Polynomial> ppow{Polynomial::constant(1.0)};
    std::vector<Polynomial> qpow{Polynomial::constant(1.0)};
    for (int i = 1; i <= d; ++i) {
        ppow.push_back(ppow.back() * inner.num_);
        qpow.push_back(qpow.back() * inner.den_);
    }
    Polynomial n;
    Polynomial m;
    for (int i = 0; i <= d; ++i) {
        const Polynomial term = ppow[static_cast<std::size_t>(i)] * qpow[static_cast<std::size_t>(d - i)];
        if (num_.coeff(i) != Complex(0.0)) n = n + num_.coeff(i) * term;
        if (den_.coeff(i) != Complex(0.0)) m = m + den_.coeff(i) * term;
    }
    RationalMap out(*this);
    out.num_ = std::move(n);
    out.den_ = std::move(m);
    out.degree_ = d * inner.degree_;
    out.num_rev_ = out.num_.reversed(out.degree_);
    out.den_rev_ = out.den_.reversed(out.degree_);
    out.critical_.clear();
    // Critical points of a composite: those of the inner map plus inner
    // preimages of the outer ones.
    for (const auto& c : inner.critical_) out.critical_.push_back(c);
    for (const auto& c : critical_) {
        for (const auto& pre : inner.distinct_preimages(c.point))
            out.critical_.push_back({pre.point, c.multiplicity * pre.multiplicity});
    }
    std::stable_sort(out.critical_.begin(), out.critical_.end(),
                     [](const CriticalPoint& a, const CriticalPoint& b) { return canonical_less(a.point, b.point); });
    // Merge coincident entries.
    std::vector<CriticalPoint> merged;
    for (const auto& c : out.critical_) {
        if (!merged.empty() && spherical_dist(merged.back().point, c.point) < 1e-9)
            merged.back().multiplicity += c.multiplicity;
        else
            merged.push_back(c);
    }
    out.critical_ = std::move(merged);
    out.fingerprint_ = fnv1a(out.den_, fnv1a(out.num_, 0xcbf29ce484222325ULL));
    return out;
}

RationalMap RationalMap::iterate(int n) const {
    if (n < 1) fail(ErrorCode::InvalidArgument, "iterate count must be positive");
    RationalMap out = *this;
    for (int i = 1; i < n; ++i) out = compose(out);
    return out;
}

RationalMap RationalMap::inverted() const {
    RationalMap out(*this);
    out.num_ = den_rev_;
    out.den_ = num_rev_;
    out.num_rev_ = den_;
    out.den_rev_ = num_;
    out.critical_.clear();
    for (const auto& c : critical_) {
        SpherePoint p = c.point.is_infinite() ? SpherePoint(0.0)
                        : c.point.value() == Complex(0.0) ? SpherePoint::infinity()
                                                          : SpherePoint(1.0 / c.point.value());
        out.critical_.push_back({p, c.multiplicity});
    }
    std::stable_sort(out.critical_.begin(), out.critical_.end(),
                     [](const CriticalPoint& a, const CriticalPoint& b) { return canonical_less(a.point, b.point); });
    out.fingerprint_ = fnv1a(out.den_, fnv1a(out.num_, 0xcbf29ce484222325ULL));
    return out;
}

std::string RationalMap::describe() const {
    std::ostringstream os;
    os.precision(17);
    auto dump = [&](const Polynomial& p) {
        os << '[';
        for (int k = 0; k <= p.degree(); ++k) os << (k ? ", " : "") << to_string(p.coeff(k));
        os << ']';
    };
    os << "num=";
    dump(num_);
    os << " den=";
    dump(den_);
    return os.str();
}

Complex cycle_multiplier(const RationalMap& f, const std::vector<SpherePoint>& points, std::size_t start) {
    Complex lambda = 1.0;
    const std::size_t q = points.size();
    for (std::size_t k = 0; k < q; ++k) lambda *= f.chart_derivative(points[(start + k) % q]);
    return lambda;
}

CycleClass classify_multiplier(Complex lambda, double parabolic_tol) {
    const double theta = std::arg(lambda) / (2.0 * kPi);
    for (int q = 1; q <= RationalMap::kMaxRootOfUnityOrder; ++q) {
        const double k = std::round(theta * q);
        if (std::abs(lambda - std::polar(1.0, 2.0 * kPi * k / q)) < parabolic_tol) return CycleClass::Parabolic;
    }
    const double r = std::abs(lambda);
    if (r < 1e-10) return CycleClass::Superattracting;
    if (std::abs(r - 1.0) < parabolic_tol) return CycleClass::IrrationallyIndifferent;
    return r < 1.0 ? CycleClass::Attracting : CycleClass::Repelling;
}

std::vector<CycleInfo> find_cycles(const RationalMap& f, int period) {
    if (period < 1) fail(ErrorCode::InvalidArgument, "period must be positive");
    double budget = 1.0;
    for (int i = 0; i < period; ++i) budget *= f.degree();
    if (budget > kCycleBudget)
        fail(ErrorCode::InvalidArgument, "d^period = " + std::to_string(budget) + " exceeds the cycle budget " +
                                             std::to_string(kCycleBudget));

    auto iterate_point = [&](SpherePoint z, int n) {
        for (int i = 0; i < n; ++i) z = f(z);
        return z;
    };

    const RationalMap fp = f.iterate(period);
    const Polynomial g = (fp.num() - Polynomial{0.0, 1.0} * fp.den()).trimmed(1e-14);

    std::vector<SpherePoint> candidates;
    if (g.degree() >= 1) {
        auto roots = polynomial_roots(g);
        // Newton on f^p(z) - z evaluated by iteration, which is better
        // conditioned than the expanded composite.
        for (auto& z : roots) {
            for (int it = 0; it < 8; ++it) {
                Complex w = z;
                Complex dw = 1.0;
                bool ok = true;
                for (int i = 0; i < period && ok; ++i) {
                    Complex fv, df, ddf;
                    f.eval_derivs(w, fv, df, ddf);
                    dw *= df;
                    w = fv;
                    ok = finite(w) && std::abs(w) < RationalMap::kChartSwitch;
                }
                if (!ok || dw == Complex(1.0)) break;
                const Complex step = (w - z) / (dw - 1.0);
                if (!finite(step) || std::abs(step) > 1e-3 * (1.0 + std::abs(z))) break;
                z -= step;
                if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
            }
        }
        for (const auto& c : cluster_roots(roots, kClusterTol)) candidates.emplace_back(c.value);
    }
    if (iterate_point(SpherePoint::infinity(), period).is_infinite()) candidates.push_back(SpherePoint::infinity());
    std::stable_sort(candidates.begin(), candidates.end(), canonical_less);

    auto snap = [&](const SpherePoint& p) {
        for (const auto& c : candidates)
            if (spherical_dist(c, p) < 1e-6) return c;
        return p;
    };

    std::vector<CycleInfo> cycles;
    for (const auto& x : candidates) {
        bool seen = false;
        for (const auto& c : cycles)
            for (const auto& p : c.points)
                if (spherical_dist(p, x) < 1e-6) seen = true;
        if (seen) continue;

        std::vector<SpherePoint> orbit{x};
        for (int k = 1; k <= period; ++k) orbit.push_back(snap(f(orbit.back())));
        int q = period;
        for (int cand = 1; cand <= period; ++cand) {
            if (period % cand == 0 && spherical_dist(orbit[static_cast<std::size_t>(cand)], x) < 1e-6) {
                q = cand;
                break;
            }
        }
        CycleInfo info;
        info.period = q;
        info.points.assign(orbit.begin(), orbit.begin() + q);
        auto first = std::min_element(info.points.begin(), info.points.end(), canonical_less);
        std::rotate(info.points.begin(), first, info.points.end());
        info.multiplier = cycle_multiplier(f, info.points);
        info.cls = classify_multiplier(info.multiplier);
        cycles.push_back(std::move(info));
    }
    std::stable_sort(cycles.begin(), cycles.end(), [](const CycleInfo& a, const CycleInfo& b) {
        if (a.period != b.period) return a.period < b.period;
        return canonical_less(a.points.front(), b.points.front());
    });
    return cycles;
}

RationalMap chebyshev(int d) {
    if (d < 2) fail(ErrorCode::InvalidArgument, "Chebyshev degree must be at least 2");
    Polynomial prev{0.0, 1.0};
    Polynomial cur{-1.0, 0.0, 2.0};
    const Polynomial two_z{0.0, 2.0};
    for (int k = 2; k < d; ++k) {
        Polynomial next = two_z * cur - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return RationalMap(cur);
}

RationalMap quadratic(Complex c) { return RationalMap(Polynomial{c, 0.0, 1.0}); }

}  // namespace leaflab

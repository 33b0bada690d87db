#include <doctest.h>

#include <random>

#include "leaflab/errors.hpp"
#include "leaflab/ratmap.hpp"
#include "leaflab/roots.hpp"
#include "oracles.hpp"

using namespace leaflab;

namespace {

RationalMap basilica() { return quadratic(-1.0); }
RationalMap square() { return quadratic(0.0); }

bool contains(const std::vector<SpherePoint>& pts, SpherePoint p, double tol = 1e-9) {
    for (const auto& q : pts)
        if (spherical_dist(p, q) < tol) return true;
    return false;
}

}  // namespace

TEST_CASE("polynomial arithmetic and shifts") {
    Polynomial p{1.0, -2.0, 0.0, 3.0};
    CHECK(p.degree() == 3);
    CHECK(Polynomial({1.0, 2.0, 0.0, 0.0}).degree() == 1);
    const Complex z(0.3, -0.7);
    const auto s = p.shifted(z);
    const Complex h(0.01, 0.02);
    CHECK(std::abs(s(h) - p(z + h)) < 1e-14);
    CHECK(std::abs(p.divided_difference(z, h) - (p(z + h) - p(z)) / h) < 1e-10);
    // No cancellation for a tiny step: compare against the exact derivative.
    CHECK(std::abs(p.divided_difference(z, 1e-14) - p.derivative()(z)) < 1e-12);
    CHECK(std::abs(resultant(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-1.0, 1.0})) < 1e-15);
    CHECK(std::abs(resultant(Polynomial{1.0, 0.0, 1.0}, Polynomial{-2.0, 1.0}) - 5.0) < 1e-12);
}

TEST_CASE("Aberth roots agree with the quadratic formula and cubic factors") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> r;
        for (int k = 0; k < 6; ++k) r.emplace_back(g(rng), g(rng));
        Polynomial p{1.0};
        for (const auto& x : r) p = p * Polynomial{-x, 1.0};
        auto found = polynomial_roots(p);
        REQUIRE(found.size() == r.size());
        for (const auto& x : r) {
            double best = 1e9;
            for (const auto& y : found) best = std::min(best, std::abs(x - y));
            CHECK(best < 1e-8);
        }
    }
    const auto q = polynomial_roots(Polynomial{Complex(2.0, 1.0), Complex(-3.0, 0.5), 1.0});
    const auto o = oracle::quadratic_roots(1.0, Complex(-3.0, 0.5), Complex(2.0, 1.0));
    for (const auto& x : o) CHECK(std::min(std::abs(q[0] - x), std::abs(q[1] - x)) < 1e-12);
}

TEST_CASE("eval on the sphere") {
    CHECK(basilica()(2.0) == SpherePoint(3.0));
    CHECK(chebyshev(2)(1.0) == SpherePoint(1.0));
    CHECK(basilica()(SpherePoint::infinity()).is_infinite());
    CHECK(basilica()(Complex(1e9, 0.0)).is_infinite() == false);
    RationalMap inv(Polynomial{1.0}, Polynomial{0.0, 0.0, 1.0});  // 1/z^2
    CHECK(inv(0.0).is_infinite());
    CHECK(inv(SpherePoint::infinity()) == SpherePoint(0.0));
}

TEST_CASE("spherical distance") {
    CHECK(spherical_dist(0.0, SpherePoint::infinity()) == doctest::Approx(2.0));
    CHECK(spherical_dist(Complex(0.4, 0.2), Complex(0.4, 0.2)) == 0.0);
    CHECK(spherical_dist(1.0, -1.0) == doctest::Approx(oracle::chordal(1.0, -1.0)));
    CHECK(spherical_dist(1.0, -1.0) == doctest::Approx(2.0));
}

TEST_CASE("invalid maps are rejected") {
    CHECK_THROWS_AS(RationalMap(Polynomial{0.0, 1.0}), Error);
    CHECK_THROWS_AS(RationalMap(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-1.0, 1.0}), Error);
}

TEST_CASE("preimages") {
    auto pre = square().preimages(4.0);
    REQUIRE(pre.size() == 2);
    CHECK(contains(pre, 2.0));
    CHECK(contains(pre, -2.0));
    auto cv = basilica().distinct_preimages(-1.0);
    REQUIRE(cv.size() == 1);
    CHECK(cv[0].multiplicity == 2);
    CHECK(std::abs(cv[0].point.value()) < 1e-12);
    auto cp = chebyshev(2).preimages(1.0);
    CHECK(contains(cp, 1.0));
    CHECK(contains(cp, -1.0));
    // Poles and the point at infinity.
    RationalMap r(Polynomial{1.0, 0.0, 1.0}, Polynomial{0.0, 1.0});  // (z^2+1)/z
    auto pinf = r.preimages(SpherePoint::infinity());
    CHECK(contains(pinf, 0.0));
    CHECK(contains(pinf, SpherePoint::infinity()));
}

TEST_CASE("preimage residual property over random targets") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<RationalMap> maps{square(), basilica(), chebyshev(3),
                                  RationalMap(Polynomial{1.0, 0.0, 0.5}, Polynomial{0.2, 1.0, 0.0, 0.3})};
    for (const auto& f : maps) {
        for (int i = 0; i < 1000; ++i) {
            const SpherePoint w = f(Complex(u(rng), u(rng)));
            for (const auto& r : f.preimages(w)) CHECK(spherical_dist(f(r), w) < 1e-9);
        }
    }
}

TEST_CASE("critical points") {
    auto cb = basilica().critical_points();
    REQUIRE(cb.size() == 2);
    CHECK(std::abs(cb[0].point.value()) < 1e-14);
    CHECK(cb[1].point.is_infinite());
    auto c3 = chebyshev(3).critical_points();
    // Oracle: zeros of 12z^2 - 3 by the quadratic formula.
    const auto o = oracle::quadratic_roots(12.0, 0.0, -3.0);
    REQUIRE(c3.size() == 3);
    CHECK(std::abs(c3[0].point.value() - std::min(o[0].real(), o[1].real())) < 1e-12);
    CHECK(std::abs(c3[1].point.value() - std::max(o[0].real(), o[1].real())) < 1e-12);
    CHECK(c3[2].point.is_infinite());
    CHECK(c3[2].multiplicity == 2);
    std::vector<RationalMap> maps{square(), basilica(), chebyshev(5), quadratic(Complex(0.25, 0.1)),
                                  RationalMap(Polynomial{1.0, 0.0, 0.5}, Polynomial{0.2, 1.0, 0.0, 0.3}),
                                  RationalMap(Polynomial{0.0, 0.0, 1.0}, Polynomial{1.0, 0.0, 0.0, 1.0})};
    for (const auto& f : maps) {
        int total = 0;
        for (const auto& c : f.critical_points()) {
            total += c.multiplicity;
            if (c.point.is_finite()) {
                const Complex z = c.point.value();
                const Complex w = f.num().derivative()(z) * f.den()(z) - f.num()(z) * f.den().derivative()(z);
                CHECK(std::abs(w) < 1e-8);
            }
        }
        CHECK(total == 2 * f.degree() - 2);
    }
}

TEST_CASE("cycles of z^2") {
    auto cycles = find_cycles(square(), 1);
    REQUIRE(cycles.size() == 3);
    CHECK(cycles[0].cls == CycleClass::Superattracting);
    CHECK(std::abs(cycles[1].points[0].value() - 1.0) < 1e-12);
    CHECK(std::abs(cycles[1].multiplier - 2.0) < 1e-12);
    CHECK(cycles[1].cls == CycleClass::Repelling);
    CHECK(cycles[2].points[0].is_infinite());
    CHECK(cycles[2].cls == CycleClass::Superattracting);
}

TEST_CASE("parabolic and period-two cycles") {
    auto par = find_cycles(RationalMap(Polynomial{0.0, 1.0, 1.0}), 1);
    bool found = false;
    for (const auto& c : par)
        if (c.points[0].is_finite() && std::abs(c.points[0].value()) < 1e-6) {
            found = true;
            CHECK(c.cls == CycleClass::Parabolic);
            CHECK(std::abs(c.multiplier - 1.0) < 1e-6);
        }
    CHECK(found);

    auto two = find_cycles(basilica(), 2);
    bool got = false;
    for (const auto& c : two) {
        if (c.period != 2) continue;
        if (contains(c.points, 0.0) && contains(c.points, -1.0)) {
            got = true;
            CHECK(std::abs(c.multiplier) < 1e-12);
            CHECK(c.cls == CycleClass::Superattracting);
        }
    }
    CHECK(got);
}

TEST_CASE("multiplier is invariant under cyclic rotation") {
    for (const auto& f : {basilica(), chebyshev(3), quadratic(Complex(-0.12, 0.75))}) {
        for (const auto& c : find_cycles(f, 3)) {
            const Complex base = cycle_multiplier(f, c.points, 0);
            for (std::size_t s = 1; s < c.points.size(); ++s) {
                // Recompute the orbit from the rotated base point.
                std::vector<SpherePoint> orbit{c.points[s]};
                for (std::size_t k = 1; k < c.points.size(); ++k) orbit.push_back(c.points[(s + k) % c.points.size()]);
                CHECK(std::abs(cycle_multiplier(f, orbit) - base) < 1e-9 * std::max(1.0, std::abs(base)));
            }
        }
    }
}

TEST_CASE("Chebyshev polynomials") {
    const auto p2 = chebyshev(2).as_polynomial();
    CHECK(p2 == Polynomial({-1.0, 0.0, 2.0}));
    const auto p3 = chebyshev(3).as_polynomial();
    CHECK(p3 == Polynomial({0.0, -3.0, 0.0, 4.0}));
    for (int d = 2; d <= 8; ++d) {
        const auto p = chebyshev(d);
        CHECK(p(1.0) == SpherePoint(1.0));
        for (int i = 0; i <= 50; ++i) {
            const double x = -1.0 + i / 25.0;
            CHECK(std::abs(p.eval_finite(x) - oracle::chebyshev_cos(d, x)) < 1e-9);
        }
    }
    // Semigroup law p_a o p_b = p_ab.
    for (int a = 2; a <= 4; ++a)
        for (int b = 2; b <= 4; ++b) {
            const auto pa = chebyshev(a);
            const auto pb = chebyshev(b);
            const auto pab = chebyshev(a * b);
            for (int i = 0; i <= 40; ++i) {
                const double x = -1.0 + i / 20.0;
                CHECK(std::abs(pa.eval_finite(pb.eval_finite(x)) - pab.eval_finite(x)) < 1e-9);
            }
        }
}

TEST_CASE("increment and Taylor coefficients") {
    const RationalMap r(Polynomial{1.0, 0.0, 0.5}, Polynomial{0.2, 1.0, 0.0, 0.3});
    const Complex z(0.4, 0.3);
    for (double h : {1e-3, 1e-8, 1e-13}) {
        const Complex inc = r.increment(z, h);
        CHECK(std::abs(inc / h - r.derivative(z)) < 10.0 * h + 1e-9);
    }
    const auto t = r.taylor_at(z, 4);
    const Complex h(1e-3, -2e-3);
    Complex s = 0.0;
    for (int k = 4; k >= 0; --k) s = s * h + t[static_cast<std::size_t>(k)];
    CHECK(std::abs(s - r.eval_finite(z + h)) < 1e-12);
    CHECK(std::abs(t[1] - oracle::central_diff([&](Complex x) { return r.eval_finite(x); }, z)) < 1e-7);
}

TEST_CASE("composition and inversion") {
    const auto f = basilica();
    const auto f2 = f.iterate(2);
    CHECK(f2.degree() == 4);
    CHECK(std::abs(f2.eval_finite(0.3) - f.eval_finite(f.eval_finite(0.3))) < 1e-14);
    int total = 0;
    for (const auto& c : f2.critical_points()) total += c.multiplicity;
    CHECK(total == 6);
    const auto g = f.inverted();
    CHECK(std::abs(g.eval_finite(0.2) - 1.0 / f.eval_finite(1.0 / 0.2)) < 1e-14);
}

#include <doctest.h>

#include <random>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"
#include "leaflab/natext.hpp"
#include "oracles.hpp"

using namespace leaflab;

namespace {

RationalMap square() { return quadratic(0.0); }
RationalMap basilica() { return quadratic(-1.0); }

BackwardOrbit fixed_lift(const RationalMap& f, Complex alpha, int depth) {
    BackwardOrbit o = make_orbit(f, alpha);
    for (int i = 0; i < depth; ++i) o = extend_backward_toward(f, o, alpha);
    return o;
}

BackwardOrbit random_julia_orbit(const RationalMap& f, int depth, std::uint64_t seed) {
    InverseIterationOptions opt;
    opt.n_samples = 1;
    opt.chains = 1;
    opt.seed = seed;
    const auto cloud = julia_inverse_iteration(f, opt);
    std::mt19937_64 rng(seed);
    return extend_random(f, make_orbit(f, cloud.points[0]), depth, rng);
}

}  // namespace

TEST_CASE("extend_backward examples") {
    const auto f = square();
    auto o = extend_backward_toward(f, make_orbit(f, 1.0), 1.0);
    CHECK(o.points.size() == 2);
    CHECK(spherical_dist(o.at(1), 1.0) < 1e-15);
    auto o4 = extend_backward(f, make_orbit(f, 4.0), 0);
    CHECK(std::abs(std::abs(o4.at(1).value()) - 2.0) < 1e-14);
    auto o0 = extend_backward(f, make_orbit(f, 0.0), 0);
    CHECK(std::abs(o0.at(1).value()) < 1e-15);
    CHECK(o0.local_degrees[0] == 2);
    CHECK_THROWS_AS(extend_backward(f, make_orbit(f, 4.0), 2), Error);
    try {
        extend_backward(basilica(), o4, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MapMismatch);
    }
    std::mt19937_64 rng(5);
    auto r = extend_random(basilica(), make_orbit(basilica(), Complex(0.3, 0.4)), 40, rng);
    CHECK_NOTHROW(verify_orbit(basilica(), r));
    auto s = shift_forward(basilica(), r);
    CHECK(s.depth() == 41);
    CHECK_NOTHROW(verify_orbit(basilica(), s));
    CHECK(shift_backward(s).points == r.points);
}

TEST_CASE("inverse continuation examples") {
    const auto f = square();
    std::vector<Complex> path{4.0, 9.0};
    CHECK(std::abs(continue_inverse_along_path(f, path, 2.0) - 3.0) < 1e-12);
    // Unit loop around the branch point swaps the square-root branches.
    std::vector<Complex> loop;
    for (int k = 0; k <= 64; ++k) loop.push_back(std::polar(1.0, 2.0 * kPi * k / 64));
    CHECK(std::abs(continue_inverse_along_path(f, loop, 1.0) + 1.0) < 1e-12);
    std::vector<Complex> p2{3.0, 8.0};
    CHECK(std::abs(continue_inverse_along_path(basilica(), p2, 2.0) - 3.0) < 1e-12);
    std::vector<Complex> through{-1.0, 1.0};
    try {
        continue_inverse_along_path(f, through, Complex(0.0, 1.0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PathThroughCriticalValue);
    }
}

TEST_CASE("monodromy of loops avoiding critical values is trivial") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const auto f = basilica();  // finite critical value -1
    int tested = 0;
    while (tested < 30) {
        const Complex c(u(rng), u(rng));
        const double r = 0.2 + 0.3 * std::abs(u(rng));
        if (std::abs(c + 1.0) < r + 0.05) continue;
        std::vector<Complex> loop;
        for (int k = 0; k <= 200; ++k) loop.push_back(c + std::polar(r, 2.0 * kPi * k / 200));
        for (const auto& q : f.preimages(loop.front())) {
            const Complex end = continue_inverse_along_path(f, loop, q.value());
            CHECK(std::abs(end - q.value()) < 1e-9);
        }
        ++tested;
    }
}

TEST_CASE("pullback along the fixed lift of z^2") {
    const auto f = square();
    const auto orbit = fixed_lift(f, 1.0, 10);
    const auto trace = pullback_disk(f, orbit, 0.5);
    REQUIRE(trace.levels.size() == 11);
    for (const auto& lv : trace.levels) {
        CHECK(lv.cumulative_degree == 1);
        CHECK(lv.critical_points_inside.empty());
    }
    // Geometric decay against |(f^n)'(1)| = 2^n.
    for (int n = 3; n <= 10; ++n) {
        const double ratio = trace.levels[static_cast<std::size_t>(n)].diameter /
                             trace.levels[static_cast<std::size_t>(n - 1)].diameter;
        CHECK(ratio == doctest::Approx(0.5).epsilon(0.02));
    }
    // Brute-force winding count: exactly one 2^n-th root of unity inside level n.
    for (int n = 1; n <= 6; ++n) {
        const int m = 1 << n;
        int inside = 0;
        for (int k = 0; k < m; ++k)
            inside += winding_number(trace.levels[static_cast<std::size_t>(n)].boundary, std::polar(1.0, 2.0 * kPi * k / m)) != 0;
        CHECK(inside == 1);
    }
}

TEST_CASE("pullback through the critical point") {
    const auto f = square();
    auto orbit = extend_backward(f, make_orbit(f, 0.0), 0);
    const auto trace = pullback_disk(f, orbit, 0.1);
    CHECK(trace.levels[1].cumulative_degree == 2);
    CHECK(trace.levels[1].critical_points_inside.size() == 1);
    CHECK(trace.levels[1].hurwitz_consistent);
    // The lift of a radius-0.1 circle about 0 is the circle of radius sqrt(0.1).
    for (const auto& w : trace.levels[1].boundary) CHECK(std::abs(std::abs(w) - std::sqrt(0.1)) < 1e-9);
}

TEST_CASE("basilica pullbacks shrink and push forward onto the seed circle") {
    const auto f = basilica();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto orbit = random_julia_orbit(f, 30, seed);
        const auto trace = pullback_disk(f, orbit, 0.05);
        REQUIRE(trace.levels.size() == 31);
        CHECK(trace.levels[30].diameter < 1e-3);
        CHECK(trace.levels[30].diameter < trace.levels[5].diameter);
        long long prev = 1;
        for (const auto& lv : trace.levels) {
            CHECK(lv.cumulative_degree >= prev);
            prev = lv.cumulative_degree;
        }
        const Complex z0 = orbit.at(0).value();
        for (int n : {5, 17, 30}) {
            for (const auto& w : trace.levels[static_cast<std::size_t>(n)].boundary) {
                Complex v = w;
                for (int k = 0; k < n; ++k) v = v * v - 1.0;
                // Distance to the seed circle |z - z0| = 0.05.
                CHECK(std::abs(std::abs(v - z0) - 0.05) < 1e-6);
            }
        }
    }
}

TEST_CASE("regularity verdicts") {
    const auto f = square();
    const auto fixed = regularity_test(f, fixed_lift(f, 1.0, 12), {0.5, 0.25, 0.1});
    CHECK(fixed.regular_up_to_depth);
    REQUIRE(fixed.first_univalent_level.has_value());
    CHECK(*fixed.first_univalent_level == 0);

    // Chebyshev orbit through the critical point: (-1, 0, 1/sqrt2, ...).
    const auto p = chebyshev(2);
    auto orbit = extend_backward(p, make_orbit(p, -1.0), 0);
    orbit = extend_backward_toward(p, orbit, 1.0);
    std::mt19937_64 rng(2);
    orbit = extend_random(p, orbit, 10, rng);
    CHECK(std::abs(orbit.at(2).value() - std::sqrt(0.5)) < 1e-12);
    const auto hit = regularity_test(p, orbit, {0.1, 0.05, 0.01});
    CHECK(hit.regular_up_to_depth);
    CHECK(hit.total_degree == 2);
    REQUIRE(hit.first_univalent_level.has_value());
    CHECK(*hit.first_univalent_level == 2);

    const auto b = basilica();
    CycleInfo cyc;
    for (const auto& c : find_cycles(b, 2))
        if (c.period == 2) cyc = c;
    const auto sup = regularity_test(b, cycle_lift(b, cyc, 12), {0.1, 0.05, 0.01});
    CHECK_FALSE(sup.regular_up_to_depth);
    CHECK_FALSE(sup.first_univalent_level.has_value());
}

TEST_CASE("Mane delta search") {
    const auto f = basilica();
    const auto orbit = random_julia_orbit(f, 0, 8);
    const SpherePoint x = orbit.at(0);
    const auto res = mane_delta_search(f, x, 0.1, 12);
    CHECK(res.delta >= 1e-3);
    CHECK(res.max_diameter <= 0.1);
    // Exhaustive preimage oracle: every preimage of a boundary sample lies
    // within eps of some preimage of x, level by level.
    std::vector<Complex> centers{x.value()};
    std::vector<Complex> ring;
    for (int k = 0; k < 64; ++k) ring.push_back(x.value() + std::polar(res.delta, 2.0 * kPi * k / 64));
    for (int n = 1; n <= 12; ++n) {
        std::vector<Complex> nc, nr;
        for (auto c : centers) {
            const Complex s = std::sqrt(c + 1.0);
            nc.push_back(s);
            nc.push_back(-s);
        }
        for (auto c : ring) {
            const Complex s = std::sqrt(c + 1.0);
            nr.push_back(s);
            nr.push_back(-s);
        }
        centers.swap(nc);
        ring.swap(nr);
        for (auto w : ring) {
            double best = 1e9;
            for (auto c : centers) best = std::min(best, oracle::chordal(w, c));
            CHECK(best <= 0.1);
        }
    }

    try {
        mane_delta_search(RationalMap(Polynomial{0.0, 1.0, 1.0}), 0.0, 0.1, 5);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionEvidenceFailure);
    }
    const auto cheb = mane_delta_search(chebyshev(2), 0.3, 0.1, 10);
    CHECK(cheb.delta > 0.0);
}

TEST_CASE("branching profiles") {
    const auto p = chebyshev(2);
    CycleInfo one;
    for (const auto& c : find_cycles(p, 1))
        if (c.points[0].is_finite() && std::abs(c.points[0].value() - 1.0) < 1e-9) one = c;
    CHECK(branching_profile(p, one, 8) == std::set<long long>{1, 2});

    CycleInfo unit;
    for (const auto& c : find_cycles(square(), 1))
        if (c.points[0].is_finite() && std::abs(c.points[0].value() - 1.0) < 1e-9) unit = c;
    CHECK(branching_profile(square(), unit, 8) == std::set<long long>{1});

    CycleInfo beta;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (const auto& c : find_cycles(basilica(), 1))
        if (c.points[0].is_finite() && std::abs(c.points[0].value() - golden) < 1e-9) beta = c;
    CHECK(beta.cls == CycleClass::Repelling);
    CHECK(branching_profile(basilica(), beta, 8) == std::set<long long>{1});

    CycleInfo att;
    att.points = {0.0};
    att.multiplier = 0.5;
    att.cls = CycleClass::Attracting;
    CHECK_THROWS_AS(branching_profile(p, att, 3), Error);
    try {
        branching_profile(p, one, 30, 1000);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CombinatorialBudgetExceeded);
    }
}

#include <doctest.h>

#include <random>

#include "leaflab/charts.hpp"
#include "leaflab/errors.hpp"
#include "oracles.hpp"

using namespace leaflab;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
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

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST_CASE("Koenigs chart of z^2 at 1 is the logarithm") {
    const auto f = quadratic(0.0);
    CHECK(koenigs_chart(f, 1.0, 1.0).value == Complex(0.0));
    for (int i = 0; i < 12; ++i)
        for (double rad : {0.05, 0.15, 0.29}) {
            const Complex z = 1.0 + std::polar(rad, 2.0 * kPi * i / 12);
            CHECK(std::abs(koenigs_chart(f, 1.0, z).value - std::log(z)) < 1e-8);
        }
}

TEST_CASE("Koenigs chart of the basilica at beta") {
    const auto f = quadratic(-1.0);
    const Complex z = kGolden + 0.05;
    CHECK(koenigs_residual(f, kGolden, z) < 1e-8);
    // Naive limit lambda^n (g^n(z) - beta) in extended precision at n = 24.
    using LC = std::complex<long double>;
    const long double beta = (1.0L + std::sqrt(5.0L)) / 2.0L;
    const long double lambda = 2.0L * beta;
    LC w(z.real(), z.imag());
    long double scale = 1.0L;
    for (int n = 0; n < 24; ++n) {
        w = std::sqrt(w + LC(1.0L));
        scale *= lambda;
    }
    const LC naive = scale * (w - LC(beta));
    const Complex oracle(static_cast<double>(naive.real()), static_cast<double>(naive.imag()));
    CHECK(std::abs(koenigs_chart(f, kGolden, z).value - oracle) < 1e-6);

    CHECK(code_of([&] { koenigs_chart(quadratic(0.1), (1.0 - std::sqrt(0.6)) / 2.0, 0.2); }) == ErrorCode::NotRepelling);
    CHECK(code_of([&] { koenigs_chart(f, kGolden, -2.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { koenigs_chart(f, 1.0, 1.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Koenigs functional equation on a grid") {
    for (auto [c, alpha] : {std::pair<double, double>{0.0, 1.0}, {-1.0, kGolden}}) {
        const auto f = quadratic(c);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const Complex z = alpha + Complex(-0.1 + 0.02 * i + 0.001, -0.1 + 0.02 * j + 0.001);
                CHECK(koenigs_residual(f, alpha, z) < 1e-8);
            }
    }
}

TEST_CASE("Böttcher coordinates") {
    const RationalMap cube(Polynomial{0.0, 0.0, 0.0, 1.0});
    CHECK(std::abs(bottcher_chart(cube, 0.0, Complex(0.3, 0.2)).value - Complex(0.3, 0.2)) < 1e-15);
    const auto sq = quadratic(0.0);
    CHECK(std::abs(bottcher_chart(sq, SpherePoint::infinity(), 10.0).value - 0.1) < 1e-15);

    const auto f2 = quadratic(-1.0).iterate(2);
    for (double h : {1e-3, 1e-4, 1e-5}) CHECK(std::abs(bottcher_chart(f2, 0.0, h).value / h + 2.0) < 10 * h);
    for (Complex z : {Complex(0.2, 0.0), Complex(0.1, 0.15), Complex(-0.25, 0.05)}) {
        const Complex b = bottcher_chart(f2, 0.0, z).value;
        const Complex bf = bottcher_chart(f2, 0.0, f2(z).value()).value;
        CHECK(std::abs(bf - b * b) < 1e-12);
    }
    CHECK(code_of([&] { bottcher_chart(sq, 1.0, 1.1); }) == ErrorCode::NotSuperattracting);
}

TEST_CASE("Fatou coordinate of z + z^2") {
    const RationalMap f(Polynomial{0.0, 1.0, 1.0});
    for (double x : {-0.05, -0.03, -0.08}) {
        for (double y : {0.0, 0.01, -0.02}) {
            const Complex z(x, y);
            const Complex fz = f(z).value();
            const auto phi = fatou_coordinate(f, 0.0, Petal::Attracting, z);
            const auto phif = fatou_coordinate(f, 0.0, Petal::Attracting, fz);
            CHECK(std::abs(phif.value - phi.value - 1.0) < 1e-4);
        }
    }
    // Same limit with a shifted index.
    FatouOptions shifted;
    shifted.depth = 9999;
    const Complex z(-0.05, 0.0);
    const auto a = fatou_coordinate(f, 0.0, Petal::Attracting, z);
    const auto b = fatou_coordinate(f, 0.0, Petal::Attracting, f(z).value(), shifted);
    CHECK(std::abs(b.value - a.value - 1.0) < 1e-10);

    const Complex zr(0.05, 0.01);
    const auto r = fatou_coordinate(f, 0.0, Petal::Repelling, zr);
    const auto rf = fatou_coordinate(f, 0.0, Petal::Repelling, f(zr).value());
    CHECK(std::abs(rf.value - r.value - 1.0) < 1e-4);

    CHECK(code_of([&] { fatou_coordinate(quadratic(0.0), 1.0, Petal::Attracting, 0.9); }) == ErrorCode::NotParabolic);
    CHECK(code_of([&] { fatou_coordinate(f, 0.0, Petal::Attracting, 0.05); }) == ErrorCode::NotInPetal);
}

TEST_CASE("affine chart at the fixed lift of z^2 matches Koenigs") {
    const auto f = quadratic(0.0);
    const auto base = fixed_lift(f, 1.0, 48);
    std::vector<BackwardOrbit> queries{make_orbit(f, 1.0)};
    for (int i = 0; i < 8; ++i) queries.push_back(make_orbit(f, 1.0 + std::polar(0.06, 0.7 * i)));
    const auto probe = affine_chart(f, base, queries, 48);
    CHECK(probe.normalization_level == 0);
    CHECK(probe.alpha[0] == Complex(1.0));
    CHECK(probe.values[0] == Complex(0.0));
    for (std::size_t q = 1; q < queries.size(); ++q) {
        CHECK(probe.converged[q]);
        CHECK(probe.koebe_ok[q]);
        CHECK(std::abs(probe.values[q] - koenigs_chart(f, 1.0, queries[q].at(0).value()).value) < 1e-6);
    }
}

TEST_CASE("affine chart equivariance and Cauchy decay") {
    for (double c : {0.0, -1.0}) {
        const auto f = quadratic(c);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto base = julia_orbit(f, 50, seed);
            const auto shifted = shift_forward(f, base);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::vector<BackwardOrbit> queries, pushed;
            for (int i = 0; i < 5; ++i) {
                const Complex zeta = base.at(0).value() + std::polar(0.001 * (1 + 2 * u(rng)), 2 * kPi * u(rng));
                queries.push_back(make_orbit(f, zeta));
                pushed.push_back(shift_forward(f, queries.back()));
            }
            const auto probe = affine_chart(f, base, queries, 48);
            const auto probe_f = affine_chart(f, shifted, pushed, 49);
            const Complex df = f.derivative(base.at(0).value());
            for (std::size_t q = 0; q < queries.size(); ++q) {
                CHECK(probe.converged[q]);
                CHECK(probe.koebe_ok[q]);
                CHECK(std::abs(probe_f.values[q] - df * probe.values[q]) < 1e-6 * std::max(1.0, std::abs(probe_f.values[q])));
                CHECK(geometric_rate(probe.residuals[q], 0) < 0.9);
            }
        }
    }
}

TEST_CASE("affine chart rejects queries off the base leaf") {
    const auto f = quadratic(0.0);
    const auto base = fixed_lift(f, 1.0, 30);
    CHECK(code_of([&] { affine_chart(f, base, {make_orbit(f, 1.5)}, 30); }) == ErrorCode::LeafMismatch);
    auto other = extend_backward_toward(f, make_orbit(f, 1.02), -1.0);
    CHECK(code_of([&] { affine_chart(f, base, {other}, 30); }) == ErrorCode::LeafMismatch);
    CHECK_NOTHROW(affine_chart(f, base, {extend_backward_toward(f, make_orbit(f, 1.02), 1.0)}, 30));
}

TEST_CASE("orbifold chart of 2z^2 - 1 at 1") {
    const auto f = chebyshev(2);
    const auto base = fixed_lift(f, 1.0, 40);
    std::vector<BackwardOrbit> queries;
    std::vector<Complex> zetas;
    for (int i = 0; i < 9; ++i) {
        zetas.push_back(1.0 + std::polar(0.05, 0.2 + 0.3 * i));
        queries.push_back(make_orbit(f, zetas.back()));
    }
    const auto probe = affine_chart(f, base, queries, 40);
    for (std::size_t q = 0; q < zetas.size(); ++q) {
        const Complex ac = std::acos(zetas[q]);
        CHECK(std::abs(probe.values[q] + ac * ac / 2.0) < 1e-6);
        CHECK(std::abs(probe.values[q] - koenigs_chart(f, 1.0, zetas[q]).value) < 1e-9);
    }
    CycleInfo one;
    for (const auto& cyc : find_cycles(f, 1))
        if (cyc.points[0].is_finite() && std::abs(cyc.points[0].value() - 1.0) < 1e-9) one = cyc;
    const auto profile = branching_profile(f, one, 8);
    const auto orb = orbifold_chart(probe, 2, &profile);
    for (std::size_t q = 0; q < zetas.size(); ++q)
        CHECK(std::abs(orb.values[q] * orb.values[q] - probe.values[q]) <= 1e-15 * std::abs(probe.values[q]));
    CHECK(branch_root(4.0, 2, 0.0) == Complex(2.0));
    CHECK(code_of([&] { orbifold_chart(probe, 3, &profile); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { branch_root(-4.0, 2, 0.0); }) == ErrorCode::BranchTrackingFailure);

    // Hölder-1/2 modulus near the singular value: |sqrt a - sqrt b| <= C |a - b|^(1/2).
    double worst = 0.0;
    for (double t : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const Complex a = branch_root(Complex(t, 0.0), 2, 0.0);
        const Complex b = branch_root(Complex(t, t), 2, 0.0);
        worst = std::max(worst, std::abs(a - b) / std::sqrt(t));
    }
    CHECK(worst < 1.0);
}

TEST_CASE("leaf components shrink relative to their distance") {
    const auto f = chebyshev(2);
    const auto comps = leaf_component_ratios(f, 1.0, -1.0, 0.1, 20);
    REQUIRE(comps.size() == 20);
    int decreasing = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        CHECK(comps[i].local_degree == 2);
        // Direct computation with the Poincaré function cos(sqrt(-2w)): the
        // component over the m-th odd multiple of pi.
        const double um = (2.0 * static_cast<double>(i) + 1.0) * kPi;
        double diam = 0.0, dist = 1e300;
        std::vector<Complex> ws;
        for (int k = 0; k < 256; ++k) {
            const Complex s = std::acos(1.0 - std::polar(0.1, 2 * kPi * k / 256));
            for (Complex sv : {s, -s}) ws.push_back(-(um + sv) * (um + sv) / 2.0);
        }
        for (auto& a : ws) {
            dist = std::min(dist, std::abs(a));
            for (auto& b : ws) diam = std::max(diam, std::abs(a - b));
        }
        CHECK(comps[i].ratio == doctest::Approx(diam / dist).epsilon(0.03));
        if (i > 0 && comps[i].ratio < comps[i - 1].ratio) ++decreasing;
    }
    CHECK(decreasing == 19);
}

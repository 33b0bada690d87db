#include <doctest.h>

#include <random>

#include "leaflab/errors.hpp"
#include "leaflab/scenery.hpp"

using namespace leaflab;

namespace {

BackwardOrbit fixed_lift(const RationalMap& f, Complex alpha, int depth) {
    BackwardOrbit o = make_orbit(f, alpha);
    for (int i = 0; i < depth; ++i) o = extend_backward_toward(f, o, alpha);
    return o;
}

std::vector<Complex> values(const PointCloud& c) {
    std::vector<Complex> out;
    for (const auto& p : c.points) out.push_back(p.value());
    return out;
}

const Window kUnit{{0.0, 0.0}, 1.0};

}  // namespace

TEST_CASE("Hausdorff distance basics") {
    const Window w{{0.0, 0.0}, 5.0};
    std::vector<Complex> a{0.0, Complex(1, 1), Complex(-2, 0.5)};
    CHECK(hausdorff_distance(a, a, w) == 0.0);
    CHECK(hausdorff_distance(std::vector<Complex>{0.0}, std::vector<Complex>{3.0}, w) == 3.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4, 4);
    std::vector<Complex> p, q;
    for (int i = 0; i < 500; ++i) p.emplace_back(u(rng), u(rng));
    for (int i = 0; i < 300; ++i) q.emplace_back(u(rng), u(rng));
    const double d = hausdorff_distance(p, q, w);
    CHECK(d == hausdorff_distance(q, p, w));
    double brute = 0.0;
    for (auto x : p) {
        double m = 1e9;
        for (auto y : q) m = std::min(m, std::abs(x - y));
        brute = std::max(brute, m);
    }
    for (auto y : q) {
        double m = 1e9;
        for (auto x : p) m = std::min(m, std::abs(x - y));
        brute = std::max(brute, m);
    }
    CHECK(d == brute);
    CHECK_THROWS_AS(hausdorff_distance(std::vector<Complex>{10.0}, a, w), Error);
}

TEST_CASE("scenery frame of z^2 at 1 approaches the tangent line") {
    const auto f = quadratic(0.0);
    const auto orbit = fixed_lift(f, 1.0, 12);
    const auto frame = rescaled_frame(f, orbit, 6, kUnit);
    REQUIRE(frame.cloud.points.size() > 1000);
    CHECK(frame.scale == Complex(64.0));
    // Taylor remainder: 64(e^{i theta/64} - 1) is within 2^-7 of the imaginary axis.
    for (const auto& p : frame.cloud.points) CHECK(std::abs(p.value().real()) <= 1.0 / 128 + 1e-9);
    std::vector<Complex> segment;
    for (int k = -1000; k <= 1000; ++k) segment.emplace_back(0.0, k / 1000.0);
    CHECK(hausdorff_distance(values(frame.cloud), segment, kUnit) < 0.05);

    double prev = 1e9;
    for (int n = 3; n <= 10; ++n) {
        const auto a = rescaled_frame(f, orbit, n, kUnit);
        const auto b = rescaled_frame(f, orbit, n + 1, kUnit);
        const double d = hausdorff_distance(a.cloud, b.cloud, kUnit);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("frame at n = 0 is the translated cloud") {
    const auto f = quadratic(-1.0);
    const auto orbit = fixed_lift(f, (1.0 + std::sqrt(5.0)) / 2.0, 3);
    FrameOptions opt;
    opt.n_samples = 2000;
    const auto frame = rescaled_frame(f, orbit, 0, kUnit, opt);
    InverseIterationOptions io;
    io.mode = SamplerMode::Cover;
    io.n_samples = 2000;
    const auto cloud = julia_inverse_iteration(f, io);
    std::vector<Complex> expect;
    for (const auto& p : cloud.points) {
        const Complex q = p.value() - orbit.at(0).value();
        if (kUnit.contains(q)) expect.push_back(q);
    }
    CHECK(values(frame.cloud) == expect);
}

TEST_CASE("frame equivariance under the shift") {
    const auto f = quadratic(-1.0);
    InverseIterationOptions io;
    io.n_samples = 3;
    io.chains = 1;
    io.seed = 11;
    const auto start = julia_inverse_iteration(f, io);
    std::mt19937_64 rng(4);
    FrameOptions opt;
    opt.n_samples = 40000;
    for (const auto& z : start.points) {
        const auto orbit = extend_random(f, make_orbit(f, z), 12, rng);
        const auto up = shift_forward(f, orbit);
        const Complex df = f.derivative(orbit.at(0).value());
        const int n = 8;
        const auto lhs = rescaled_frame(f, up, n + 1, kUnit, opt);
        const Window wide{{0.0, 0.0}, 1.5 / std::abs(df)};
        const auto rhs = rescaled_frame(f, orbit, n, wide, opt);
        CHECK(std::abs(lhs.scale - df * rhs.scale) <= 1e-12 * std::abs(lhs.scale));
        std::vector<Complex> pushed;
        for (const auto& p : rhs.cloud.points) pushed.push_back(df * p.value());
        CHECK(hausdorff_distance(values(lhs.cloud), pushed, kUnit) < 0.02);
    }
}

TEST_CASE("flow frames") {
    SceneryFrame circle;
    circle.window = {{0.0, 0.0}, 10.0};
    for (int k = 0; k < 100; ++k) circle.cloud.points.emplace_back(std::polar(1.0, 2 * kPi * k / 100));
    const auto same = flow_frames(circle, {0.0});
    CHECK(values(same[0].cloud) == values(circle.cloud));
    const auto doubled = flow_frames(circle, {std::log(2.0)});
    for (const auto& p : doubled[0].cloud.points) CHECK(std::abs(std::abs(p.value()) - 2.0) < 1e-14);
    const auto twice = flow_frames(flow_frames(circle, {std::log(2.0)})[0], {std::log(2.0)})[0];
    const auto once = flow_frames(circle, {std::log(4.0)})[0];
    REQUIRE(twice.cloud.points.size() == once.cloud.points.size());
    for (std::size_t i = 0; i < once.cloud.points.size(); ++i)
        CHECK(std::abs(twice.cloud.points[i].value() - once.cloud.points[i].value()) < 1e-13);
    CHECK(std::abs(once.scale_log - twice.scale_log) < 1e-15);
}

TEST_CASE("shift followed by the flow returns the frame") {
    for (auto [c, alpha] : {std::pair<double, double>{0.0, 1.0}, {-1.0, (1.0 + std::sqrt(5.0)) / 2.0}}) {
        const auto f = quadratic(c);
        const auto orbit = fixed_lift(f, alpha, 10);
        const auto up = shift_forward(f, orbit);
        const double lam = std::abs(f.derivative(alpha));
        for (int n = 3; n <= 6; ++n) {
            const auto a = rescaled_frame(f, orbit, n, kUnit);
            const auto b = flow_frames(rescaled_frame(f, up, n + 1, kUnit), {-std::log(lam)})[0];
            const Window inner{{0.0, 0.0}, 0.9 / lam};
            CHECK(hausdorff_distance(a.cloud, b.cloud, inner) < 0.02);
        }
    }
}

TEST_CASE("frames through a critical point are rejected") {
    const auto f = chebyshev(2);
    auto orbit = extend_backward(f, make_orbit(f, -1.0), 0);
    CHECK_THROWS_AS(rescaled_frame(f, orbit, 1, kUnit), Error);
}

TEST_CASE("conical test") {
    const auto sq = quadratic(0.0);
    const auto v = conical_test(sq, 1.0, 0.3, 4, 20);
    CHECK(v.verdict == ConicalOutcome::ConicalEvidence);
    for (auto d : v.degrees) CHECK(d == 1);

    const auto b = quadratic(-1.0);
    InverseIterationOptions io;
    io.n_samples = 4;
    io.seed = 5;
    for (const auto& z : julia_inverse_iteration(b, io).points) {
        const auto vb = conical_test(b, z, 0.05, 4, 40);
        CHECK(vb.verdict == ConicalOutcome::ConicalEvidence);
        ConicalOptions twice;
        twice.cloud_samples = 8192;
        CHECK(conical_test(b, z, 0.05, 4, 40, twice).verdict == vb.verdict);
    }

    const auto para = quadratic(0.25);
    const auto vp = conical_test(para, 0.5, 0.05, 4, 40);
    CHECK(vp.verdict == ConicalOutcome::NotConicalUpToDepth);
    CHECK(vp.degrees.back() > 4);

    try {
        conical_test(b, 0.0, 0.05, 4, 10);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionEvidenceFailure);
    }
}

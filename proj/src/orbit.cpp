#include "leaflab/orbit.hpp"

#include "leaflab/errors.hpp"

namespace leaflab {
namespace {

BackwardOrbit append(const RationalMap& f, const BackwardOrbit& orbit, const std::vector<SpherePoint>& pre, int branch) {
    BackwardOrbit out = orbit;
    const SpherePoint& z = pre[static_cast<std::size_t>(branch)];
    out.points.push_back(z);
    out.branch_choices.push_back(branch);
    out.local_degrees.push_back(f.local_degree(z));
    return out;
}

void check_map(const RationalMap& f, const BackwardOrbit& orbit) {
    if (orbit.map_fingerprint != f.fingerprint()) fail(ErrorCode::MapMismatch, "orbit was built for a different map");
    if (orbit.points.empty()) fail(ErrorCode::InvalidArgument, "empty orbit");
}

}  // namespace

BackwardOrbit make_orbit(const RationalMap& f, const SpherePoint& z0) {
    BackwardOrbit o;
    o.points.push_back(z0);
    o.map_fingerprint = f.fingerprint();
    return o;
}

BackwardOrbit extend_backward(const RationalMap& f, const BackwardOrbit& orbit, int branch) {
    check_map(f, orbit);
    const auto pre = f.preimages(orbit.points.back());
    if (branch < 0 || branch >= static_cast<int>(pre.size()))
        fail(ErrorCode::BranchOutOfRange,
             "branch " + std::to_string(branch) + " not in [0, " + std::to_string(pre.size()) + ")");
    return append(f, orbit, pre, branch);
}

BackwardOrbit extend_backward_toward(const RationalMap& f, const BackwardOrbit& orbit, const SpherePoint& target) {
    check_map(f, orbit);
    const auto pre = f.preimages(orbit.points.back());
    int best = 0;
    for (int i = 1; i < static_cast<int>(pre.size()); ++i)
        if (spherical_dist(pre[static_cast<std::size_t>(i)], target) <
            spherical_dist(pre[static_cast<std::size_t>(best)], target))
            best = i;
    return append(f, orbit, pre, best);
}

BackwardOrbit extend_random(const RationalMap& f, const BackwardOrbit& orbit, int steps, std::mt19937_64& rng) {
    check_map(f, orbit);
    BackwardOrbit out = orbit;
    for (int k = 0; k < steps; ++k) {
        const auto pre = f.preimages(out.points.back());
        const int branch = std::uniform_int_distribution<int>(0, static_cast<int>(pre.size()) - 1)(rng);
        out = append(f, out, pre, branch);
    }
    return out;
}

BackwardOrbit cycle_lift(const RationalMap& f, const CycleInfo& cycle, int depth) {
    const auto q = cycle.points.size();
    BackwardOrbit o = make_orbit(f, cycle.points.front());
    for (int n = 1; n <= depth; ++n) {
        const SpherePoint& z = cycle.points[(q - static_cast<std::size_t>(n) % q) % q];
        const auto pre = f.preimages(o.points.back());
        int best = 0;
        for (int i = 1; i < static_cast<int>(pre.size()); ++i)
            if (spherical_dist(pre[static_cast<std::size_t>(i)], z) < spherical_dist(pre[static_cast<std::size_t>(best)], z))
                best = i;
        // Keep the exact cycle point rather than the re-solved root.
        o.points.push_back(z);
        o.branch_choices.push_back(best);
        o.local_degrees.push_back(f.local_degree(z));
    }
    return o;
}

BackwardOrbit shift_forward(const RationalMap& f, const BackwardOrbit& orbit) {
    check_map(f, orbit);
    const SpherePoint w = f(orbit.points.front());
    const auto pre = f.preimages(w);
    int best = 0;
    for (int i = 1; i < static_cast<int>(pre.size()); ++i)
        if (spherical_dist(pre[static_cast<std::size_t>(i)], orbit.points.front()) <
            spherical_dist(pre[static_cast<std::size_t>(best)], orbit.points.front()))
            best = i;
    BackwardOrbit out;
    out.map_fingerprint = orbit.map_fingerprint;
    out.points.push_back(w);
    out.points.insert(out.points.end(), orbit.points.begin(), orbit.points.end());
    out.branch_choices.push_back(best);
    out.branch_choices.insert(out.branch_choices.end(), orbit.branch_choices.begin(), orbit.branch_choices.end());
    out.local_degrees.push_back(f.local_degree(orbit.points.front()));
    out.local_degrees.insert(out.local_degrees.end(), orbit.local_degrees.begin(), orbit.local_degrees.end());
    return out;
}

BackwardOrbit shift_backward(const BackwardOrbit& orbit) {
    if (orbit.points.size() < 2) fail(ErrorCode::InvalidArgument, "cannot drop the only point of an orbit");
    BackwardOrbit out;
    out.map_fingerprint = orbit.map_fingerprint;
    out.points.assign(orbit.points.begin() + 1, orbit.points.end());
    out.branch_choices.assign(orbit.branch_choices.begin() + 1, orbit.branch_choices.end());
    out.local_degrees.assign(orbit.local_degrees.begin() + 1, orbit.local_degrees.end());
    return out;
}

void verify_orbit(const RationalMap& f, const BackwardOrbit& orbit, double tol) {
    check_map(f, orbit);
    for (std::size_t n = 0; n + 1 < orbit.points.size(); ++n) {
        const double d = spherical_dist(f(orbit.points[n + 1]), orbit.points[n]);
        if (!(d < tol))
            fail(ErrorCode::InvalidArgument, "orbit step " + std::to_string(n) + " has residual " + std::to_string(d));
    }
}

Complex orbit_derivative(const RationalMap& f, const BackwardOrbit& orbit, int n) {
    Complex d = 1.0;
    for (int k = 1; k <= n; ++k) d *= f.chart_derivative(orbit.at(k));
    return d;
}

}  // namespace leaflab

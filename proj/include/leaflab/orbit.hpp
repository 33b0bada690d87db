#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "leaflab/ratmap.hpp"

namespace leaflab {

/// Finite truncation (z_0, z_-1, ..., z_-N) of a point of the natural extension.
struct BackwardOrbit {
    std::vector<SpherePoint> points;
    /// Index into f.preimages(z_-n) of z_-(n+1), for each appended step.
    std::vector<int> branch_choices;
    /// Local degree of f at z_-(n+1) (2 or more at a critical point).
    std::vector<int> local_degrees;
    std::uint64_t map_fingerprint = 0;

    int depth() const { return static_cast<int>(points.size()) - 1; }
    const SpherePoint& at(int n) const { return points[static_cast<std::size_t>(n)]; }
};

BackwardOrbit make_orbit(const RationalMap& f, const SpherePoint& z0);

/// Append preimage number `branch` (canonical order, with multiplicity).
BackwardOrbit extend_backward(const RationalMap& f, const BackwardOrbit& orbit, int branch);

/// Append the preimage closest to `target`.
BackwardOrbit extend_backward_toward(const RationalMap& f, const BackwardOrbit& orbit, const SpherePoint& target);

/// Append `steps` uniformly random preimages.
BackwardOrbit extend_random(const RationalMap& f, const BackwardOrbit& orbit, int steps, std::mt19937_64& rng);

/// Backward lift of a cycle: z_0 = cycle[0], z_-1 = cycle[q-1], ...
BackwardOrbit cycle_lift(const RationalMap& f, const CycleInfo& cycle, int depth);

/// The shift f^: (f(z_0), z_0, z_-1, ...).
BackwardOrbit shift_forward(const RationalMap& f, const BackwardOrbit& orbit);

/// Drop z_0: (z_-1, z_-2, ...).
BackwardOrbit shift_backward(const BackwardOrbit& orbit);

/// Throw MapMismatch for a foreign orbit and InvalidArgument if some step
/// violates f(z_-(n+1)) = z_-n within tol (spherical).
void verify_orbit(const RationalMap& f, const BackwardOrbit& orbit, double tol = 1e-9);

/// (f^n)'(z_-n) as a product of derivatives along the orbit; zero when the
/// orbit passes through a critical point.
Complex orbit_derivative(const RationalMap& f, const BackwardOrbit& orbit, int n);

}  // namespace leaflab

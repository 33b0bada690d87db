#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leaflab/polynomial.hpp"

namespace leaflab {

struct RootOptions {
    /// Backward-error tolerance: |p(z)| <= tol * sum |c_k| |z|^k.
    double residual_tol = 1e-12;
    int max_sweeps = 200;
    int restarts = 4;
    std::uint64_t seed = 0x5eed;
};

/// All roots of p (degree >= 1) with multiplicity, by Aberth-Ehrlich
/// simultaneous iteration. Throws RootFindingFailure when the residual
/// tolerance is not met within the sweep budget after all restarts.
std::vector<Complex> polynomial_roots(const Polynomial& p, const RootOptions& options = {});

struct RootCluster {
    Complex value;
    int multiplicity = 1;
};

/// Merge roots closer than tol * (1 + |z|); the cluster value is the mean.
std::vector<RootCluster> cluster_roots(std::span<const Complex> roots, double tol);

/// Deterministic ordering by real part then imaginary part, with the real
/// part quantized so that rounding noise does not reorder symmetric roots.
void sort_canonical(std::vector<RootCluster>& roots);

}  // namespace leaflab

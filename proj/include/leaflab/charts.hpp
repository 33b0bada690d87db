#pragma once

#include <optional>
#include <set>
#include <vector>

#include "leaflab/natext.hpp"

namespace leaflab {

/// A limit value with its convergence record.
struct ChartValue {
    Complex value;
    /// Last Cauchy difference of the approximating sequence.
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

struct LimitOptions {
    double tol = 1e-13;
    int max_iter = 200;
};

/// Radius of the disk about alpha on which the inverse branch fixing alpha
/// is defined: 0.95 times the distance to the nearest finite critical value.
double koenigs_radius(const RationalMap& f, Complex alpha);

/// Kœnigs coordinate lim lambda^n (g^n(z) - alpha), g the inverse branch
/// fixing alpha, lambda = f'(alpha). Once g^n(z) is close to alpha the
/// limit is read off a Taylor series of the coordinate.
ChartValue koenigs_chart(const RationalMap& f, Complex alpha, Complex z, const LimitOptions& options = {});

/// |phi(f(z)) - lambda phi(z)|.
double koenigs_residual(const RationalMap& f, Complex alpha, Complex z, const LimitOptions& options = {});

/// Böttcher coordinate at a superattracting fixed point: beta(f(z)) = beta(z)^k
/// with beta(alpha + h) = b h + O(h^2), b the principal root of b^(k-1) = a
/// where f(alpha + h) = alpha + a h^k + ... At infinity both z and the value
/// are read in the chart u = 1/z.
ChartValue bottcher_chart(const RationalMap& f, const SpherePoint& alpha, const SpherePoint& z,
                          const LimitOptions& options = {});

enum class Petal { Attracting, Repelling };

struct FatouOptions {
    int depth = 10000;
    double tol = 1e-3;
    /// Forward (or inverse) steps used for the petal membership test.
    int drift_steps = 50;
};

/// Fatou coordinate at a parabolic fixed point whose multiplier is a q-th
/// root of unity, computed for f^q. Only simple parabolic points (one
/// attracting petal, f^q(alpha + h) = alpha + h + a h^2 + ..., a != 0) are
/// supported. Returns Phi with Phi(f^q(z)) = Phi(z) + 1. The residual is
/// |Phi_N - Phi_{N/2}| at the final depth N.
ChartValue fatou_coordinate(const RationalMap& f, Complex alpha, Petal petal, Complex z,
                            const FatouOptions& options = {});

struct AffineOptions {
    double tol = 1e-9;
    std::vector<double> radius_schedule{0.1, 0.05, 0.02, 0.01};
    PullbackOptions pullback{};
    /// Check query containment in the base pullbacks (LeafMismatch on failure).
    bool check_leaf = true;
    int workers = 1;
};

struct ChartProbe {
    BackwardOrbit base_orbit;
    int depth = 0;
    /// Level whose derivative normalises the chart (the first univalent level).
    int normalization_level = 0;
    double radius = 0.0;
    /// A_n(w) = alpha_n (w - beta_n): alpha_n = (f^(n-L))'(z_-n), beta_n = z_-n.
    std::vector<Complex> alpha;
    std::vector<Complex> beta;
    std::vector<BackwardOrbit> queries;
    std::vector<Complex> values;
    /// residuals[q][j] = |phi_{L+j+1} - phi_{L+j}| for query q.
    std::vector<std::vector<double>> residuals;
    std::vector<bool> converged;
    /// Koebe envelope for the univalent pullbacks of D(z_0, radius); true
    /// when the base tail is branched and the envelope does not apply.
    std::vector<bool> koebe_ok;
};

/// Lift a query point along the leaf of base: zeta_-(n+1) is the inverse
/// branch continuation of zeta_-n from z_-n, for n >= start_level. The
/// prefix up to start_level is taken from `prefix` (required when the base
/// tail is branched).
BackwardOrbit lift_along_leaf(const RationalMap& f, const BackwardOrbit& base, const BackwardOrbit& prefix,
                              int depth, const TrackOptions& track = {});

/// Affine chart phi(zeta) = lim A_n(zeta_-n). Non-converged queries are
/// flagged, not extrapolated.
ChartProbe affine_chart(const RationalMap& f, const BackwardOrbit& base, const std::vector<BackwardOrbit>& queries,
                        int depth, const AffineOptions& options = {});

/// Least-squares geometric rate of a residual sequence, from index `from`.
double geometric_rate(const std::vector<double>& residuals, std::size_t from = 0);

struct OrbifoldChart {
    ChartProbe base;
    int branch_degree = 2;
    /// Argument of the reference value; the cut is the opposite ray.
    double base_angle = 0.0;
    std::vector<Complex> values;
};

/// k-th roots of the probe values. The branch is fixed by the first nonzero
/// value and the cut runs along the ray opposite it; a value on the cut
/// raises BranchTrackingFailure. A profile, when given, must contain k.
OrbifoldChart orbifold_chart(const ChartProbe& base, int k, const std::set<long long>* profile = nullptr);

/// Root of v on the branch with cut opposite base_angle.
Complex branch_root(Complex v, int k, double base_angle);

struct LeafComponent {
    /// Boundary of the component in the Kœnigs coordinate of the leaf.
    std::vector<Complex> boundary;
    int level = 0;
    int local_degree = 1;
    double diameter = 0.0;
    double distance = 0.0;
    double ratio = 0.0;
};

/// Components of the preimage of D(center, radius) on the leaf through the
/// fixed orbit (alpha, alpha, ...), read in the Kœnigs chart and sorted by
/// distance to the origin. Found among pullbacks of depth <= max_level that
/// lie in the Kœnigs disk.
std::vector<LeafComponent> leaf_component_ratios(const RationalMap& f, Complex alpha, Complex center, double radius,
                                                 std::size_t count, int max_level = 8, int resolution = 64);

}  // namespace leaflab

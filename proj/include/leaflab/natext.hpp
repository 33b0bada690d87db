#pragma once

#include <optional>
#include <set>
#include <vector>

#include "leaflab/julia.hpp"
#include "leaflab/pullback.hpp"

namespace leaflab {

struct RegularityVerdict {
    bool regular_up_to_depth = false;
    /// Level after the last branched one, when the test succeeded.
    std::optional<int> first_univalent_level;
    long long total_degree = 1;
    /// Radius at which the verdict was reached (or the floor that was tried).
    double radius = 0.0;
    int depth = 0;
    std::vector<int> local_degrees;
    std::string note;
};

/// Pull back at each radius in turn; regular once the last branched level is
/// in the first half of the tested depth. Inconclusive otherwise.
RegularityVerdict regularity_test(const RationalMap& f, const BackwardOrbit& orbit,
                                  const std::vector<double>& radius_schedule, const PullbackOptions& options = {},
                                  PullbackTrace* trace_out = nullptr);

struct ManeOptions {
    int resolution = 64;
    int max_degree = 64;
    double delta_min = 1e-6;
    int bisection_steps = 6;
    /// Distance (spherical) below which exclusion evidence blocks the search.
    double evidence_tol = 1e-3;
    int scan_depth = 200;
};

struct ManeResult {
    double delta = 0.0;
    int depth = 0;
    double eps = 0.0;
    /// Largest component diameter seen at the accepted delta.
    double max_diameter = 0.0;
    std::size_t components_checked = 0;
    std::vector<double> rejected;
};

/// Largest delta (by halving then bisection) for which every component of
/// f^-n(D(x, delta)), n <= depth, has spherical diameter <= eps.
ManeResult mane_delta_search(const RationalMap& f, const SpherePoint& x, double eps, int depth,
                             const ManeOptions& options = {});

inline constexpr std::size_t kBranchingNodeBudget = 1'000'000;

/// Distinct cumulative local degrees along backward orbits from the cycle
/// point alpha.points[0], up to the given length.
std::set<long long> branching_profile(const RationalMap& f, const CycleInfo& alpha, int depth,
                                      std::size_t node_budget = kBranchingNodeBudget);

}  // namespace leaflab

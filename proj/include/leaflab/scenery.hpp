#pragma once

#include <vector>

#include "leaflab/julia.hpp"
#include "leaflab/natext.hpp"

namespace leaflab {

struct SceneryFrame {
    /// Points of e^t A_n(J) inside the window.
    PointCloud cloud;
    int orbit_depth = 0;
    Window window;
    double scale_log = 0.0;
    /// A_n(z) = scale (z - offset), with scale = (f^n)'(z_-n) (flow not included).
    Complex scale{1.0, 0.0};
    Complex offset{0.0, 0.0};
    std::uint64_t map_fingerprint = 0;
};

struct FrameOptions {
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    SamplerMode sampler = SamplerMode::Cover;
    double scale_log = 0.0;
    int workers = 1;
    TrackOptions track{};
};

/// Julia samples near z_0 are carried to z_-n along the orbit's inverse
/// branch and rescaled by A_n; only the sheet of the orbit is drawn.
SceneryFrame rescaled_frame(const RationalMap& f, const BackwardOrbit& orbit, int n, const Window& window,
                            const FrameOptions& options = {});

/// e^t times the frame, re-clipped, for each t.
std::vector<SceneryFrame> flow_frames(const SceneryFrame& frame, const std::vector<double>& t_values);

/// Symmetric Hausdorff distance of the two clouds clipped to the window.
/// EmptyAfterClip if either is empty.
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b, const Window& window);
double hausdorff_distance(const PointCloud& a, const PointCloud& b, const Window& window);

enum class ConicalOutcome { ConicalEvidence, NotConicalUpToDepth };
std::string to_string(ConicalOutcome c);

struct ConicalOptions {
    int burn_in = 5;
    /// Fraction of tested times past burn-in that must have bounded degree.
    double hit_rate = 0.2;
    /// Some hit must fall in this final fraction of the tested times.
    double tail_fraction = 0.2;
    int resolution = 64;
    /// Julia membership: estimated distance from z0 to J must not exceed this.
    double julia_tol = 1e-6;
    std::size_t cloud_samples = 4096;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct ConicalVerdict {
    double radius = 0.0;
    int degree_bound = 0;
    int depth = 0;
    /// degrees[n-1] for n = 1..depth: cumulative degree of the component of
    /// f^-n(D(f^n z0, r)) containing z0; degree_bound + 1 stands for "more",
    /// 0 for a pullback that failed.
    std::vector<long long> degrees;
    std::vector<int> witnesses;
    double hit_rate = 0.0;
    double julia_distance = 0.0;
    ConicalOutcome verdict = ConicalOutcome::NotConicalUpToDepth;
};

/// Estimated distance from z to J: zero on repelling or parabolic cycles,
/// else the smallest cloud distance of f^n(z) divided by |(f^n)'(z)| over
/// bounded forward iterates.
double julia_distance_estimate(const RationalMap& f, Complex z, const std::vector<SpherePoint>& cloud, int max_n = 64);

ConicalVerdict conical_test(const RationalMap& f, const SpherePoint& z0, double r, int degree_bound, int depth,
                            const ConicalOptions& options = {});

}  // namespace leaflab

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "leaflab/ratmap.hpp"

namespace leaflab {

enum class CloudSource { InverseIteration, EscapeBoundary, Rescaled };

std::string to_string(CloudSource s);

struct PointCloud {
    std::vector<SpherePoint> points;
    CloudSource source = CloudSource::InverseIteration;
    std::uint64_t seed = 0;
};

enum class SamplerMode {
    /// Independent random backward chains with uniform branch choice.
    Chain,
    /// Breadth-first preimage tree in random branch order, pruned once a
    /// grid cell is occupied; the grid is refined until n_samples are
    /// emitted. Covers thin parts of J that chains reach only rarely.
    Cover,
};

struct InverseIterationOptions {
    SamplerMode mode = SamplerMode::Chain;
    std::size_t n_samples = 10000;
    int burn_in = 64;
    std::uint64_t seed = 1;
    /// Number of independent chains. Fixed independently of `workers` so that
    /// the cloud is the same for any thread count.
    int chains = 16;
    int workers = 1;
    /// Radius of the disk the chains start from.
    double start_radius = 2.0;
};

/// Random backward orbits; emits the points after burn-in.
PointCloud julia_inverse_iteration(const RationalMap& f, const InverseIterationOptions& options = {});

/// Axis-aligned square window.
struct Window {
    Complex center{0.0, 0.0};
    double half_width = 1.0;

    bool contains(Complex z) const {
        return std::abs(z.real() - center.real()) <= half_width && std::abs(z.imag() - center.imag()) <= half_width;
    }
};

/// Row 0 is the top edge; pixel (row, col) samples its center.
Complex pixel_center(const Window& w, int resolution, int row, int col);

struct EscapeRaster {
    int resolution = 0;
    int max_iter = 0;
    double escape_radius = 0.0;
    Window window;
    /// Row-major iteration counts; max_iter marks bounded orbits.
    std::vector<std::int32_t> counts;

    std::int32_t at(int row, int col) const { return counts[static_cast<std::size_t>(row) * resolution + col]; }
};

/// R = 2 + sum_{i<d} |a_i| / |a_d| + (2/|a_d|)^(1/(d-1)); beyond R every orbit escapes.
double default_escape_radius(const Polynomial& p);

/// Escape-time counts for a polynomial map; NotAPolynomial otherwise.
EscapeRaster escape_time_grid(const RationalMap& f, const Window& window, int resolution, int max_iter,
                              std::optional<double> escape_radius = std::nullopt, int workers = 1);

/// Escape count of a single point under the same rule.
std::int32_t escape_count(const Polynomial& p, Complex z, int max_iter, double escape_radius);

struct CriticalOrbit {
    SpherePoint critical_point;
    int multiplicity = 1;
    std::vector<SpherePoint> orbit;
    /// Index into PostcriticalReport::landing_cycles when the orbit lands.
    std::optional<std::size_t> landing_cycle;
    /// First orbit index that lies on the landing cycle.
    int preperiod = -1;
    bool recurrent = false;
};

struct PostcriticalReport {
    std::vector<CriticalOrbit> orbits;
    bool finite = false;
    std::vector<CycleInfo> landing_cycles;
    std::vector<SpherePoint> postcritical_set;
    int depth = 0;
    double merge_tol = 0.0;
    double recurrence_tol = 0.0;
};

/// Forward critical orbits. `finite` is set only when every orbit lands on a
/// cycle and none of those cycles attracts (or neutrally holds) the orbit
/// without containing it: a critical orbit that merely converges to an
/// attracting point is not postcritically finite even though it settles.
PostcriticalReport postcritical_scan(const RationalMap& f, int depth, double merge_tol = 1e-9,
                                     double recurrence_tol = 1e-4);

/// Points of the report's landing cycles that are parabolic, plus orbit tails
/// of recurrent critical points; used as exclusion evidence.
std::vector<SpherePoint> exclusion_evidence(const RationalMap& f, const PostcriticalReport& report, int cycle_period = 2);

}  // namespace leaflab

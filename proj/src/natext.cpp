#include "leaflab/natext.hpp"

#include <algorithm>
#include <cmath>

#include "leaflab/errors.hpp"
#include "leaflab/geometry2d.hpp"

namespace leaflab {
namespace {

bool is_geometry_failure(const Error& e) {
    return e.code() == ErrorCode::PathThroughCriticalValue || e.code() == ErrorCode::TrackingDivergence ||
           e.code() == ErrorCode::UnsupportedChart;
}

}  // namespace

RegularityVerdict regularity_test(const RationalMap& f, const BackwardOrbit& orbit,
                                  const std::vector<double>& radius_schedule, const PullbackOptions& options,
                                  PullbackTrace* trace_out) {
    if (orbit.depth() < 2) fail(ErrorCode::InvalidArgument, "regularity test needs an orbit of depth >= 2");
    if (radius_schedule.empty()) fail(ErrorCode::InvalidArgument, "empty radius schedule");
    RegularityVerdict verdict;
    verdict.depth = orbit.depth();
    std::string notes;
    for (double r : radius_schedule) {
        verdict.radius = r;
        PullbackTrace trace;
        try {
            trace = pullback_disk(f, orbit, r, options);
        } catch (const Error& e) {
            if (!is_geometry_failure(e)) throw;
            notes += "r=" + std::to_string(r) + ": " + e.what() + "; ";
            continue;
        }
        verdict.local_degrees.clear();
        for (const auto& lv : trace.levels) verdict.local_degrees.push_back(lv.local_degree);
        verdict.total_degree = trace.levels.back().cumulative_degree;
        if (trace.truncated) {
            notes += "r=" + std::to_string(r) + ": " + trace.truncation_reason + "; ";
            continue;
        }
        int last_branched = 0;
        for (const auto& lv : trace.levels)
            if (lv.level > 0 && lv.local_degree > 1) last_branched = lv.level;
        if (last_branched <= verdict.depth / 2) {
            verdict.regular_up_to_depth = true;
            verdict.first_univalent_level = last_branched == 0 ? 0 : last_branched + 1;
            verdict.note = notes + "regular at r=" + std::to_string(r) + " up to depth " + std::to_string(verdict.depth);
            if (trace_out) *trace_out = std::move(trace);
            return verdict;
        }
        notes += "r=" + std::to_string(r) + ": branching persists to level " + std::to_string(last_branched) + "; ";
    }
    verdict.note = notes + "inconclusive at the radius floor";
    return verdict;
}

ManeResult mane_delta_search(const RationalMap& f, const SpherePoint& x, double eps, int depth, const ManeOptions& options) {
    if (!(eps > 0.0) || depth < 0) fail(ErrorCode::InvalidArgument, "eps must be positive and depth non-negative");
    if (x.is_infinite()) fail(ErrorCode::UnsupportedChart, "x must be finite");
    const auto scan = postcritical_scan(f, options.scan_depth);
    for (const auto& e : exclusion_evidence(f, scan)) {
        if (spherical_dist(e, x) < options.evidence_tol)
            fail(ErrorCode::PreconditionEvidenceFailure,
                 "x lies within " + std::to_string(spherical_dist(e, x)) + " of a parabolic point or a recurrent critical orbit");
    }

    PullbackOptions po;
    po.resolution = options.resolution;
    po.max_degree = options.max_degree;
    Lifter lifter(f, po);

    ManeResult result;
    result.depth = depth;
    result.eps = eps;

    // Every component of every level, depth first; nullopt on rejection.
    auto check = [&](double delta) -> std::optional<double> {
        auto base = Lifter::circle(x.value(), delta, options.resolution);
        double worst = spherical_diameter(base->polygon());
        if (worst > eps) return std::nullopt;
        struct Node {
            std::shared_ptr<Curve> curve;
            int level;
            long long degree;
        };
        std::vector<Node> stack{{base, 0, 1}};
        try {
            while (!stack.empty()) {
                Node node = std::move(stack.back());
                stack.pop_back();
                if (node.level >= depth) continue;
                for (auto& comp : lifter.lift_all(node.curve)) {
                    ++result.components_checked;
                    const long long deg = node.degree * comp.local_degree;
                    if (deg > options.max_degree) return std::nullopt;
                    const double d = spherical_diameter(comp.curve->polygon());
                    if (d > eps) return std::nullopt;
                    worst = std::max(worst, d);
                    stack.push_back({comp.curve, node.level + 1, deg});
                }
            }
        } catch (const Error& e) {
            if (!is_geometry_failure(e)) throw;
            return std::nullopt;
        }
        return worst;
    };

    double hi = eps;
    double lo = 0.0;
    std::optional<double> lo_diam;
    for (double delta = eps; delta >= options.delta_min; delta *= 0.5) {
        if (auto d = check(delta)) {
            lo = delta;
            lo_diam = d;
            break;
        }
        result.rejected.push_back(delta);
        hi = delta;
    }
    if (!lo_diam)
        fail(ErrorCode::BudgetExceeded, "no delta >= " + std::to_string(options.delta_min) + " keeps all pullbacks below eps");
    if (hi > lo) {
        for (int i = 0; i < options.bisection_steps; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (auto d = check(mid)) {
                lo = mid;
                lo_diam = d;
            } else {
                hi = mid;
            }
        }
    }
    result.delta = lo;
    result.max_diameter = *lo_diam;
    return result;
}

std::set<long long> branching_profile(const RationalMap& f, const CycleInfo& alpha, int depth, std::size_t node_budget) {
    if (alpha.cls != CycleClass::Repelling || !(std::abs(alpha.multiplier) > 1.0))
        fail(ErrorCode::NotRepelling, "branching profile needs a repelling cycle");
    if (depth < 0) fail(ErrorCode::InvalidArgument, "depth must be non-negative");
    const auto scan = postcritical_scan(f, 200);
    if (!scan.finite)
        fail(ErrorCode::PreconditionEvidenceFailure, "map is not postcritically finite by the forward scan");

    std::set<long long> degrees{1};
    struct Node {
        SpherePoint z;
        int level;
        long long degree;
    };
    std::vector<Node> stack{{alpha.points.front(), 0, 1}};
    std::size_t visited = 0;
    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        if (++visited > node_budget)
            fail(ErrorCode::CombinatorialBudgetExceeded,
                 "preimage tree exceeds " + std::to_string(node_budget) + " nodes");
        if (node.level >= depth) continue;
        for (const auto& pre : f.distinct_preimages(node.z)) {
            const long long deg = node.degree * pre.multiplicity;
            degrees.insert(deg);
            stack.push_back({pre.point, node.level + 1, deg});
        }
    }
    return degrees;
}

}  // namespace leaflab

#include "leaflab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "leaflab/charts.hpp"
#include "leaflab/errors.hpp"
#include "leaflab/hull3.hpp"
#include "leaflab/parallel.hpp"
#include "leaflab/raster.hpp"
#include "leaflab/scenery.hpp"

namespace leaflab {
namespace {

// Reads command parameters with defaults, recording what was used so the
// report shows the effective configuration. Unknown keys are errors.
class Params {
public:
    explicit Params(const Json& given) : given_(given.is_null() ? Json::object() : given) {
        if (!given_.is_object()) fail(ErrorCode::ConfigError, "params must be an object");
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        T v = fallback;
        if (given_.contains(key)) {
            try {
                v = given_.at(key).get<T>();
            } catch (const Json::exception&) {
                fail(ErrorCode::ConfigError, "parameter '" + key + "' has the wrong type");
            }
        }
        used_[key] = v;
        return v;
    }

    Complex complex(const std::string& key, Complex fallback) {
        const Complex v = given_.contains(key) ? parse_complex_json(key, given_.at(key)) : fallback;
        used_[key] = to_json(v);
        return v;
    }

    std::vector<Complex> complex_list(const std::string& key, const std::vector<Complex>& fallback) {
        std::vector<Complex> v = fallback;
        if (given_.contains(key)) {
            const Json& arr = given_.at(key);
            if (!arr.is_array()) fail(ErrorCode::ConfigError, "parameter '" + key + "' must be a list");
            v.clear();
            for (const auto& x : arr) v.push_back(parse_complex_json(key, x));
        }
        Json out = Json::array();
        for (const auto& z : v) out.push_back(to_json(z));
        used_[key] = out;
        return v;
    }

    /// Complex parameter whose default is computed only when it is absent.
    Complex complex_or(const std::string& key, const std::function<Complex()>& fallback) {
        const Complex v = given_.contains(key) ? parse_complex_json(key, given_.at(key)) : fallback();
        used_[key] = to_json(v);
        return v;
    }

    Json raw(const std::string& key, const Json& fallback) {
        const Json v = given_.contains(key) ? given_.at(key) : fallback;
        used_[key] = v;
        return v;
    }

    /// Effective parameters; ConfigError if any given key was not consumed.
    Json finish() const {
        for (const auto& [k, _] : given_.items())
            if (!used_.contains(k)) fail(ErrorCode::ConfigError, "unknown parameter '" + k + "'");
        return used_;
    }

private:
    static Complex parse_complex_json(const std::string& key, const Json& j) {
        try {
            if (j.is_string()) return parse_complex(j.get<std::string>());
            return complex_from_json(j);
        } catch (const Error&) {
        } catch (const Json::exception&) {
        }
        fail(ErrorCode::ConfigError, "parameter '" + key + "' is not a complex number");
    }

    Json given_;
    Json used_ = Json::object();
};

struct Context {
    const ExperimentConfig& cfg;
    Params params;
    Json stamps = Json::object();
    Json artifacts = Json::array();

    RationalMap map() const {
        if (cfg.map.is_null()) fail(ErrorCode::ConfigError, "this command needs --map");
        try {
            if (cfg.map.is_string()) return map_from_spec(cfg.map.get<std::string>());
            return map_from_json(cfg.map);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            fail(ErrorCode::ConfigError, e.what());
        }
    }

    int depth(int fallback) const { return cfg.depth.value_or(fallback); }
    double tol(double fallback) const { return cfg.tol.value_or(fallback); }

    void write(const std::string& name, const std::string& bytes) {
        if (cfg.out.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(cfg.out, ec);
        write_binary_file((std::filesystem::path(cfg.out) / name).string(), bytes);
        artifacts.push_back(artifact_entry(name, bytes));
    }

    static Json artifact_entry(const std::string& name, const std::string& bytes) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
        return Json{{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", hex}};
    }
};

Json points_json(const std::vector<SpherePoint>& pts) {
    Json out = Json::array();
    for (const auto& p : pts) out.push_back(to_json(p));
    return out;
}

Json orbit_json(const BackwardOrbit& o) {
    return Json{{"points", points_json(o.points)}, {"branches", o.branch_choices}, {"local_degrees", o.local_degrees}};
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Repelling fixed point of largest multiplier: a deterministic Julia point.
Complex default_base(const RationalMap& f) {
    std::optional<CycleInfo> best;
    for (const auto& c : find_cycles(f, 1)) {
        if (c.cls != CycleClass::Repelling || c.points[0].is_infinite()) continue;
        if (!best || std::abs(c.multiplier) > std::abs(best->multiplier)) best = c;
    }
    if (!best) fail(ErrorCode::NotRepelling, "map has no finite repelling fixed point; give z0");
    return best->points[0].value();
}

BackwardOrbit random_orbit(const RationalMap& f, Complex z0, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return extend_random(f, make_orbit(f, z0), depth, rng);
}

BackwardOrbit fixed_lift(const RationalMap& f, Complex alpha, int depth) {
    BackwardOrbit o = make_orbit(f, alpha);
    for (int i = 0; i < depth; ++i) o = extend_backward_toward(f, o, alpha);
    return o;
}

Json cmd_map_info(Context& ctx) {
    const RationalMap f = ctx.map();
    const int depth = ctx.depth(64);
    const auto pc = postcritical_scan(f, depth);
    Json crit = Json::array();
    for (const auto& c : f.critical_points()) crit.push_back({{"point", to_json(c.point)}, {"multiplicity", c.multiplicity}});
    Json fixed = Json::array();
    for (const auto& c : find_cycles(f, 1)) fixed.push_back(cycle_to_json(c));
    ctx.stamps["postcritical_depth"] = depth;
    ctx.stamps["merge_tol"] = pc.merge_tol;
    return Json{{"map", map_to_json(f)},
                {"description", f.describe()},
                {"degree", f.degree()},
                {"polynomial", f.is_polynomial()},
                {"critical_points", crit},
                {"critical_values", points_json(f.critical_values())},
                {"postcritical_set", points_json(pc.postcritical_set)},
                {"postcritically_finite", pc.finite},
                {"fixed_points", fixed}};
}

Json cmd_julia_render(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const int res = P.get<int>("resolution", 1024);
    const Window window{P.complex("center", 0.0), P.get<double>("half_width", 2.0)};
    const std::string method = P.get<std::string>("method", f.is_polynomial() ? "escape" : "inverse");
    const std::string format = P.get<std::string>("format", "pgm");
    if (res < 1 || res > 16384) fail(ErrorCode::ConfigError, "resolution out of range");
    if (!(window.half_width > 0.0)) fail(ErrorCode::ConfigError, "half_width must be positive");
    if (format != "pgm" && format != "png") fail(ErrorCode::ConfigError, "format must be pgm or png");
    Json result{{"resolution", res}, {"window", {{"center", to_json(window.center)}, {"half_width", window.half_width}}},
                {"method", method}};
    GrayImage img;
    if (method == "escape") {
        const int max_iter = P.get<int>("max_iter", ctx.depth(256));
        const auto raster = escape_time_grid(f, window, res, max_iter, std::nullopt, ctx.cfg.workers);
        img = shade(raster);
        const auto bounded = std::count(raster.counts.begin(), raster.counts.end(), max_iter);
        result["bounded_fraction"] = static_cast<double>(bounded) / static_cast<double>(raster.counts.size());
        ctx.stamps["max_iter"] = max_iter;
        ctx.stamps["escape_radius"] = raster.escape_radius;
    } else if (method == "inverse") {
        InverseIterationOptions opt;
        opt.mode = SamplerMode::Cover;
        opt.n_samples = P.get<std::size_t>("n_samples", 200000);
        opt.seed = ctx.cfg.seed;
        opt.workers = ctx.cfg.workers;
        const auto cloud = julia_inverse_iteration(f, opt);
        std::vector<Complex> pts;
        for (const auto& p : cloud.points)
            if (p.is_finite()) pts.push_back(p.value());
        img = splat(pts, window, res);
        result["samples"] = cloud.points.size();
        ctx.stamps["n_samples"] = opt.n_samples;
        ctx.stamps["burn_in"] = opt.burn_in;
    } else {
        fail(ErrorCode::ConfigError, "method must be escape or inverse");
    }
    const std::string bytes = format == "png" ? encode_png(img) : encode_pgm(img);
    result["image"] = Context::artifact_entry("julia." + format, bytes);
    ctx.write("julia." + format, bytes);
    return result;
}

Json cmd_orbit_sample(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const Complex z0 = P.complex_or("z0", [&] { return default_base(f); });
    const int count = P.get<int>("count", 8);
    const int depth = ctx.depth(32);
    std::mt19937_64 rng(ctx.cfg.seed);
    Json orbits = Json::array();
    for (int i = 0; i < count; ++i) {
        const auto o = extend_random(f, make_orbit(f, z0), depth, rng);
        verify_orbit(f, o);
        orbits.push_back(orbit_json(o));
    }
    ctx.stamps["depth"] = depth;
    Json result{{"z0", to_json(z0)}, {"orbits", orbits}};
    ctx.write("orbits.json", orbits.dump(1) + "\n");
    return result;
}

Json cmd_pullback_trace(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const Complex z0 = P.complex_or("z0", [&] { return default_base(f); });
    const double radius = P.get<double>("radius", 0.05);
    const std::string branch = P.get<std::string>("branch", "random");
    PullbackOptions opt;
    opt.resolution = P.get<int>("resolution", 256);
    opt.max_degree = P.get<int>("max_degree", 4096);
    const int depth = ctx.depth(20);
    BackwardOrbit orbit;
    if (branch == "random") {
        orbit = random_orbit(f, z0, depth, ctx.cfg.seed);
    } else if (branch == "fixed") {
        orbit = fixed_lift(f, z0, depth);
    } else {
        fail(ErrorCode::ConfigError, "branch must be random or fixed");
    }
    const auto trace = pullback_disk(f, orbit, radius, opt, depth);
    Json levels = Json::array();
    std::ostringstream csv;
    csv << "level,diameter,local_degree,cumulative_degree\n";
    for (const auto& l : trace.levels) {
        levels.push_back({{"level", l.level},
                          {"anchor", to_json(l.anchor)},
                          {"diameter", l.diameter},
                          {"local_degree", l.local_degree},
                          {"cumulative_degree", l.cumulative_degree},
                          {"hurwitz_consistent", l.hurwitz_consistent}});
        csv << l.level << ',' << l.diameter << ',' << l.local_degree << ',' << l.cumulative_degree << '\n';
    }
    ctx.stamps["depth"] = depth;
    ctx.stamps["radius"] = radius;
    ctx.stamps["resolution"] = opt.resolution;
    ctx.write("trace.csv", csv.str());
    return Json{{"orbit", orbit_json(orbit)},
                {"levels", levels},
                {"truncated", trace.truncated},
                {"truncation_reason", trace.truncation_reason}};
}

Json cmd_mane_delta(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const Complex x = P.complex_or("x", [&] { return default_base(f); });
    const double eps = P.get<double>("eps", 0.1);
    ManeOptions opt;
    opt.resolution = P.get<int>("resolution", opt.resolution);
    opt.max_degree = P.get<int>("max_degree", opt.max_degree);
    opt.delta_min = P.get<double>("delta_min", opt.delta_min);
    const int depth = ctx.depth(8);
    const auto r = mane_delta_search(f, x, eps, depth, opt);
    ctx.stamps["depth"] = r.depth;
    ctx.stamps["eps"] = r.eps;
    ctx.stamps["delta_min"] = opt.delta_min;
    return Json{{"x", to_json(x)},
                {"delta", r.delta},
                {"max_diameter", r.max_diameter},
                {"components_checked", r.components_checked},
                {"rejected", r.rejected}};
}

Json chart_rows(Context& ctx, const std::vector<Complex>& pts, const std::vector<Complex>& values,
                const std::vector<double>& residuals, const std::vector<double>& functional) {
    Json rows = Json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "id,re,im,residual\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        rows.push_back({{"z", to_json(pts[i])},
                        {"value", to_json(values[i])},
                        {"residual", residuals[i]},
                        {"functional_residual", functional[i]}});
        csv << i << ',' << values[i].real() << ',' << values[i].imag() << ',' << residuals[i] << '\n';
    }
    ctx.write("chart.csv", csv.str());
    return rows;
}

Json cmd_chart(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const std::string& kind = ctx.cfg.variant;
    std::vector<Complex> pts, values;
    std::vector<double> residuals, functional;
    Json result{{"kind", kind}};

    if (kind == "koenigs") {
        const Complex alpha = P.complex_or("alpha", [&] { return default_base(f); });
        const double rho = koenigs_radius(f, alpha);
        std::vector<Complex> dflt;
        for (int k = 0; k < 8; ++k) dflt.push_back(alpha + std::polar(0.25 * rho, 2.0 * kPi * k / 8));
        pts = P.complex_list("points", dflt);
        LimitOptions opt{ctx.tol(1e-13), P.get<int>("max_iter", 200)};
        for (const auto& z : pts) {
            const auto v = koenigs_chart(f, alpha, z, opt);
            values.push_back(v.value);
            residuals.push_back(v.residual);
            functional.push_back(koenigs_residual(f, alpha, z, opt));
        }
        result["alpha"] = to_json(alpha);
        result["multiplier"] = to_json(f.derivative(alpha));
        result["radius"] = rho;
        ctx.stamps["tol"] = opt.tol;
        ctx.stamps["max_iter"] = opt.max_iter;
    } else if (kind == "bottcher") {
        const Json a = P.raw("alpha", f.is_polynomial() ? Json("inf") : Json(nullptr));
        if (a.is_null()) fail(ErrorCode::ConfigError, "bottcher needs alpha for a non-polynomial map");
        SpherePoint alpha;
        try {
            alpha = a.is_string() && a.get<std::string>() != "inf" ? SpherePoint(parse_complex(a.get<std::string>()))
                                                                    : sphere_point_from_json(a);
        } catch (const Error&) {
            fail(ErrorCode::ConfigError, "alpha is not a sphere point");
        } catch (const Json::exception&) {
            fail(ErrorCode::ConfigError, "alpha is not a sphere point");
        }
        std::vector<Complex> dflt;
        const double R = alpha.is_infinite() ? 2.0 * default_escape_radius(f.as_polynomial()) : 0.1;
        for (int k = 0; k < 8; ++k)
            dflt.push_back((alpha.is_infinite() ? Complex(0.0) : alpha.value()) + std::polar(R, 2.0 * kPi * k / 8));
        pts = P.complex_list("points", dflt);
        LimitOptions opt{ctx.tol(1e-13), P.get<int>("max_iter", 200)};
        const int k = f.local_degree(alpha);
        for (const auto& z : pts) {
            const auto v = bottcher_chart(f, alpha, z, opt);
            const auto w = bottcher_chart(f, alpha, f(z), opt);
            values.push_back(v.value);
            residuals.push_back(v.residual);
            functional.push_back(std::abs(w.value - std::pow(v.value, k)));
        }
        result["alpha"] = to_json(alpha);
        result["local_degree"] = k;
        ctx.stamps["tol"] = opt.tol;
        ctx.stamps["max_iter"] = opt.max_iter;
    } else if (kind == "fatou") {
        std::optional<CycleInfo> parabolic;
        for (const auto& c : find_cycles(f, 1))
            if (c.cls == CycleClass::Parabolic && c.points[0].is_finite()) parabolic = c;
        const Complex alpha = P.complex_or("alpha", [&] {
            if (!parabolic) fail(ErrorCode::NotParabolic, "map has no finite parabolic fixed point");
            return parabolic->points[0].value();
        });
        const std::string petal_name = P.get<std::string>("petal", "attracting");
        if (petal_name != "attracting" && petal_name != "repelling")
            fail(ErrorCode::ConfigError, "petal must be attracting or repelling");
        const Petal petal = petal_name == "attracting" ? Petal::Attracting : Petal::Repelling;
        // Default points along the petal axis, found from f^q(alpha + h) = alpha + h + a h^2.
        int q = 1;
        const Complex lambda = f.derivative(alpha);
        while (q < RationalMap::kMaxRootOfUnityOrder && std::abs(std::pow(lambda, q) - 1.0) > 1e-6) ++q;
        const RationalMap g = f.iterate(q);
        const Complex a = g.taylor_at(alpha, 2)[2];
        if (std::abs(a) < 1e-12) fail(ErrorCode::UnsupportedChart, "degenerate parabolic point");
        const double sgn = petal == Petal::Attracting ? -1.0 : 1.0;
        std::vector<Complex> dflt;
        for (double s : {0.05, 0.1})
            for (double th : {-0.3, 0.0, 0.3}) dflt.push_back(alpha + sgn * std::polar(s, th) / a);
        pts = P.complex_list("points", dflt);
        FatouOptions opt;
        opt.depth = ctx.depth(opt.depth);
        opt.tol = ctx.tol(opt.tol);
        for (const auto& z : pts) {
            const auto v = fatou_coordinate(f, alpha, petal, z, opt);
            values.push_back(v.value);
            residuals.push_back(v.residual);
            if (petal == Petal::Attracting) {
                const auto w = fatou_coordinate(f, alpha, petal, g(z).value(), opt);
                functional.push_back(std::abs(w.value - v.value - 1.0));
            } else {
                functional.push_back(std::nan(""));
            }
        }
        result["alpha"] = to_json(alpha);
        result["period_of_multiplier"] = q;
        result["petal"] = petal_name;
        ctx.stamps["depth"] = opt.depth;
        ctx.stamps["tol"] = opt.tol;
    } else if (kind == "affine") {
        const Complex z0 = P.complex_or("z0", [&] { return default_base(f); });
        const std::string branch = P.get<std::string>("branch", "random");
        const int depth = ctx.depth(40);
        BackwardOrbit base;
        if (branch == "random") {
            base = random_orbit(f, z0, depth, ctx.cfg.seed);
        } else if (branch == "fixed") {
            base = fixed_lift(f, z0, depth);
        } else {
            fail(ErrorCode::ConfigError, "branch must be random or fixed");
        }
        std::vector<Complex> dflt;
        for (int k = 0; k < 5; ++k) dflt.push_back(z0 + std::polar(0.002, 0.4 + 2.0 * kPi * k / 5));
        pts = P.complex_list("points", dflt);
        std::vector<BackwardOrbit> queries;
        for (const auto& z : pts) queries.push_back(make_orbit(f, z));
        AffineOptions opt;
        opt.tol = ctx.tol(opt.tol);
        opt.workers = ctx.cfg.workers;
        const auto probe = affine_chart(f, base, queries, depth, opt);
        Json conv = Json::array(), koebe = Json::array(), rates = Json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            values.push_back(probe.values[i]);
            residuals.push_back(probe.residuals[i].empty() ? 0.0 : probe.residuals[i].back());
            // The chart at the shifted orbit is f'(z0) times this one.
            functional.push_back(std::nan(""));
            conv.push_back(static_cast<bool>(probe.converged[i]));
            koebe.push_back(static_cast<bool>(probe.koebe_ok[i]));
            rates.push_back(finite_or_null(geometric_rate(probe.residuals[i])));
        }
        result["base_orbit"] = orbit_json(base);
        result["normalization_level"] = probe.normalization_level;
        result["converged"] = conv;
        result["koebe_ok"] = koebe;
        result["geometric_rates"] = rates;
        ctx.stamps["depth"] = depth;
        ctx.stamps["tol"] = opt.tol;
    } else {
        fail(ErrorCode::ConfigError, "chart kind must be koenigs, bottcher, fatou or affine");
    }
    Json rows = chart_rows(ctx, pts, values, residuals, functional);
    for (auto& r : rows)
        if (r["functional_residual"].is_number() && std::isnan(r["functional_residual"].get<double>()))
            r["functional_residual"] = nullptr;
    result["rows"] = rows;
    return result;
}

Json cmd_scenery_frames(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const bool given = ctx.cfg.params.contains("z0");
    const Complex z0 = P.complex_or("z0", [&] { return default_base(f); });
    const std::string branch = P.get<std::string>("branch", given ? "random" : "fixed");
    const auto levels = P.get<std::vector<int>>("levels", {2, 4, 6, 8});
    const double half = P.get<double>("half_width", 1.0);
    const int res = P.get<int>("resolution", 256);
    FrameOptions opt;
    opt.n_samples = P.get<std::size_t>("n_samples", opt.n_samples);
    opt.seed = ctx.cfg.seed;
    opt.workers = ctx.cfg.workers;
    if (levels.empty()) fail(ErrorCode::ConfigError, "levels must be non-empty");
    const int depth = *std::max_element(levels.begin(), levels.end());
    if (*std::min_element(levels.begin(), levels.end()) < 0) fail(ErrorCode::ConfigError, "levels must be >= 0");
    BackwardOrbit orbit;
    if (branch == "random") {
        orbit = random_orbit(f, z0, depth, ctx.cfg.seed);
    } else if (branch == "fixed") {
        orbit = fixed_lift(f, z0, depth);
    } else {
        fail(ErrorCode::ConfigError, "branch must be random or fixed");
    }
    const Window window{0.0, half};
    std::vector<SceneryFrame> frames;
    Json t_used = Json::array();
    if (ctx.cfg.animate) {
        std::vector<double> dflt;
        for (int i = 0; i < 12; ++i) dflt.push_back(0.1 * i);
        const auto ts = P.get<std::vector<double>>("t_values", dflt);
        frames = flow_frames(rescaled_frame(f, orbit, depth, window, opt), ts);
        for (double t : ts) t_used.push_back(t);
    } else {
        for (int n : levels) frames.push_back(rescaled_frame(f, orbit, n, window, opt));
    }
    Json out = Json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& fr = frames[i];
        std::vector<Complex> pts;
        for (const auto& p : fr.cloud.points) pts.push_back(p.value());
        Json entry{{"index", i},
                   {"level", fr.orbit_depth},
                   {"scale_log", fr.scale_log},
                   {"scale", to_json(fr.scale)},
                   {"offset", to_json(fr.offset)},
                   {"points", pts.size()}};
        if (i > 0 && !pts.empty() && !frames[i - 1].cloud.points.empty())
            entry["hausdorff_to_previous"] = hausdorff_distance(frames[i - 1].cloud, fr.cloud, window);
        else
            entry["hausdorff_to_previous"] = nullptr;
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", i);
        ctx.write(name, encode_pgm(splat(pts, window, res)));
        std::snprintf(name, sizeof name, "frame_%03zu.csv", i);
        ctx.write(name, cloud_csv(fr.cloud.points));
        out.push_back(entry);
    }
    ctx.stamps["orbit_depth"] = depth;
    ctx.stamps["n_samples"] = opt.n_samples;
    Json result{{"orbit", orbit_json(orbit)}, {"window", {{"center", to_json(window.center)}, {"half_width", half}}},
                {"frames", out}};
    if (ctx.cfg.animate) result["t_values"] = t_used;
    return result;
}

Json cmd_conical_test(Context& ctx) {
    const RationalMap f = ctx.map();
    auto& P = ctx.params;
    const double r = P.get<double>("r", 0.05);
    const int bound = P.get<int>("degree_bound", 4);
    const int count = P.get<int>("count", 20);
    ConicalOptions opt;
    opt.cloud_samples = P.get<std::size_t>("cloud_samples", opt.cloud_samples);
    opt.seed = ctx.cfg.seed;
    opt.workers = ctx.cfg.workers;
    const int depth = ctx.depth(40);
    std::vector<Complex> dflt;
    InverseIterationOptions io;
    io.mode = SamplerMode::Cover;
    io.n_samples = static_cast<std::size_t>(std::max(count, 0));
    io.seed = mix_seed(ctx.cfg.seed, 7);
    for (const auto& p : julia_inverse_iteration(f, io).points)
        if (p.is_finite()) dflt.push_back(p.value());
    const auto pts = P.complex_list("points", dflt);
    Json verdicts = Json::array();
    std::size_t evidence = 0;
    for (const auto& z : pts) {
        const auto v = conical_test(f, z, r, bound, depth, opt);
        if (v.verdict == ConicalOutcome::ConicalEvidence) ++evidence;
        verdicts.push_back({{"point", to_json(z)},
                            {"verdict", to_string(v.verdict)},
                            {"hit_rate", v.hit_rate},
                            {"julia_distance", v.julia_distance},
                            {"degrees", v.degrees},
                            {"witnesses", v.witnesses}});
    }
    ctx.stamps["depth"] = depth;
    ctx.stamps["radius"] = r;
    ctx.stamps["degree_bound"] = bound;
    ctx.stamps["burn_in"] = opt.burn_in;
    ctx.stamps["hit_rate"] = opt.hit_rate;
    ctx.stamps["julia_tol"] = opt.julia_tol;
    return Json{{"verdicts", verdicts}, {"conical_evidence", evidence}, {"tested", pts.size()}};
}

Json cmd_hull_report(Context& ctx) {
    auto& P = ctx.params;
    const std::string source = P.get<std::string>("source", ctx.cfg.map.is_null() ? "circle" : "julia");
    std::vector<Complex> E;
    if (source == "julia") {
        const RationalMap f = ctx.map();
        InverseIterationOptions io;
        io.mode = SamplerMode::Cover;
        io.n_samples = P.get<std::size_t>("n_samples", 2000);
        io.seed = ctx.cfg.seed;
        io.workers = ctx.cfg.workers;
        for (const auto& p : julia_inverse_iteration(f, io).points)
            if (p.is_finite()) E.push_back(p.value());
        ctx.stamps["n_samples"] = io.n_samples;
    } else if (source == "circle") {
        const int n = P.get<int>("circle_points", 360);
        for (int k = 0; k < n; ++k) E.push_back(std::polar(1.0, 2.0 * kPi * k / n));
    } else if (source == "points") {
        E = P.complex_list("points", {});
    } else {
        fail(ErrorCode::ConfigError, "source must be julia, circle or points");
    }
    const HullModel model(E);
    if (model.degenerate()) fail(ErrorCode::DegenerateInput, "hull needs at least two distinct points");
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& z : model.points()) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag());
        y1 = std::max(y1, z.imag());
    }
    const int g = P.get<int>("grid", 9);
    if (g < 2) fail(ErrorCode::ConfigError, "grid must be at least 2");
    Json roof = Json::array();
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const Complex z(x0 + (x1 - x0) * j / (g - 1), y0 + (y1 - y0) * i / (g - 1));
            roof.push_back({{"z", to_json(z)}, {"roof", finite_or_null(roof_height(model, z))}});
        }
    std::vector<HalfSpacePoint> probes;
    const Json given = P.raw("probes", nullptr);
    if (given.is_array()) {
        for (const auto& p : given) {
            if (!p.is_array() || p.size() != 3 || !p[2].is_number() || !(p[2].get<double>() > 0.0))
                fail(ErrorCode::ConfigError, "probes are [re, im, t] with t > 0");
            probes.push_back({Complex(p[0].get<double>(), p[1].get<double>()), p[2].get<double>()});
        }
    } else if (given.is_null()) {
        std::mt19937_64 rng(mix_seed(ctx.cfg.seed, 11));
        std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1), ut(0.0, 1.0);
        const double span = std::max(x1 - x0, y1 - y0);
        for (int i = 0; i < 20; ++i) probes.push_back({{ux(rng), uy(rng)}, span * (0.02 + ut(rng))});
    } else {
        fail(ErrorCode::ConfigError, "probes must be a list");
    }
    Json rows = Json::array();
    std::vector<HalfSpacePoint> inside;
    for (const auto& p : probes) {
        const auto np = nearest_point(model, p);
        if (np.distance == 0.0) inside.push_back(p);
        rows.push_back({{"probe", {p.z.real(), p.z.imag(), p.t}},
                        {"distance", np.distance},
                        {"nearest", {np.point.z.real(), np.point.z.imag(), np.point.t}},
                        {"non_unique", np.non_unique}});
    }
    Json result{{"source", source},
                {"points", model.points().size()},
                {"triangles", model.triangles().size()},
                {"walls", model.walls().size()},
                {"hull_vertices", model.convex_hull().size()},
                {"roof_grid", roof},
                {"probes", rows},
                {"curtain_gap", inside.empty() ? Json(nullptr) : Json(curtain_gap(model, model.points(), inside))}};
    if (P.get<bool>("obj", false)) {
        std::ostringstream os;
        write_obj(model, os, P.get<int>("obj_subdivisions", 4), P.get<double>("obj_height", 2.0));
        ctx.write("hull.obj", os.str());
    }
    ctx.stamps["grid"] = g;
    ctx.stamps["distance_method"] = "closed_form";
    return result;
}

Json cmd_extend_homeo(Context& ctx) {
    auto& P = ctx.params;
    const Json phi_spec = P.raw("phi", Json{{"kind", "shear"}, {"k", 0.1}});
    if (!phi_spec.is_object() || !phi_spec.contains("kind")) fail(ErrorCode::ConfigError, "phi needs a kind");
    std::function<Complex(Complex)> phi;
    std::optional<RationalMap> f;
    const std::string kind = phi_spec.value("kind", "");
    try {
        if (kind == "similarity") {
            const Complex a = complex_from_json(phi_spec.at("a")), b = complex_from_json(phi_spec.value("b", Json::array({0.0, 0.0})));
            phi = [a, b](Complex z) { return a * z + b; };
        } else if (kind == "shear") {
            const double k = phi_spec.at("k").get<double>();
            phi = [k](Complex z) { return z + k * std::conj(z); };
        } else if (kind == "map") {
            f = ctx.map();
            phi = [&f](Complex z) { return f->eval_finite(z); };
        } else {
            fail(ErrorCode::ConfigError, "phi kind must be similarity, shear or map");
        }
    } catch (const Json::exception&) {
        fail(ErrorCode::ConfigError, "malformed phi");
    }
    ExtendOptions opt;
    opt.circle_resolution = P.get<int>("circle_resolution", opt.circle_resolution);
    const Json pts = P.raw("points", Json::array({Json::array({0.0, 0.0, 1.0})}));
    if (!pts.is_array()) fail(ErrorCode::ConfigError, "points must be a list of [re, im, t]");
    Json rows = Json::array();
    for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 3 || !p[2].is_number() || !(p[2].get<double>() > 0.0))
            fail(ErrorCode::ConfigError, "points are [re, im, t] with t > 0");
        const HalfSpacePoint q{Complex(p[0].get<double>(), p[1].get<double>()), p[2].get<double>()};
        const auto e = extend_homeo(phi, q, opt);
        rows.push_back({{"point", {q.z.real(), q.z.imag(), q.t}}, {"image", {e.z.real(), e.z.imag(), e.t}}});
    }
    ctx.stamps["circle_resolution"] = opt.circle_resolution;
    ctx.stamps["refine_steps"] = opt.refine_steps;
    return Json{{"phi", phi_spec}, {"rows", rows}};
}

using Command = Json (*)(Context&);

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{
        {"map-info", cmd_map_info},         {"julia-render", cmd_julia_render}, {"orbit-sample", cmd_orbit_sample},
        {"pullback-trace", cmd_pullback_trace}, {"mane-delta", cmd_mane_delta}, {"chart", cmd_chart},
        {"scenery-frames", cmd_scenery_frames}, {"conical-test", cmd_conical_test}, {"hull-report", cmd_hull_report},
        {"extend-homeo", cmd_extend_homeo},
    };
    return table;
}

Json error_json(ErrorCode code, const std::string& message) {
    return Json{{"code", std::string(to_string(code))}, {"message", message}};
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"map-info",       "julia-render",   "orbit-sample", "pullback-trace",
                                                "mane-delta",     "chart",          "scenery-frames", "conical-test",
                                                "hull-report",    "extend-homeo"};
    return names;
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["command"] = c.command;
    j["variant"] = c.variant;
    j["map"] = c.map;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["depth"] = c.depth ? Json(*c.depth) : Json(nullptr);
    j["tol"] = c.tol ? Json(*c.tol) : Json(nullptr);
    j["out"] = c.out;
    j["animate"] = c.animate;
    j["params"] = c.params;
    return j;
}

ExperimentConfig config_from_json(const Json& j) {
    if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
    static const std::vector<std::string> known{"command", "variant", "map", "seed", "workers",
                                                "depth",   "tol",     "out", "animate", "params"};
    for (const auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) fail(ErrorCode::ConfigError, "unknown config field '" + k + "'");
    ExperimentConfig c;
    try {
        c.command = j.value("command", "");
        c.variant = j.value("variant", "");
        c.map = j.value("map", Json(nullptr));
        c.seed = j.value("seed", std::uint64_t{1});
        c.workers = j.value("workers", 1);
        if (j.contains("depth") && !j.at("depth").is_null()) c.depth = j.at("depth").get<int>();
        if (j.contains("tol") && !j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
        c.out = j.value("out", "");
        c.animate = j.value("animate", false);
        c.params = j.value("params", Json::object());
    } catch (const Json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
    }
    if (!c.params.is_object()) fail(ErrorCode::ConfigError, "params must be an object");
    return c;
}

RunOutcome run(const ExperimentConfig& config) {
    Json report;
    report["schema"] = kReportSchema;
    report["tool"] = "leaflab";
    report["version"] = kToolVersion;
    report["command"] = config.command;
    RunOutcome outcome;
    Json effective = config_to_json(config);
    try {
        const auto it = commands().find(config.command);
        if (it == commands().end()) fail(ErrorCode::ConfigError, "unknown command '" + config.command + "'");
        if (config.workers < 1) fail(ErrorCode::ConfigError, "workers must be >= 1");
        if (config.depth && *config.depth < 0) fail(ErrorCode::ConfigError, "depth must be >= 0");
        if (config.tol && !(*config.tol > 0.0)) fail(ErrorCode::ConfigError, "tol must be positive");
        if (config.command == "chart" && config.variant.empty()) fail(ErrorCode::ConfigError, "chart needs a kind");
        Context ctx{config, Params(config.params)};
        Json result = it->second(ctx);
        effective["params"] = ctx.params.finish();
        report["config"] = effective;
        report["stamps"] = ctx.stamps;
        report["result"] = std::move(result);
        report["artifacts"] = ctx.artifacts;
        outcome.exit_code = 0;
    } catch (const Error& e) {
        report["config"] = effective;
        report["error"] = error_json(e.code(), e.what());
        outcome.exit_code = e.code() == ErrorCode::ConfigError ? 2 : 3;
    } catch (const Json::exception& e) {
        report["config"] = effective;
        report["error"] = error_json(ErrorCode::ConfigError, e.what());
        outcome.exit_code = 2;
    }
    if (!config.out.empty()) {
        try {
            std::error_code ec;
            std::filesystem::create_directories(config.out, ec);
            write_text_file((std::filesystem::path(config.out) / "report.json").string(), report.dump(2) + "\n");
        } catch (const Error& e) {
            report["error"] = error_json(e.code(), e.what());
            outcome.exit_code = 3;
        }
    }
    outcome.report = std::move(report);
    return outcome;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"leaflab: natural extensions, charts, scenery and hulls of rational maps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    std::string map_spec, config_path, out_dir, save_config;
    std::uint64_t seed = 1;
    int workers = 1, depth = 0;
    double tol = 0.0;
    std::vector<std::string> sets;
    auto* o_map = app.add_option("--map", map_spec, "map name (chebyshev:d, quad:c) or JSON object");
    auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override it");
    auto* o_seed = app.add_option("--seed", seed, "seed for every random choice");
    auto* o_out = app.add_option("--out", out_dir, "directory for report.json and artifacts");
    auto* o_workers = app.add_option("--workers", workers, "worker threads (results do not depend on it)");
    auto* o_depth = app.add_option("--depth", depth, "depth override");
    auto* o_tol = app.add_option("--tol", tol, "tolerance override");
    app.add_option("--set", sets, "command parameter key=value (value parsed as JSON when possible)");
    app.add_option("--save-config", save_config, "write the resolved config to this file");

    std::string chart_kind;
    bool animate = false;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : command_names()) subs[name] = app.add_subcommand(name)->fallthrough();
    subs["chart"]->add_option("kind", chart_kind, "koenigs, bottcher, fatou or affine")->required();
    subs["scenery-frames"]->add_flag("--animate", animate, "emit the scaling-flow sequence");
    subs["map-info"]->description("degree, critical data and postcritical set");
    subs["julia-render"]->description("escape-time or inverse-iteration raster");
    subs["orbit-sample"]->description("random backward orbits");
    subs["pullback-trace"]->description("pullbacks of a disk along a backward orbit");
    subs["mane-delta"]->description("largest delta with small pullbacks");
    subs["chart"]->description("linearising coordinates");
    subs["scenery-frames"]->description("rescaled Julia frames along a backward orbit");
    subs["conical-test"]->description("bounded-degree pullback test at Julia points");
    subs["hull-report"]->description("hyperbolic convex hull of a planar sample");
    subs["extend-homeo"]->description("extension of a planar map to upper half-space");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    ExperimentConfig cfg;
    try {
        if (o_config->count()) cfg = config_from_json(Json::parse(read_text_file(config_path)));
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) {
                if (!cfg.command.empty() && cfg.command != name) cfg.params = Json::object();
                cfg.command = name;
            }
        if (cfg.command == "chart") cfg.variant = chart_kind;
        if (cfg.command == "scenery-frames" && animate) cfg.animate = true;
        if (o_map->count()) {
            const auto t = map_spec.find_first_not_of(" \t");
            cfg.map = t != std::string::npos && map_spec[t] == '{' ? Json::parse(map_spec) : Json(map_spec);
        }
        if (o_seed->count()) cfg.seed = seed;
        if (o_out->count()) cfg.out = out_dir;
        if (o_workers->count()) cfg.workers = workers;
        if (o_depth->count()) cfg.depth = depth;
        if (o_tol->count()) cfg.tol = tol;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) fail(ErrorCode::ConfigError, "--set expects key=value");
            const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
            Json v = Json::parse(value, nullptr, false);
            cfg.params[key] = v.is_discarded() ? Json(value) : v;
        }
        if (!save_config.empty()) write_text_file(save_config, config_to_json(cfg).dump(2) + "\n");
    } catch (const Error& e) {
        Json report{{"schema", kReportSchema}, {"tool", "leaflab"}, {"version", kToolVersion},
                    {"error", error_json(e.code() == ErrorCode::IoError ? ErrorCode::ConfigError : e.code(), e.what())}};
        out << report.dump(2) << '\n';
        return 2;
    } catch (const Json::exception& e) {
        Json report{{"schema", kReportSchema}, {"tool", "leaflab"}, {"version", kToolVersion},
                    {"error", error_json(ErrorCode::ConfigError, e.what())}};
        out << report.dump(2) << '\n';
        return 2;
    }
    const RunOutcome r = run(cfg);
    out << r.report.dump(2) << '\n';
    return r.exit_code;
}

}  // namespace leaflab

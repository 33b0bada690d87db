#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "leaflab/charts.hpp"
#include "leaflab/cli.hpp"
#include "leaflab/errors.hpp"
#include "leaflab/hull3.hpp"
#include "leaflab/scenery.hpp"

namespace py = pybind11;
using namespace leaflab;

namespace {

// Infinity crosses the boundary as float("inf").
py::object sphere_to_py(const SpherePoint& p) {
    if (p.is_infinite()) return py::float_(INFINITY);
    return py::cast(p.value());
}

SpherePoint sphere_from_py(const py::object& o) {
    if (py::isinstance<py::float_>(o) && std::isinf(o.cast<double>())) return SpherePoint::infinity();
    return SpherePoint(o.cast<Complex>());
}

py::list sphere_list(const std::vector<SpherePoint>& pts) {
    py::list out;
    for (const auto& p : pts) out.append(sphere_to_py(p));
    return out;
}

RationalMap make_map(const std::string& spec) {
    return map_from_spec(spec);
}

py::dict cycle_dict(const CycleInfo& c) {
    py::dict d;
    d["points"] = sphere_list(c.points);
    d["period"] = c.period;
    d["multiplier"] = c.multiplier;
    d["class"] = to_string(c.cls);
    return d;
}

BackwardOrbit orbit_of(const RationalMap& f, Complex z0, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return extend_random(f, make_orbit(f, z0), depth, rng);
}

}  // namespace

PYBIND11_MODULE(_leaflab, m) {
    m.doc() = "Natural extensions, charts, scenery and hyperbolic hulls of rational maps";

    // Leaked on purpose: the type must outlive module teardown.
    static py::handle exc_type = py::exception<Error>(m, "LeaflabError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = exc_type(py::str(e.what()));
            err.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(exc_type.ptr(), err.ptr());
        }
    });

    py::class_<RationalMap>(m, "RationalMap")
        .def(py::init([](const std::vector<Complex>& num, const std::vector<Complex>& den) {
                 return RationalMap(Polynomial(num), Polynomial(den));
             }),
             py::arg("num"), py::arg("den") = std::vector<Complex>{1.0})
        .def_static("from_spec", &make_map, py::arg("spec"))
        .def_property_readonly("degree", &RationalMap::degree)
        .def_property_readonly("is_polynomial", &RationalMap::is_polynomial)
        .def("__call__", [](const RationalMap& f, const py::object& z) { return sphere_to_py(f(sphere_from_py(z))); })
        .def("derivative", &RationalMap::derivative)
        .def("preimages", [](const RationalMap& f, const py::object& w) { return sphere_list(f.preimages(sphere_from_py(w))); })
        .def("critical_points",
             [](const RationalMap& f) {
                 py::list out;
                 for (const auto& c : f.critical_points()) out.append(py::make_tuple(sphere_to_py(c.point), c.multiplicity));
                 return out;
             })
        .def("critical_values", [](const RationalMap& f) { return sphere_list(f.critical_values()); })
        .def("iterate", &RationalMap::iterate)
        .def("__repr__", [](const RationalMap& f) { return "<RationalMap " + f.describe() + ">"; });

    m.def("quadratic", &quadratic, py::arg("c"));
    m.def("chebyshev", &chebyshev, py::arg("d"));

    m.def(
        "find_cycles",
        [](const RationalMap& f, int period) {
            py::list out;
            for (const auto& c : find_cycles(f, period)) out.append(cycle_dict(c));
            return out;
        },
        py::arg("f"), py::arg("period"));

    m.def(
        "postcritical_set",
        [](const RationalMap& f, int depth) {
            const auto r = postcritical_scan(f, depth);
            return py::make_tuple(sphere_list(r.postcritical_set), r.finite);
        },
        py::arg("f"), py::arg("depth") = 64);

    m.def(
        "julia_samples",
        [](const RationalMap& f, std::size_t n, std::uint64_t seed, const std::string& mode, int workers) {
            InverseIterationOptions opt;
            opt.n_samples = n;
            opt.seed = seed;
            opt.workers = workers;
            if (mode == "cover") {
                opt.mode = SamplerMode::Cover;
            } else if (mode != "chain") {
                throw py::value_error("mode must be 'chain' or 'cover'");
            }
            const auto cloud = julia_inverse_iteration(f, opt);
            py::array_t<Complex> out(static_cast<py::ssize_t>(cloud.points.size()));
            auto buf = out.mutable_unchecked<1>();
            for (std::size_t i = 0; i < cloud.points.size(); ++i)
                buf(static_cast<py::ssize_t>(i)) = cloud.points[i].is_finite() ? cloud.points[i].value() : Complex(INFINITY, 0.0);
            return out;
        },
        py::arg("f"), py::arg("n") = 10000, py::arg("seed") = 1, py::arg("mode") = "chain", py::arg("workers") = 1);

    m.def(
        "escape_time",
        [](const RationalMap& f, Complex center, double half_width, int resolution, int max_iter, int workers) {
            const auto r = escape_time_grid(f, Window{center, half_width}, resolution, max_iter, std::nullopt, workers);
            py::array_t<std::int32_t> out({resolution, resolution});
            std::copy(r.counts.begin(), r.counts.end(), out.mutable_data());
            return out;
        },
        py::arg("f"), py::arg("center") = Complex(0.0), py::arg("half_width") = 2.0, py::arg("resolution") = 256,
        py::arg("max_iter") = 256, py::arg("workers") = 1);

    m.def(
        "pullback_diameters",
        [](const RationalMap& f, Complex z0, double radius, int depth, std::uint64_t seed) {
            const auto trace = pullback_disk(f, orbit_of(f, z0, depth, seed), radius);
            std::vector<double> d;
            for (const auto& l : trace.levels) d.push_back(l.diameter);
            return d;
        },
        py::arg("f"), py::arg("z0"), py::arg("radius"), py::arg("depth"), py::arg("seed") = 1);

    m.def(
        "koenigs",
        [](const RationalMap& f, Complex alpha, Complex z) { return koenigs_chart(f, alpha, z).value; },
        py::arg("f"), py::arg("alpha"), py::arg("z"));
    m.def(
        "bottcher",
        [](const RationalMap& f, const py::object& alpha, const py::object& z) {
            return bottcher_chart(f, sphere_from_py(alpha), sphere_from_py(z)).value;
        },
        py::arg("f"), py::arg("alpha"), py::arg("z"));
    m.def(
        "fatou",
        [](const RationalMap& f, Complex alpha, Complex z, int depth, bool attracting) {
            FatouOptions opt;
            opt.depth = depth;
            return fatou_coordinate(f, alpha, attracting ? Petal::Attracting : Petal::Repelling, z, opt).value;
        },
        py::arg("f"), py::arg("alpha"), py::arg("z"), py::arg("depth") = 10000, py::arg("attracting") = true);

    m.def(
        "branching_profile",
        [](const RationalMap& f, Complex alpha, int depth) {
            for (const auto& c : find_cycles(f, 1))
                if (c.points[0].is_finite() && std::abs(c.points[0].value() - alpha) < 1e-9) return branching_profile(f, c, depth);
            throw Error(ErrorCode::InvalidArgument, "alpha is not a finite fixed point");
        },
        py::arg("f"), py::arg("alpha"), py::arg("depth"));

    m.def(
        "conical_test",
        [](const RationalMap& f, Complex z0, double r, int degree_bound, int depth) {
            const auto v = conical_test(f, z0, r, degree_bound, depth);
            py::dict d;
            d["verdict"] = to_string(v.verdict);
            d["degrees"] = v.degrees;
            d["hit_rate"] = v.hit_rate;
            return d;
        },
        py::arg("f"), py::arg("z0"), py::arg("r") = 0.05, py::arg("degree_bound") = 4, py::arg("depth") = 40);

    py::class_<HullModel>(m, "HullModel")
        .def(py::init<std::vector<Complex>>(), py::arg("points"))
        .def_property_readonly("points", &HullModel::points)
        .def_property_readonly("triangles", &HullModel::triangles)
        .def("roof_height", [](const HullModel& h, Complex z) { return roof_height(h, z); })
        .def("distance", [](const HullModel& h, Complex z, double t) { return hull_distance(h, {z, t}); })
        .def("nearest_point", [](const HullModel& h, Complex z, double t) {
            const auto n = nearest_point(h, {z, t});
            return py::make_tuple(n.point.z, n.point.t, n.distance);
        });

    m.def(
        "hyp_dist",
        [](Complex z1, double t1, Complex z2, double t2) { return hyp_dist({z1, t1}, {z2, t2}); },
        py::arg("z1"), py::arg("t1"), py::arg("z2"), py::arg("t2"));

    m.def(
        "extend_homeo",
        [](const std::function<Complex(Complex)>& phi, Complex z, double t) {
            const auto e = extend_homeo(phi, {z, t});
            return py::make_tuple(e.z, e.t);
        },
        py::arg("phi"), py::arg("z"), py::arg("t"));

    // Runs a CLI command from a config dict; returns (exit_code, report dict).
    m.def(
        "run",
        [](const py::dict& config) {
            const auto json = py::module_::import("json");
            const std::string text = json.attr("dumps")(config).cast<std::string>();
            RunOutcome r;
            try {
                r = run(config_from_json(Json::parse(text)));
            } catch (const Error& e) {
                r.exit_code = 2;
                r.report = Json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
            }
            return py::make_tuple(r.exit_code, json.attr("loads")(r.report.dump()));
        },
        py::arg("config"));

    m.attr("__version__") = kToolVersion;
}

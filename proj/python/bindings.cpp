#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/cli.hpp"
#include "vsheet/concentration.hpp"
#include "vsheet/energies.hpp"
#include "vsheet/measure_io.hpp"
#include "vsheet/spirals.hpp"

namespace py = pybind11;
using namespace vsheet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<PlanePoint> points_from(const Array& xy) {
    if (xy.ndim() != 2 || xy.shape(1) != 2) throw py::value_error("expected an (n, 2) array of points");
    const auto r = xy.unchecked<2>();
    std::vector<PlanePoint> pts(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) pts[i] = {r(i, 0), r(i, 1)};
    return pts;
}

Array points_to(std::span<const PlanePoint> pts) {
    Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        w(i, 0) = pts[i].x;
        w(i, 1) = pts[i].y;
    }
    return out;
}

template <class T>
Array vec_to(std::span<const T> v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

AtomicMeasure atomic_from(const Array& xy, const Array& weights) {
    const auto pts = points_from(xy);
    if (weights.ndim() != 1 || static_cast<std::size_t>(weights.shape(0)) != pts.size()) {
        throw py::value_error("need one weight per point");
    }
    std::vector<Atom> atoms(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) atoms[i] = {pts[i], weights.data()[i]};
    return AtomicMeasure(std::move(atoms));
}

template <class M>
void bind_measure_functions(py::module_& m) {
    m.def("ball_mass", py::overload_cast<const M&, PlanePoint, double>(&ball_mass), py::arg("mu"), py::arg("center"),
          py::arg("r"));
    m.def(
        "ball_mass_profile",
        [](const M& mu, PlanePoint c, std::vector<double> radii) { return ball_mass_profile(mu, c, radii); },
        py::arg("mu"), py::arg("center"), py::arg("radii"));
    m.def("hahn_decompose", [](const M& mu) {
        auto d = hahn_decompose(mu);
        return py::make_tuple(std::move(d.positive), std::move(d.negative));
    });
    m.def("total_variation", py::overload_cast<const M&>(&total_variation));
    m.def("total_mass", py::overload_cast<const M&>(&total_mass));
    m.def("support_diameter", py::overload_cast<const M&>(&support_diameter));
    m.def("t_energy_direct", py::overload_cast<const M&, double>(&t_energy_direct), py::arg("mu"), py::arg("s"));
    m.def("t_energy_layer_cake", py::overload_cast<const M&, double, const RadialGrid&>(&t_energy_layer_cake),
          py::arg("mu"), py::arg("s"), py::arg("grid") = RadialGrid{});
    m.def("t_energy_fourier", py::overload_cast<const M&, double, const QuadratureGrid&>(&t_energy_fourier),
          py::arg("mu"), py::arg("s"), py::arg("grid") = QuadratureGrid{});
    m.def(
        "h_minus1_truncated", [](const M& mu, double k) { return h_minus1_truncated(mu, k); }, py::arg("mu"),
        py::arg("cutoff"));
    m.def("morrey_norm", py::overload_cast<const M&, double, const MorreyOptions&>(&morrey_norm), py::arg("mu"),
          py::arg("p"), py::arg("options") = MorreyOptions{});
    m.def(
        "scaling_exponent_fit",
        [](const M& mu, PlanePoint c, std::vector<double> radii) { return scaling_exponent_fit(mu, c, radii); },
        py::arg("mu"), py::arg("center"), py::arg("radii"));
    m.def(
        "embedding_chain_check",
        [](const M& mu, double p, double s, std::vector<double> cutoffs) {
            return embedding_chain_check(mu, p, s, cutoffs);
        },
        py::arg("mu"), py::arg("p"), py::arg("s"), py::arg("cutoffs"));
    m.def(
        "energy_report", [](const M& mu, double s, const EnergyOptions& o) { return energy_report(mu, s, o); },
        py::arg("mu"), py::arg("s"), py::arg("options") = EnergyOptions{});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Vortex sheet measures: spirals, energies, concentration bounds and Birkhoff-Rott evolution";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::class_<Vec2>(m, "Point")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def(py::init([](const py::tuple& t) {
            if (t.size() != 2) throw py::value_error("a point needs two coordinates");
            return Vec2{t[0].cast<double>(), t[1].cast<double>()};
        }))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& p) { return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; });
    py::implicitly_convertible<py::tuple, Vec2>();

    py::class_<AtomicMeasure>(m, "AtomicMeasure")
        .def(py::init<>())
        .def(py::init(&atomic_from), py::arg("points"), py::arg("weights"))
        .def("__len__", &AtomicMeasure::size)
        .def_property_readonly("points", [](const AtomicMeasure& mu) {
            std::vector<PlanePoint> pts;
            for (const auto& a : mu.atoms()) pts.push_back(a.position);
            return points_to(pts);
        })
        .def_property_readonly("weights", [](const AtomicMeasure& mu) {
            std::vector<double> w;
            for (const auto& a : mu.atoms()) w.push_back(a.weight);
            return vec_to<double>(w);
        });

    py::class_<CurveBranch>(m, "CurveBranch")
        .def(py::init([](const Array& v, const Array& d) {
                 return CurveBranch::from_densities(points_from(v), std::vector<double>(d.data(), d.data() + d.size()));
             }),
             py::arg("vertices"), py::arg("densities"))
        .def_property_readonly("vertices", [](const CurveBranch& b) { return points_to(b.vertices()); })
        .def_property_readonly("densities", [](const CurveBranch& b) { return vec_to(b.densities()); })
        .def_property_readonly("cumulative", [](const CurveBranch& b) { return vec_to(b.cumulative()); });

    py::class_<CurveMeasure>(m, "CurveMeasure")
        .def(py::init([](std::vector<CurveBranch> b) { return CurveMeasure(std::move(b)); }), py::arg("branches"))
        .def_property_readonly("branches", [](const CurveMeasure& mu) {
            return std::vector<CurveBranch>(mu.branches().begin(), mu.branches().end());
        })
        .def_property_readonly("segment_count", &CurveMeasure::segment_count)
        .def_property_readonly("family", [](const CurveMeasure& mu) { return mu.info().family; })
        .def_property_readonly("parameters", [](const CurveMeasure& mu) { return mu.info().parameters; })
        .def("to_json", [](const CurveMeasure& mu) { return format_curve_json(mu); })
        .def_static("from_json", [](const std::string& text) { return parse_curve_json(text); });

    m.def("refine", &refine, py::arg("mu"), py::arg("factor"));
    m.def("make_circle", &make_circle, py::arg("center"), py::arg("radius"), py::arg("mass"), py::arg("n"));
    m.def("make_segment", &make_segment, py::arg("a"), py::arg("b"), py::arg("density"), py::arg("n"));
    m.def("load_atomic_csv", [](const std::string& path) { return parse_atomic_csv(read_text_file(path)); });
    m.def("load_curve_json", [](const std::string& path) { return parse_curve_json(read_text_file(path)); });

    py::class_<PrandtlParams>(m, "PrandtlParams")
        .def(py::init([](double b, double mu, double p, double t) { return PrandtlParams{b, mu, p, t}; }),
             py::arg("b") = 0.2, py::arg("mu") = 0.5, py::arg("p") = 1.0, py::arg("t") = 0.0)
        .def_readwrite("b", &PrandtlParams::b)
        .def_readwrite("mu", &PrandtlParams::mu)
        .def_readwrite("p", &PrandtlParams::p)
        .def_readwrite("t", &PrandtlParams::t)
        .def_property_readonly("tau", &PrandtlParams::tau);

    m.def(
        "prandtl_curve",
        [](const PrandtlParams& p, double gamma_max, std::size_t n, double grading) {
            return prandtl_curve(p, {gamma_max, n, grading});
        },
        py::arg("params"), py::arg("gamma_max") = 1.0, py::arg("n") = 4096, py::arg("grading") = 2.0);
    m.def("prandtl_point", &prandtl_point);
    m.def("prandtl_ball_mass_exact", &prandtl_ball_mass_exact);
    m.def("prandtl_support_radius", &prandtl_support_radius);
    m.def("similitude_exponent", &similitude_exponent);
    m.def("kaden_model", &kaden_model, py::arg("c2") = 1.0, py::arg("m") = 2.0 / 3.0, py::arg("r_min") = 0.03,
          py::arg("r_max") = 1.0, py::arg("n") = 4096);
    m.def(
        "self_similar_curve",
        [](double mm, std::function<double(double)> f, std::function<double(double)> g, double t, double th0,
           double th1, std::size_t n) {
            SelfSimilarParams p;
            p.m = mm;
            p.f = std::move(f);
            p.g = std::move(g);
            p.t = t;
            return self_similar_curve(p, th0, th1, n);
        },
        py::arg("m"), py::arg("f"), py::arg("g"), py::arg("t"), py::arg("theta_begin"), py::arg("theta_end"),
        py::arg("n"));

    py::class_<RadialGrid>(m, "RadialGrid")
        .def(py::init<>())
        .def_readwrite("r_min", &RadialGrid::r_min)
        .def_readwrite("r_max", &RadialGrid::r_max)
        .def_readwrite("points_per_decade", &RadialGrid::points_per_decade);
    py::class_<QuadratureGrid>(m, "QuadratureGrid")
        .def(py::init([](double k, int nr, int na) {
                 QuadratureGrid g;
                 g.cutoff = k;
                 g.n_radial = nr;
                 g.n_angular = na;
                 return g;
             }),
             py::arg("cutoff") = 100.0, py::arg("n_radial") = 12, py::arg("n_angular") = 16)
        .def_readwrite("cutoff", &QuadratureGrid::cutoff)
        .def_readwrite("n_radial", &QuadratureGrid::n_radial)
        .def_readwrite("n_angular", &QuadratureGrid::n_angular)
        .def_readwrite("checkpoints", &QuadratureGrid::checkpoints);
    py::class_<CutoffPoint>(m, "CutoffPoint")
        .def_readonly("cutoff", &CutoffPoint::cutoff)
        .def_readonly("value", &CutoffPoint::value)
        .def_readonly("corrected", &CutoffPoint::corrected);
    py::class_<FrequencyIntegral>(m, "FrequencyIntegral")
        .def_readonly("value", &FrequencyIntegral::value)
        .def_readonly("tail_estimate", &FrequencyIntegral::tail_estimate)
        .def_readonly("corrected", &FrequencyIntegral::corrected)
        .def_readonly("last_decade_increment", &FrequencyIntegral::last_decade_increment)
        .def_readonly("cutoff_series", &FrequencyIntegral::cutoff_series);
    py::class_<MorreyOptions>(m, "MorreyOptions")
        .def(py::init<>())
        .def_readwrite("radii", &MorreyOptions::radii)
        .def_readwrite("r_min", &MorreyOptions::r_min)
        .def_readwrite("n_radii", &MorreyOptions::n_radii)
        .def_readwrite("grid_centers", &MorreyOptions::grid_centers)
        .def_readwrite("seed", &MorreyOptions::seed);
    py::class_<MorreyResult>(m, "MorreyResult")
        .def_readonly("value", &MorreyResult::value)
        .def_readonly("r_star", &MorreyResult::r_star)
        .def_readonly("x_star", &MorreyResult::x_star)
        .def_readonly("at_lower_edge", &MorreyResult::at_lower_edge)
        .def_readonly("n_centers", &MorreyResult::n_centers);
    py::class_<EnergyOptions>(m, "EnergyOptions")
        .def(py::init<>())
        .def_readwrite("direct", &EnergyOptions::direct)
        .def_readwrite("layer_cake", &EnergyOptions::layer_cake)
        .def_readwrite("fourier", &EnergyOptions::fourier)
        .def_readwrite("grid", &EnergyOptions::grid)
        .def_readwrite("radial", &EnergyOptions::radial)
        .def_readwrite("refinements", &EnergyOptions::refinements);
    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("s", &EnergyReport::s)
        .def_readonly("direct", &EnergyReport::direct)
        .def_readonly("layer_cake", &EnergyReport::layer_cake)
        .def_readonly("fourier", &EnergyReport::fourier)
        .def_readonly("refinement_series", &EnergyReport::refinement_series)
        .def_readonly("max_relative_spread", &EnergyReport::max_relative_spread);
    // after the option types, whose defaults appear in these signatures
    bind_measure_functions<AtomicMeasure>(m);
    bind_measure_functions<CurveMeasure>(m);
    m.def("riesz_constant", &riesz_constant, py::arg("s"), py::arg("n") = 2);
    m.def("i_s_upper_bound", &i_s_upper_bound, py::arg("c1"), py::arg("alpha"), py::arg("r0"), py::arg("total_mass"),
          py::arg("s"));

    py::class_<ScalingFit>(m, "ScalingFit")
        .def_readonly("alpha_hat", &ScalingFit::alpha_hat)
        .def_readonly("c1_hat", &ScalingFit::c1_hat)
        .def_readonly("r_lo", &ScalingFit::r_lo)
        .def_readonly("r_hi", &ScalingFit::r_hi)
        .def_readonly("residual", &ScalingFit::residual)
        .def_readonly("radii", &ScalingFit::radii)
        .def_readonly("masses", &ScalingFit::masses);
    m.def("taylor_remainder_constant", &taylor_remainder_constant);
    m.def("taylor_constant", &taylor_constant, py::arg("alpha"), py::arg("c1"), py::arg("r0"));
    py::class_<BoundCheckReport>(m, "BoundCheckReport")
        .def_readonly("worst_ratio", &BoundCheckReport::worst_ratio)
        .def_property_readonly("worst_x", [](const BoundCheckReport& r) { return r.worst_sample.x; })
        .def_property_readonly("worst_r", [](const BoundCheckReport& r) { return r.worst_sample.r; })
        .def_readonly("n_samples", &BoundCheckReport::n_samples)
        .def_readonly("n_rejected", &BoundCheckReport::n_rejected)
        .def_property_readonly("alpha_below_one",
                               [](const BoundCheckReport& r) { return r.regime == BoundRegime::alpha_below_one; })
        .def_readonly("reference_constant", &BoundCheckReport::reference_constant);
    m.def(
        "offcenter_bound_check",
        [](const CurveMeasure& mu, double alpha, double c1, double r0, std::size_t n, std::uint64_t seed) {
            BoundCheckOptions o;
            o.n_samples = n;
            o.seed = seed;
            return offcenter_bound_check(mu, alpha, c1, r0, o);
        },
        py::arg("mu"), py::arg("alpha"), py::arg("c1"), py::arg("r0"), py::arg("n_samples") = 10000,
        py::arg("seed") = 1);
    py::class_<EmbeddingPoint>(m, "EmbeddingPoint")
        .def_readonly("cutoff", &EmbeddingPoint::cutoff)
        .def_readonly("lhs", &EmbeddingPoint::lhs)
        .def_readonly("holds", &EmbeddingPoint::holds);
    py::class_<EmbeddingReport>(m, "EmbeddingReport")
        .def_readonly("morrey", &EmbeddingReport::morrey)
        .def_readonly("rhs_mass", &EmbeddingReport::rhs_mass)
        .def_readonly("rhs_morrey", &EmbeddingReport::rhs_morrey)
        .def_readonly("points", &EmbeddingReport::points)
        .def_readonly("holds", &EmbeddingReport::holds);

    py::class_<SheetState>(m, "SheetState")
        .def(py::init([](std::vector<Complex> z, std::vector<double> g, double t) {
                 return SheetState{std::move(z), std::move(g), t};
             }),
             py::arg("markers"), py::arg("d_gamma"), py::arg("time") = 0.0)
        .def_readwrite("markers", &SheetState::markers)
        .def_readwrite("d_gamma", &SheetState::d_gamma)
        .def_readwrite("time", &SheetState::time);
    py::class_<BRConfig>(m, "BRConfig")
        .def(py::init([](double delta, double dt, std::size_t steps) { return BRConfig{delta, dt, steps}; }),
             py::arg("delta") = 0.05, py::arg("dt") = 1e-3, py::arg("steps") = 100)
        .def_readwrite("delta", &BRConfig::delta)
        .def_readwrite("dt", &BRConfig::dt)
        .def_readwrite("steps", &BRConfig::steps);
    py::class_<Observation>(m, "Observation")
        .def_readonly("step", &Observation::step)
        .def_readonly("time", &Observation::time)
        .def_readonly("circulation", &Observation::circulation)
        .def_readonly("impulse", &Observation::impulse)
        .def_readonly("hamiltonian", &Observation::hamiltonian)
        .def_readonly("max_spacing", &Observation::max_spacing);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("series", &Trajectory::series)
        .def_readonly("final_state", &Trajectory::final_state);
    m.def("br_velocity", &br_velocity, py::arg("state"), py::arg("delta"));
    m.def("br_step", &br_step, py::arg("state"), py::arg("config"));
    m.def("br_hamiltonian", &br_hamiltonian, py::arg("state"), py::arg("delta"));
    m.def("linear_impulse", &linear_impulse);
    m.def("total_circulation", &total_circulation);
    m.def(
        "evolve",
        [](const SheetState& s, const BRConfig& c, std::size_t every) {
            py::gil_scoped_release release;
            return evolve(s, c, every);
        },
        py::arg("initial"), py::arg("config"), py::arg("observe_every") = 1);
    m.def("sheet_from_curve", &sheet_from_curve);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "vsheet");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");
}

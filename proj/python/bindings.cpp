#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgloc/causality.hpp"
#include "kgloc/cli.hpp"
#include "kgloc/config.hpp"
#include "kgloc/harness.hpp"
#include "kgloc/log.hpp"
#include "kgloc/observables.hpp"
#include "kgloc/report.hpp"

namespace py = pybind11;
using namespace kgloc;
using geom::Frame;
using geom::Region;
using geom::SliceRef;
using geom::Vec3;
using mom::MassShellState;
using mom::MomentumGrid;

namespace {

py::dict prob_dict(const obs::ProbabilityValue& p) {
    py::dict d;
    d["value"] = p.value;
    d["err"] = p.err;
    d["observable"] = obs::to_string(p.observable);
    d["region"] = p.region;
    d["method"] = p.method;
    d["clamped"] = p.clamped;
    return d;
}

py::array_t<std::complex<double>> amplitudes(const MassShellState& s) {
    std::vector<py::ssize_t> shape(s.grid.dim(), s.grid.n());
    py::array_t<std::complex<double>> a(shape);
    std::copy(s.psi.begin(), s.psi.end(), a.mutable_data());
    return a;
}

void set_amplitudes(MassShellState& s, py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != s.psi.size()) throw std::invalid_argument("amplitude count does not match the grid");
    std::copy(a.data(), a.data() + a.size(), s.psi.begin());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Localization observables of a free Klein-Gordon particle";

    py::register_exception<cfg::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<cfg::MissingFile>(m, "MissingFile", PyExc_FileNotFoundError);

    m.def("set_verbosity", &set_verbosity);

    py::class_<Frame>(m, "Frame")
        .def(py::init<>())
        .def_static("from_velocity", &Frame::from_velocity, py::arg("v"))
        .def_property_readonly("n", [](const Frame& f) { return f.n; })
        .def("__repr__", [](const Frame& f) {
            return "Frame(" + std::to_string(f.n[0]) + ", " + std::to_string(f.n[1]) + ", " + std::to_string(f.n[2]) + ", " +
                   std::to_string(f.n[3]) + ")";
        });

    py::class_<SliceRef>(m, "Slice")
        .def(py::init([](const Frame& f, double t) { return SliceRef{f, t}; }), py::arg("frame") = Frame{},
             py::arg("time") = 0.0)
        .def_readwrite("frame", &SliceRef::frame)
        .def_readwrite("time", &SliceRef::time);

    py::class_<Region>(m, "Region")
        .def_static("whole", [] { return Region{}; })
        .def_static("ball", &geom::make_ball, py::arg("center"), py::arg("radius"))
        .def_static("box", [](const Vec3& lo, const Vec3& hi) { return Region(geom::Box{lo, hi}); }, py::arg("lo"),
                    py::arg("hi"))
        .def_static("interval", [](double a, double b) { return Region(geom::Box::interval(a, b)); })
        .def_static("union", &geom::make_union)
        .def("complement", [](const Region& r) { return geom::complement(r); })
        .def("contains", &Region::contains)
        .def("__repr__", &Region::describe);

    m.def("cone_expand", &geom::cone_expand, py::arg("region"), py::arg("source"), py::arg("target"));

    py::class_<MomentumGrid>(m, "MomentumGrid")
        .def(py::init<int, int, double, double>(), py::arg("dim") = 3, py::arg("n") = 64, py::arg("p_max") = 8.0,
             py::arg("mass") = 1.0)
        .def_property_readonly("dim", &MomentumGrid::dim)
        .def_property_readonly("n", &MomentumGrid::n)
        .def_property_readonly("p_max", &MomentumGrid::p_max)
        .def_property_readonly("mass", &MomentumGrid::mass)
        .def_property_readonly("dp", &MomentumGrid::dp)
        .def_property_readonly("dx", &MomentumGrid::dx)
        .def_property_readonly("size", &MomentumGrid::size)
        .def("__repr__", &MomentumGrid::describe);

    py::class_<MassShellState>(m, "State")
        .def(py::init<MomentumGrid>(), py::arg("grid"))
        .def_readonly("grid", &MassShellState::grid)
        .def_readwrite("native", &MassShellState::native)
        .def_readonly("resample_err", &MassShellState::resample_err)
        .def_property("amplitudes", &amplitudes, &set_amplitudes)
        .def("norm2", &MassShellState::norm2)
        .def("normalized", &MassShellState::normalized)
        .def("edge_mass", &MassShellState::edge_mass);

    m.def("gaussian", &mom::make_gaussian, py::arg("p0"), py::arg("sigma"), py::arg("grid"),
          py::arg("x0") = Vec3{});
    m.def(
        "bump",
        [](double radius, const Vec3& center, const Vec3& k, const MomentumGrid& g) {
            mom::SpatialProfile chi;
            chi.radius = radius;
            chi.center = center;
            return mom::make_profile_state(chi, k, g);
        },
        py::arg("radius"), py::arg("center") = Vec3{}, py::arg("k") = Vec3{}, py::arg("grid"));
    m.def(
        "almost_localized",
        [](double radius, const Vec3& step, int j, const MomentumGrid& g) {
            mom::SpatialProfile chi;
            chi.radius = radius;
            return mom::almost_localized_sequence(chi, step, j, g);
        },
        py::arg("radius"), py::arg("step"), py::arg("j"), py::arg("grid"));
    m.def("inner_product", &mom::inner_product);
    m.def("nw_project", &mom::nw_project, py::arg("state"), py::arg("region"), py::arg("slice"));
    m.def(
        "boost",
        [](const MassShellState& s, const Vec3& v) {
            return mom::apply_poincare_state(s, geom::PoincareTransform::boost(v));
        },
        py::arg("state"), py::arg("v"));
    m.def(
        "translate",
        [](const MassShellState& s, const geom::FourVector& a) {
            return mom::apply_poincare_state(s, geom::PoincareTransform::translation(a));
        },
        py::arg("state"), py::arg("a"));

    m.def("nw_probability", [](const MassShellState& s, const SliceRef& sl, const Region& r) {
        return prob_dict(obs::nw_probability(s, sl, r));
    });
    m.def("terno_probability", [](const MassShellState& s, const SliceRef& sl, const Region& r) {
        return prob_dict(obs::terno_probability(s, sl, r));
    });
    m.def("terno_probability_energy_form", [](const MassShellState& s, const SliceRef& sl, const Region& r) {
        return prob_dict(obs::terno_probability_energy_form(s, sl, r));
    });
    m.def(
        "m_probability",
        [](const MassShellState& s, const Frame& n0, const SliceRef& sl, const Region& r) {
            auto p = obs::m_povm_probability(s, n0, sl, r);
            py::dict d;
            d["current_form"] = prob_dict(p.current_form);
            d["operator_form"] = prob_dict(p.operator_form);
            d["difference"] = p.difference;
            d["agree"] = p.agree;
            d["flagged"] = p.flagged;
            return d;
        },
        py::arg("state"), py::arg("n0"), py::arg("slice"), py::arg("region"));

    m.def("velocity", &obs::velocity);
    m.def("nw_centroid", &wave::nw_centroid, py::arg("state"), py::arg("t") = 0.0);
    m.def(
        "moments",
        [](const MassShellState& s, const SliceRef& sl) {
            auto r = obs::moment_report(s, sl);
            py::dict d;
            int n = r.dim;
            auto cut = [n](const std::array<double, 3>& a) { return std::vector<double>(a.begin(), a.begin() + n); };
            d["first"] = cut(r.first);
            d["first_err"] = cut(r.first_err);
            d["nw_expectation"] = cut(r.nw_expectation);
            d["second"] = cut(r.second);
            d["nw_second"] = cut(r.nw_second);
            d["correction"] = cut(r.correction);
            d["residual"] = cut(r.residual);
            d["second_err"] = cut(r.second_err);
            d["heisenberg_lhs"] = cut(r.heisenberg_lhs);
            d["heisenberg_rhs"] = cut(r.heisenberg_rhs);
            d["heisenberg_err"] = cut(r.heisenberg_err);
            return d;
        },
        py::arg("state"), py::arg("slice") = SliceRef{});

    m.def(
        "mantle_flux",
        [](const MassShellState& s, const Region& source, double t1, double t2) {
            caus::MantleSpec sp;
            sp.source = source;
            sp.t1 = t1;
            sp.t2 = t2;
            auto c = caus::mantle_check(s, sp);
            py::dict d;
            d["flux"] = c.flux.flux;
            d["err"] = c.flux.err;
            d["p1"] = c.flux.p1;
            d["p2"] = c.flux.p2;
            d["balance_residual"] = c.flux.balance_residual;
            d["balance_err"] = c.flux.balance_err;
            d["inward_fraction"] = c.causal.fraction;
            return d;
        },
        py::arg("state"), py::arg("source"), py::arg("t1"), py::arg("t2"));

    m.def("suite_names", &cfg::suite_names);
    m.def("default_config", [] { return cfg::dump_config(cfg::default_config()); });
    m.def(
        "run_suite_json",
        [](const std::string& name, const std::string& config_text) {
            auto c = config_text.empty() ? cfg::default_config() : cfg::parse_config(config_text, "<python>");
            if (!cfg::is_suite(name)) throw cfg::ConfigError("<python>", 0, "suite", "unknown suite " + name);
            harness::SuiteVerdict v;
            {
                py::gil_scoped_release nogil;
                v = harness::run_suite(name, c);
            }
            return report::to_json(v).dump();
        },
        py::arg("name"), py::arg("config") = "");
    m.def("cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"kgloc"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (auto& a : all) argv.push_back(a.c_str());
        return cli_main(static_cast<int>(argv.size()), argv.data());
    });
}

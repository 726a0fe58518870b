#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brokenpde/acceptance.hpp"
#include "brokenpde/analysis.hpp"
#include "brokenpde/cli.hpp"
#include "brokenpde/config.hpp"
#include "brokenpde/errors.hpp"
#include "brokenpde/nodal.hpp"
#include "brokenpde/oracles.hpp"
#include "brokenpde/solver.hpp"
#include "brokenpde/transforms.hpp"

namespace py = pybind11;
using namespace brokenpde;

namespace {

using Pair = std::pair<double, double>;

Point to_point(const Pair& p) { return {p.first, p.second}; }
Pair from_point(Point p) { return {p.x, p.y}; }

// Values as a (n_y, n_x) array in 2D and (n_x,) in 1D.
py::array_t<double> to_array(const ScalarField& f) {
  const GridSpec& g = f.grid();
  std::vector<py::ssize_t> shape;
  if (g.dim == 2) shape = {g.n[1], g.n[0]};
  else shape = {g.n[0]};
  py::array_t<double> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

ScalarField from_array(const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != g.node_count()) {
    throw InvalidArgument("array has " + std::to_string(a.size()) + " values, grid has " +
                          std::to_string(g.node_count()) + " nodes");
  }
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Expr as_expr(const py::object& o) {
  if (py::isinstance<Expr>(o)) return o.cast<Expr>();
  if (py::isinstance<py::str>(o)) return parse(o.cast<std::string>());
  return Expr::constant(o.cast<double>());
}

py::dict frequency_entry(const FrequencyProfile::Entry& e) {
  py::dict d;
  d["r"] = e.r;
  d["H"] = e.H;
  d["I"] = e.I;
  d["N"] = e.N;
  d["doubling"] = e.doubling;
  d["degenerate_h"] = e.degenerate_h;
  d["flag"] = e.flag;
  return d;
}

}  // namespace

PYBIND11_MODULE(_brokenpde, m) {
  m.doc() = "Solver and diagnostics for divergence-form equations with broken conductivity";
  m.attr("__version__") = cli::version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<SyntaxError>(m, "ExprSyntaxError", base.ptr());
  py::register_exception<UnknownIdentifier>(m, "UnknownIdentifier", base.ptr());
  py::register_exception<EvalError>(m, "EvalError", base.ptr());
  py::register_exception<OutOfBounds>(m, "OutOfBounds", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<WrongRegime>(m, "WrongRegime", base.ptr());
  py::register_exception<DegenerateGradient>(m, "DegenerateGradient", base.ptr());
  py::register_exception<DegenerateH>(m, "DegenerateH", base.ptr());
  py::register_exception<RadiiTooSmall>(m, "RadiiTooSmall", base.ptr());
  py::register_exception<NoSignChange>(m, "NoSignChange", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Expr>(m, "Expr")
      .def("__call__", [](const Expr& e, double x, double y) { return e.evaluate({x, y}); },
           py::arg("x"), py::arg("y") = 0.0)
      .def("is_constant", &Expr::is_constant)
      .def("__str__", &Expr::to_string)
      .def("__repr__", [](const Expr& e) { return "Expr('" + e.to_string() + "')"; });
  m.def("parse", &parse, py::arg("text"));
  m.def("differentiate", [](const Expr& e, const std::string& var) {
    if (var != "x" && var != "y") throw InvalidArgument("variable must be 'x' or 'y'");
    return differentiate(e, var == "x" ? Variable::X : Variable::Y);
  });

  py::class_<GridSpec>(m, "Grid")
      .def_static("interval", &GridSpec::interval, py::arg("lo"), py::arg("hi"), py::arg("n"))
      .def_static("square", &GridSpec::square, py::arg("lo"), py::arg("hi"), py::arg("n"))
      .def_readonly("dim", &GridSpec::dim)
      .def_property_readonly("lo", [](const GridSpec& g) { return g.lo; })
      .def_property_readonly("hi", [](const GridSpec& g) { return g.hi; })
      .def_property_readonly("n", [](const GridSpec& g) { return g.n; })
      .def("h", &GridSpec::h, py::arg("axis") = 0)
      .def("node_count", &GridSpec::node_count)
      .def("coordinates", [](const GridSpec& g) {
        std::vector<double> xs, ys;
        for (int i = 0; i < g.n[0]; ++i) xs.push_back(g.node(i, 0).x);
        for (int j = 0; j < g.n[1]; ++j) ys.push_back(g.node(0, j).y);
        if (g.dim == 2) return py::tuple(py::make_tuple(xs, ys));
        return py::tuple(py::make_tuple(xs));
      })
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

  py::class_<ScalarField>(m, "Field")
      .def(py::init(&from_array), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &ScalarField::grid)
      .def_property_readonly("values", &to_array)
      .def("max_abs", &ScalarField::max_abs)
      .def("__call__", [](const ScalarField& f, double x, double y) { return interpolate(f, {x, y}); },
           py::arg("x"), py::arg("y") = 0.0);
  m.def("sample", [](const py::object& e, const GridSpec& g) { return sample(as_expr(e), g); },
        py::arg("expr"), py::arg("grid"));

  py::class_<CoefficientModel>(m, "CoefficientModel")
      .def_static("heaviside",
                  [](const py::object& ap, const py::object& am) {
                    return CoefficientModel::heaviside(as_expr(ap), as_expr(am));
                  },
                  py::arg("a_plus"), py::arg("a_minus"))
      .def_static("power",
                  [](double s, const py::object& a, const py::object& b) {
                    return CoefficientModel::power(s, as_expr(a), as_expr(b));
                  },
                  py::arg("s"), py::arg("a"), py::arg("b"))
      .def_readonly("s", &CoefficientModel::s)
      .def_readwrite("lam", &CoefficientModel::lambda)
      .def_readwrite("alpha", &CoefficientModel::alpha)
      .def_readwrite("omega0", &CoefficientModel::omega0)
      .def("set_forcing", [](CoefficientModel& c, const py::object& fx, const py::object& fy) {
        c.f_x = as_expr(fx);
        c.f_y = as_expr(fy);
      })
      .def("A", [](const CoefficientModel& c, double x, double y, double u) { return evaluate_A(c, {x, y}, u); },
           py::arg("x"), py::arg("y"), py::arg("u"));

  py::class_<BrokenProblem>(m, "Problem")
      .def(py::init([](const GridSpec& g, const CoefficientModel& c, const py::object& boundary) {
             BrokenProblem p;
             p.grid = g;
             p.model = c;
             p.boundary = as_expr(boundary);
             return p;
           }),
           py::arg("grid"), py::arg("model"), py::arg("boundary"))
      .def_readonly("grid", &BrokenProblem::grid)
      .def_readonly("model", &BrokenProblem::model)
      .def_readwrite("tol_picard", &BrokenProblem::tol_picard)
      .def_readwrite("max_picard_iterations", &BrokenProblem::max_picard_iterations)
      .def_readwrite("theta", &BrokenProblem::theta)
      .def_readwrite("tol_cg", &BrokenProblem::tol_cg);
  m.def("load_config", [](const std::string& path) { return ExperimentConfig::load(path).problem(); },
        py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return ExperimentConfig::parse(text).problem(); },
        py::arg("text"));

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("u", &SolveReport::u)
      .def_readonly("iterations", &SolveReport::picard_iterations)
      .def_readonly("update_history", &SolveReport::update_history)
      .def_readonly("residual", &SolveReport::final_nonlinear_residual)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("theta", &SolveReport::final_theta);
  m.def("picard_solve", &picard_solve, py::arg("problem"), py::call_guard<py::gil_scoped_release>());

  py::class_<TransformFields>(m, "TransformFields")
      .def_readonly("v", &TransformFields::v)
      .def_property_readonly("bx", [](const TransformFields& t) { return t.b_vec.component(0); })
      .def_property_readonly("by", [](const TransformFields& t) { return t.b_vec.component(1); })
      .def_readonly("c", &TransformFields::c)
      .def_readonly("coupled", &TransformFields::coupled);
  m.def("phi_freeze", [](const ScalarField& u, Pair z, const CoefficientModel& c) {
    return phi_freeze(u, to_point(z), c);
  }, py::arg("u"), py::arg("z"), py::arg("model"));
  m.def("sigma_freeze", [](const ScalarField& u, Pair z, const CoefficientModel& c) {
    return sigma_freeze(u, to_point(z), c);
  }, py::arg("u"), py::arg("z"), py::arg("model"));
  m.def("w_transform", &w_transform, py::arg("u"), py::arg("model"));
  m.def("phi_s", &phi_s, py::arg("u"), py::arg("a"), py::arg("b"), py::arg("s"));
  m.def("phi_s_inverse", &phi_s_inverse, py::arg("v"), py::arg("a"), py::arg("b"), py::arg("s"));

  py::class_<NodalSet>(m, "NodalSet")
      .def_property_readonly("segments", [](const NodalSet& ns) {
        py::array_t<double> out({static_cast<py::ssize_t>(ns.segments.size()), py::ssize_t{4}});
        double* d = out.mutable_data();
        for (const Segment& s : ns.segments) {
          *d++ = s.a.x, *d++ = s.a.y, *d++ = s.b.x, *d++ = s.b.y;
        }
        return out;
      })
      .def_property_readonly("points", [](const NodalSet& ns) {
        std::vector<Pair> out;
        for (const NodalPoint& p : ns.points) out.push_back(from_point(p.p));
        return out;
      })
      .def("total_length", &NodalSet::total_length);
  m.def("extract_nodal", &extract_nodal, py::arg("u"));
  m.def("nodal_length", [](const NodalSet& ns, Pair c, double r) { return nodal_length(ns, to_point(c), r); },
        py::arg("nodal_set"), py::arg("center"), py::arg("radius"));
  m.def("sign_measures", [](const ScalarField& u, Pair c, double r) {
    const SignMeasures s = sign_measures(u, to_point(c), r);
    return py::make_tuple(s.positive, s.negative);
  }, py::arg("u"), py::arg("center"), py::arg("radius"));

  py::class_<OrderEstimate>(m, "OrderEstimate")
      .def_property_readonly("z", [](const OrderEstimate& e) { return from_point(e.z); })
      .def_readonly("radii", &OrderEstimate::radii)
      .def_readonly("sups", &OrderEstimate::sups)
      .def_readonly("d_hat", &OrderEstimate::d_hat)
      .def_readonly("amplitude", &OrderEstimate::amplitude)
      .def_readonly("nearest_integer_gap", &OrderEstimate::nearest_integer_gap);
  m.def("vanishing_order", [](const ScalarField& u, Pair z, double r_max, int levels) {
    return vanishing_order(u, to_point(z), r_max, levels);
  }, py::arg("u"), py::arg("z"), py::arg("r_max"), py::arg("levels") = 5);

  py::class_<PolyFit>(m, "PolyFit")
      .def_readonly("degree", &PolyFit::degree)
      .def_readonly("re", &PolyFit::re)
      .def_readonly("im", &PolyFit::im)
      .def_readonly("radii", &PolyFit::radii)
      .def_readonly("residuals", &PolyFit::residuals)
      .def_readonly("decay_exponent", &PolyFit::decay_exponent)
      .def_readonly("condition_number", &PolyFit::condition_number)
      .def_readonly("ill_conditioned", &PolyFit::ill_conditioned)
      .def("__call__", [](const PolyFit& p, double x, double y) { return p.evaluate({x, y}); });
  m.def("harmonic_fit", [](const ScalarField& v, Pair z, int d, double r_fit, bool pin) {
    return harmonic_fit(v, to_point(z), d, r_fit, pin);
  }, py::arg("v"), py::arg("z"), py::arg("degree"), py::arg("r_fit"), py::arg("pin_constant") = true);

  m.def("frequency_profile", [](const TransformFields& tf, Pair z, const std::vector<double>& radii) {
    const FrequencyProfile p = frequency_profile(FrequencyIntegrands(tf), to_point(z), radii);
    py::list out;
    for (const auto& e : p.entries) out.append(frequency_entry(e));
    return out;
  }, py::arg("fields"), py::arg("z"), py::arg("radii"));
  m.def("harmonic_frequency_profile", [](const ScalarField& w, Pair z, const std::vector<double>& radii) {
    const FrequencyProfile p = frequency_profile(FrequencyIntegrands(w), to_point(z), radii);
    py::list out;
    for (const auto& e : p.entries) out.append(frequency_entry(e));
    return out;
  }, py::arg("w"), py::arg("z"), py::arg("radii"));
  m.def("linspace", &linspace, py::arg("lo"), py::arg("hi"), py::arg("steps"));

  m.def("transmission_1d", [](double ap, double am, double gl, double gr, double lo, double hi) {
    const OracleSolution o = transmission_1d(ap, am, gl, gr, lo, hi);
    py::dict d;
    d["field"] = py::cpp_function([f = o.field](double x) { return f({x, 0.0}); });
    d["interface"] = o.interface;
    d["flux"] = o.flux;
    d["slope_minus"] = o.slope_minus;
    d["slope_plus"] = o.slope_plus;
    return d;
  }, py::arg("a_plus"), py::arg("a_minus"), py::arg("g_left"), py::arg("g_right"),
        py::arg("lo") = -1.0, py::arg("hi") = 1.0);
  m.def("harmonic_inversion_exact", [](const CoefficientModel& c, const py::object& g, const GridSpec& grid) {
    const OracleSolution o = harmonic_inversion_exact(c, as_expr(g), grid);
    return py::make_tuple(o.nodal, o.harmonic);
  }, py::arg("model"), py::arg("boundary"), py::arg("grid"));

  m.def("verify", [](const std::string& suite, std::uint64_t seed) {
    AcceptanceSuite s(seed);
    py::list out;
    for (const std::string& id : AcceptanceSuite::ids_for(suite)) {
      CriterionResult r;
      {
        py::gil_scoped_release release;
        r = s.run(id);
      }
      py::dict d;
      d["id"] = r.id;
      d["title"] = r.title;
      d["passed"] = r.passed;
      d["seconds"] = r.seconds;
      d["summary"] = r.summary;
      d["details"] = r.details.dump();
      out.append(d);
    }
    return out;
  }, py::arg("suite") = "all", py::arg("seed") = 42);
}

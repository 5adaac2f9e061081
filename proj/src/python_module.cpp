#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "physid/calibration.hpp"
#include "physid/cli.hpp"
#include "physid/error.hpp"
#include "physid/estimator.hpp"
#include "physid/eval_metrics.hpp"
#include "physid/gt_fit.hpp"
#include "physid/synth.hpp"

namespace py = pybind11;
using namespace physid;

namespace {

OdeFamily make_family(const std::string& name, int bodies, std::optional<double> threshold) {
  const FamilyTag tag = family_tag_from_string(name);
  if (is_coupled(tag)) return OdeFamily::coupled(tag, bodies, threshold);
  if (bodies != 1) throw ArityError(name + " is a single-body family");
  return OdeFamily::single(tag);
}

py::dict fit_to_dict(const FitResult& r) {
  py::dict d;
  d["params"] = r.final_params.values;
  d["names"] = r.final_params.family.param_names();
  d["loss_curve"] = r.loss_curve;
  d["grad_norm_curve"] = r.grad_norm_curve;
  d["ode_residual"] = r.ode_residual;
  d["diverged"] = r.diverged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_physid, m) {
  m.doc() = "Physical parameter identification from trajectories";

  auto base = py::register_exception<Error>(m, "PhysidError", PyExc_RuntimeError);
  py::register_exception<ArityError>(m, "ArityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<IllPosedError>(m, "IllPosedError", base.ptr());
  py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init([](std::vector<double> positions, double dt, int body_count, double t0) {
             Trajectory t;
             t.positions = std::move(positions);
             t.dt = dt;
             t.body_count = body_count;
             t.t0 = t0;
             return t;
           }),
           py::arg("positions"), py::arg("dt"), py::arg("body_count") = 1, py::arg("t0") = 0.0)
      .def_readwrite("positions", &Trajectory::positions)
      .def_readwrite("dt", &Trajectory::dt)
      .def_readwrite("t0", &Trajectory::t0)
      .def_readwrite("body_count", &Trajectory::body_count)
      .def_readwrite("units", &Trajectory::units)
      .def("__len__", &Trajectory::size)
      .def("head", &Trajectory::head)
      .def("body", &Trajectory::body);

  m.def("preset_names", [](const std::string& suite) {
    if (suite == "iris") return preset_names(PresetSuite::Iris);
    if (suite == "delfys75") return preset_names(PresetSuite::Delfys75);
    if (suite == "all") return all_preset_names();
    throw DomainError("unknown suite '" + suite + "'");
  }, py::arg("suite") = "all");

  m.def("preset_clip", [](const std::string& name, std::uint64_t seed, int trial) {
    const auto spec = preset(name);
    const auto clip = generate_trial(spec, seed, trial);
    py::dict d;
    d["phenomenon"] = spec.phenomenon;
    d["setting"] = spec.setting;
    d["family"] = std::string(to_string(spec.estimation_family().tag));
    d["bodies"] = spec.estimation_family().body_count;
    d["trajectory"] = clip.trajectory;
    d["params"] = clip.params.values;
    d["split"] = std::string(to_string(clip.split));
    return d;
  }, py::arg("name"), py::arg("seed") = 42, py::arg("trial") = 0);

  m.def("param_names", [](const std::string& family, int bodies) {
    return make_family(family, bodies, {}).param_names();
  }, py::arg("family"), py::arg("bodies") = 1);

  m.def("rollout", [](const std::string& family, std::vector<double> params, std::vector<double> z0,
                      std::vector<double> v0, double dt, std::size_t steps,
                      const std::string& integrator) {
    const auto f = make_family(family, static_cast<int>(z0.size()), {});
    const auto r = rollout(integrator_from_string(integrator), f, params, {z0, v0}, dt, steps);
    Trajectory t;
    t.dt = dt;
    t.body_count = f.body_count;
    for (const auto& s : r.states) t.positions.insert(t.positions.end(), s.positions.begin(), s.positions.end());
    return t;
  }, py::arg("family"), py::arg("params"), py::arg("z0"), py::arg("v0") = std::vector<double>{},
     py::arg("dt"), py::arg("steps"), py::arg("integrator") = "rk4");

  m.def("fit", [](const Trajectory& traj, const std::string& family, const std::string& integrator,
                  const std::string& loss, int horizon, int epochs, double lr,
                  std::vector<double> init, bool init_from_period,
                  std::optional<double> contact_threshold) {
    const auto f = make_family(family, traj.body_count, contact_threshold);
    FitConfig cfg;
    cfg.integrator = integrator_from_string(integrator);
    cfg.loss = loss_kind_from_string(loss);
    cfg.horizon = horizon;
    cfg.epochs = epochs;
    cfg.lr_params = lr;
    cfg.init_params = std::move(init);
    cfg.init_from_period = init_from_period;
    py::gil_scoped_release release;
    const auto r = fit_clip(f, traj, cfg);
    py::gil_scoped_acquire acquire;
    return fit_to_dict(r);
  }, py::arg("trajectory"), py::arg("family"), py::arg("integrator") = "euler",
     py::arg("loss") = "one-step", py::arg("horizon") = 1, py::arg("epochs") = 500,
     py::arg("lr") = 1e-2, py::arg("init") = std::vector<double>{}, py::arg("init_from_period") = false,
     py::arg("contact_threshold") = py::none());

  m.def("direct_fit", [](const Trajectory& traj, const std::string& family, double h0) {
    DirectFitOptions opt;
    opt.h0 = h0;
    return direct_ls_fit(make_family(family, traj.body_count, {}), traj, opt).values;
  }, py::arg("trajectory"), py::arg("family"), py::arg("h0") = 1.0);

  m.def("ode_residual", [](const Trajectory& traj, const std::string& family,
                           std::vector<double> params, const std::string& integrator) {
    return ode_residual(traj, make_family(family, traj.body_count, {}), params,
                        integrator_from_string(integrator));
  }, py::arg("trajectory"), py::arg("family"), py::arg("params"), py::arg("integrator") = "rk4");

  m.def("select_family", [](const Trajectory& traj, const std::vector<std::string>& candidates) {
    std::vector<OdeFamily> fams;
    for (const auto& c : candidates) fams.push_back(make_family(c, 1, {}));
    const auto r = select_family(traj, fams);
    return py::make_tuple(std::string(to_string(r.chosen.tag)), r.scores);
  }, py::arg("trajectory"), py::arg("candidates"));

  m.def("mae", [](std::vector<double> estimates, double gt) {
    const auto r = mae(estimates, gt);
    return py::make_tuple(r.mae, r.sigma, r.n);
  }, py::arg("estimates"), py::arg("gt"));

  m.def("confusion", [](std::vector<std::string> gt, std::vector<std::string> predicted,
                        std::vector<std::string> labels) {
    const auto c = confusion(gt, predicted, std::move(labels));
    py::dict d;
    d["labels"] = c.labels;
    d["counts"] = c.counts;
    d["accuracy"] = c.accuracy();
    return d;
  }, py::arg("gt"), py::arg("predicted"), py::arg("labels") = std::vector<std::string>{});

  m.def("elliptic_k", &elliptic_k, py::arg("k"));
  m.def("exact_period", &exact_period, py::arg("L"), py::arg("g"), py::arg("theta0"));
  m.def("small_angle_period", &small_angle_period, py::arg("L"), py::arg("g"));
  m.def("corrected_length", [](double T, double theta0, double g) {
    const auto r = corrected_length(T, theta0, g);
    return py::make_tuple(r.small_angle, r.corrected);
  }, py::arg("T"), py::arg("theta0"), py::arg("g") = 9.81);
  m.def("friction_from_accel", &friction_from_accel, py::arg("alpha_deg"), py::arg("a_measured"),
        py::arg("g") = 9.81);

  m.def("latent_to_si", [](const std::string& phenomenon, std::vector<double> params, int bodies,
                           std::optional<double> period, std::optional<double> theta0,
                           std::optional<double> incline_deg) {
    const auto& rule = CalibrationTable::defaults().rule(phenomenon);
    CalibrationAux aux{period, theta0, incline_deg, {}};
    const auto f = make_family(std::string(to_string(rule.family)), bodies, {});
    py::dict d;
    for (const auto& v : latent_to_si(rule, ParamVector::make(f, std::move(params)), aux))
      d[py::str(v.name)] = v.value;
    return d;
  }, py::arg("phenomenon"), py::arg("params"), py::arg("bodies") = 1, py::arg("period") = py::none(),
     py::arg("theta0") = py::none(), py::arg("incline_deg") = py::none());

  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "physid");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}

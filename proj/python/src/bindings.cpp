#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkdrate/bounds.hpp"
#include "qkdrate/channel.hpp"
#include "qkdrate/concentration.hpp"
#include "qkdrate/config.hpp"
#include "qkdrate/errors.hpp"
#include "qkdrate/keyrate.hpp"
#include "qkdrate/montecarlo.hpp"
#include "qkdrate/optimizer.hpp"
#include "qkdrate/protocol.hpp"

namespace py = pybind11;
using namespace qkdrate;

namespace {

py::dict per_intensity(const PerIntensity<double>& v) {
  py::dict d;
  for (auto w : kIntensities) d[py::str(to_string(w))] = v[w];
  return d;
}

py::dict counts_dict(const ObservedCounts& c) {
  py::dict d;
  d["n_z"] = per_intensity(c.n_z);
  d["n_x"] = per_intensity(c.n_x);
  d["n_x_error"] = per_intensity(c.n_x_error);
  d["n_cross"] = per_intensity(c.n_cross);
  d["n_sift"] = c.n_sift;
  d["e_bit"] = c.e_bit;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qkdrate, m) {
  m.doc() = "Finite-key rates for decoy-state BB84 with passive basis choice";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DegenerateChannelError>(m, "DegenerateChannelError", PyExc_ArithmeticError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Mode>(m, "Mode").value("finite", Mode::finite).value("asymptotic", Mode::asymptotic);
  py::enum_<Baseline>(m, "Baseline")
      .value("passive", Baseline::passive)
      .value("active_approx", Baseline::active_approx);

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init<>())
      .def_readwrite("pulses", &ProtocolParams::pulses)
      .def_readwrite("p_z", &ProtocolParams::p_z)
      .def_readwrite("p_x", &ProtocolParams::p_x)
      .def_readwrite("p_signal", &ProtocolParams::p_signal)
      .def_readwrite("p_decoy", &ProtocolParams::p_decoy)
      .def_readwrite("p_vacuum", &ProtocolParams::p_vacuum)
      .def_readwrite("mu_signal", &ProtocolParams::mu_signal)
      .def_readwrite("mu_decoy", &ProtocolParams::mu_decoy)
      .def_readwrite("mu_vacuum", &ProtocolParams::mu_vacuum)
      .def_readwrite("q", &ProtocolParams::q)
      .def_readwrite("dark_count", &ProtocolParams::dark_count)
      .def_readwrite("ec_inefficiency", &ProtocolParams::ec_inefficiency)
      .def_readwrite("misalignment", &ProtocolParams::misalignment)
      .def("validate", [](const ProtocolParams& p) { return validate_params(p); });

  py::class_<SecurityParams>(m, "SecurityParams")
      .def_readonly("eps", &SecurityParams::eps)
      .def_readonly("eps_c", &SecurityParams::eps_c)
      .def_readonly("xi", &SecurityParams::xi)
      .def_readonly("eps_ph", &SecurityParams::eps_ph)
      .def_readonly("eps_s", &SecurityParams::eps_s)
      .def_readonly("eps_sec", &SecurityParams::eps_sec);

  py::class_<KeyRateResult>(m, "KeyRateResult")
      .def_readonly("n_z1_lower", &KeyRateResult::n_z1_lower)
      .def_readonly("n_ph1_upper", &KeyRateResult::n_ph1_upper)
      .def_readonly("phase_error_ratio", &KeyRateResult::phase_error_ratio)
      .def_readonly("n_ec", &KeyRateResult::n_ec)
      .def_readonly("key_length", &KeyRateResult::key_length)
      .def_readonly("rate", &KeyRateResult::rate)
      .def_readonly("e_bit", &KeyRateResult::e_bit)
      .def_readonly("n_sift", &KeyRateResult::n_sift)
      .def_readonly("mode", &KeyRateResult::mode)
      .def_readonly("baseline", &KeyRateResult::baseline);

  py::class_<OptimizationSpec>(m, "OptimizationSpec")
      .def(py::init<>())
      .def_property(
          "pz_range", [](const OptimizationSpec& s) { return std::pair{s.pz_range.lo, s.pz_range.hi}; },
          [](OptimizationSpec& s, std::pair<double, double> r) { s.pz_range = {r.first, r.second}; })
      .def_property(
          "mu_s_range",
          [](const OptimizationSpec& s) { return std::pair{s.mu_s_range.lo, s.mu_s_range.hi}; },
          [](OptimizationSpec& s, std::pair<double, double> r) { s.mu_s_range = {r.first, r.second}; })
      .def_readwrite("grid_resolution", &OptimizationSpec::grid_resolution)
      .def_readwrite("refine_iterations", &OptimizationSpec::refine_iterations)
      .def_readwrite("threads", &OptimizationSpec::threads);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("best_params", &OptimizationResult::best_params)
      .def_readonly("result", &OptimizationResult::result)
      .def_readonly("feasible", &OptimizationResult::feasible);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("eta", &SweepRow::eta)
      .def_readonly("params", &SweepRow::params)
      .def_readonly("result", &SweepRow::result)
      .def_readonly("feasible", &SweepRow::feasible)
      .def_readonly("degenerate", &SweepRow::degenerate);

  py::class_<BoundCheck>(m, "BoundCheck")
      .def_readonly("name", &BoundCheck::name)
      .def_readonly("trials", &BoundCheck::trials)
      .def_readonly("violations", &BoundCheck::violations)
      .def_readonly("frequency", &BoundCheck::frequency)
      .def_readonly("ci_low", &BoundCheck::ci_low)
      .def_readonly("ci_high", &BoundCheck::ci_high)
      .def_readonly("budget", &BoundCheck::budget)
      .def_readonly("allowed", &BoundCheck::allowed)
      .def_readonly("passed", &BoundCheck::pass);

  py::class_<SoundnessReport>(m, "SoundnessReport")
      .def_readonly("seed", &SoundnessReport::seed)
      .def_readonly("pulses", &SoundnessReport::pulses)
      .def_readonly("phase_error", &SoundnessReport::phase_error)
      .def_readonly("single_photon_z", &SoundnessReport::single_photon_z)
      .def_property_readonly("passed", &SoundnessReport::pass);

  py::class_<AgreementEntry>(m, "AgreementEntry")
      .def_readonly("name", &AgreementEntry::name)
      .def_readonly("observed", &AgreementEntry::observed)
      .def_readonly("expected", &AgreementEntry::expected)
      .def_readonly("z", &AgreementEntry::z);

  py::class_<AgreementReport>(m, "AgreementReport")
      .def_readonly("entries", &AgreementReport::entries)
      .def_readonly("max_abs_z", &AgreementReport::max_abs_z)
      .def_readonly("passed", &AgreementReport::pass);

  m.def("secrecy_epsilons", &secrecy_epsilons, py::arg("eps"), py::arg("eps_c"), py::arg("xi"));
  m.def("default_security", &default_security);
  m.def("binary_entropy", &binary_entropy, py::arg("x"));
  m.def("single_photon_prob", &single_photon_prob, py::arg("params"));

  m.def(
      "kato_upper",
      [](double n, double est, double eps) {
        const auto k = kato_upper_coeffs(n, est, eps);
        return std::pair{k.a, k.b};
      },
      py::arg("trials"), py::arg("estimate"), py::arg("eps"));
  m.def(
      "kato_lower",
      [](double n, double est, double eps) {
        const auto k = kato_lower_coeffs(n, est, eps);
        return std::pair{k.a, k.b};
      },
      py::arg("trials"), py::arg("estimate"), py::arg("eps"));
  m.def(
      "deviation_upper",
      [](double realized, double est, double n, double eps) {
        return deviation_upper({realized, est, n, eps});
      },
      py::arg("realized"), py::arg("estimate"), py::arg("trials"), py::arg("eps"));
  m.def(
      "deviation_lower",
      [](double realized, double est, double n, double eps) {
        return deviation_lower({realized, est, n, eps});
      },
      py::arg("realized"), py::arg("estimate"), py::arg("trials"), py::arg("eps"));

  m.def(
      "expected_counts",
      [](const ProtocolParams& p, double eta) { return counts_dict(expected_counts(p, {eta})); },
      py::arg("params"), py::arg("eta"));

  m.def(
      "key_rate",
      [](const ProtocolParams& p, double eta, const SecurityParams& sec, Mode mode, Baseline b) {
        return key_rate(p, {eta}, sec, mode, b);
      },
      py::arg("params"), py::arg("eta"), py::arg("security"), py::arg("mode") = Mode::finite,
      py::arg("baseline") = Baseline::passive);

  m.def(
      "optimize",
      [](const ProtocolParams& p, double eta, const SecurityParams& sec,
         const OptimizationSpec& spec, Mode mode, Baseline b) {
        py::gil_scoped_release release;
        return optimize(p, {eta}, sec, spec, mode, b);
      },
      py::arg("params"), py::arg("eta"), py::arg("security"), py::arg("spec") = OptimizationSpec{},
      py::arg("mode") = Mode::finite, py::arg("baseline") = Baseline::passive);

  m.def("make_grid", &make_grid, py::arg("lo"), py::arg("hi"), py::arg("n"),
        py::arg("log_spacing") = true);

  m.def(
      "sweep",
      [](const ProtocolParams& p, const SecurityParams& sec, const std::vector<double>& grid,
         Mode mode, Baseline b, bool optimize_each, const OptimizationSpec& spec) {
        py::gil_scoped_release release;
        return sweep(p, sec, grid, mode, b, optimize_each, spec);
      },
      py::arg("params"), py::arg("security"), py::arg("eta_grid"), py::arg("mode") = Mode::finite,
      py::arg("baseline") = Baseline::passive, py::arg("optimize_each") = true,
      py::arg("spec") = OptimizationSpec{});

  m.def(
      "validate_bounds",
      [](const ProtocolParams& p, double eta, const SecurityParams& sec, std::uint64_t trials,
         std::uint64_t seed, double phase_bound_scale, double z_bound_scale, unsigned threads) {
        py::gil_scoped_release release;
        return validate_bounds(p, {eta}, sec, trials, seed,
                               SoundnessOptions{phase_bound_scale, z_bound_scale, threads});
      },
      py::arg("params"), py::arg("eta"), py::arg("security"), py::arg("trials"), py::arg("seed"),
      py::arg("phase_bound_scale") = 1.0, py::arg("z_bound_scale") = 1.0, py::arg("threads") = 1);

  m.def(
      "validate_channel_model",
      [](const ProtocolParams& p, double eta, std::uint64_t pulses, std::uint64_t seed,
         unsigned threads) {
        py::gil_scoped_release release;
        return validate_channel_model(p, {eta}, pulses, seed, threads);
      },
      py::arg("params"), py::arg("eta"), py::arg("pulses"), py::arg("seed"),
      py::arg("threads") = 1);
}

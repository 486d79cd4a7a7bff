#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nvbeat/analytic_models.hpp"
#include "nvbeat/errors.hpp"
#include "nvbeat/estimation/fitting.hpp"
#include "nvbeat/estimation/sensitivity.hpp"
#include "nvbeat/parallel.hpp"
#include "nvbeat/spectrum.hpp"
#include "nvbeat/spin_core.hpp"
#include "nvbeat/tensor_geometry.hpp"

namespace nvbeat::cli {

namespace {

FieldOrientation sta_field(const Context& ctx) {
  AxisSearchOptions opt;
  opt.threads = ctx.threads;
  const SingleTransitionAxis axis = find_single_transition_axis(ctx.config.system, ctx.config.b, opt);
  return FieldOrientation::nv(ctx.config.b, axis.theta, axis.phi);
}

FieldOrientation chosen_field(const Context& ctx, bool at_sta) {
  return at_sta ? sta_field(ctx) : ctx.config.field();
}

std::string describe(const FieldOrientation& f) {
  std::ostringstream s;
  s << "b=" << format_double(f.b()) << " G, theta=" << format_double(f.theta())
    << " deg, phi=" << format_double(f.phi()) << " deg (NV frame)";
  return s.str();
}

/// Summary lines go into the CSV as comments and, when given, to `info`.
void summary(const Context& ctx, std::ostream& out, const std::string& line) {
  out << "# " << line << '\n';
  if (ctx.info) *ctx.info << line << '\n';
}

/// Drive amplitude that reproduces the configured Rabi frequency at the
/// single-transition axis.
double calibrated_drive(const Context& ctx) {
  return calibrate_drive(ctx.config.system, sta_field(ctx), ctx.config.rabi_frequency);
}

void report_peaks(const Context& ctx, std::ostream& out, const SpectrumPeaks& peaks) {
  const double top = peaks.peaks.empty() ? 0.0 : peaks.peaks.front().magnitude;
  int k = 1;
  for (const SpectrumPeak& p : peaks.peaks) {
    std::ostringstream s;
    s << "peak_" << k++ << " = " << format_double(p.frequency) << " MHz, relative "
      << format_double(p.magnitude / top) << ", fwhm " << format_double(p.fwhm) << " MHz";
    summary(ctx, out, s.str());
  }
  summary(ctx, out, "bin_width = " + format_double(peaks.bin_width) + " MHz");
}

void write_trace(std::ostream& out, const RamseyTrace& trace, const char* time_column) {
  out << time_column << ",population\n";
  for (std::size_t i = 0; i < trace.tau.size(); ++i) {
    out << format_double(trace.tau[i]) << ',' << format_double(trace.signal[i]) << '\n';
  }
}

}  // namespace

std::string csv_preamble(const RunConfig& config) {
  return std::string("# nvbeat ") + kVersion + " config=" + config_digest(config);
}

void cmd_spectrum(const Context& ctx, const SpectrumArgs& args, std::ostream& out) {
  const FieldOrientation field = chosen_field(ctx, args.at_sta);
  const Eigensystem eig = solve(ctx.config.system, field);
  const auto lines = single_quantum_transitions(eig);
  double top = 0.0;
  for (const auto& l : lines) top = std::max(top, l.amplitude);

  out << csv_preamble(ctx.config) << '\n';
  out << "# " << describe(field) << '\n';
  out << "frequency_mhz,amplitude,from_state,to_state,from_manifold,to_manifold\n";
  for (const auto& l : lines) {
    if (l.amplitude < args.min_relative_amplitude * top) continue;
    out << format_double(l.frequency) << ',' << format_double(l.amplitude) << ',' << l.from_state << ','
        << l.to_state << ',' << to_string(eig.manifold[static_cast<std::size_t>(l.from_state)]) << ','
        << to_string(eig.manifold[static_cast<std::size_t>(l.to_state)]) << '\n';
  }
}

void cmd_zq_scan(const Context& ctx, const ZqScanArgs& args, std::ostream& out) {
  if (!(args.step > 0.0)) throw InvalidInput("zq-scan: step must be > 0");
  if (!(args.to >= args.from)) throw InvalidInput("zq-scan: 'to' must not be below 'from'");
  if (args.axis == SweepAxis::theta) {
    if (args.from < 0.0 || args.to > 180.0) throw InvalidInput("zq-scan: theta sweep must stay within [0, 180]");
  } else if (args.from < 0.0 || args.to >= 360.0) {
    throw InvalidInput("zq-scan: phi sweep must stay within [0, 360)");
  }
  const RunConfig& c = ctx.config;
  const auto n = static_cast<std::size_t>(std::floor((args.to - args.from) / args.step + 1e-9)) + 1;
  struct Row {
    double angle, exact, perturbative, amplitude;
  };
  std::vector<Row> rows(n);
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    const double angle = args.from + static_cast<double>(i) * args.step;
    FieldOrientation f = args.axis == SweepAxis::theta ? FieldOrientation::make(c.b, angle, c.phi, c.frame)
                                                       : FieldOrientation::make(c.b, c.theta, angle, c.frame);
    if (c.frame == Frame::lab) f = lab_to_nv(f, c.nv_axis);
    Row r{angle, 0.0, 0.0, std::nan("")};
    r.exact = zero_quantum_splitting_exact(solve(c.system, f));
    r.perturbative = delta_perturbative(c.system.tensor, f, c.system.d, c.system.gamma_e);
    try {
      r.amplitude = zq_amplitude(c.system, f);
    } catch (const NumericalError&) {
      // Λ system not identifiable here; leave NaN.
    }
    rows[i] = r;
  });

  out << csv_preamble(c) << '\n';
  out << (args.axis == SweepAxis::theta ? "theta_deg" : "phi_deg")
      << ",delta_exact_mhz,delta_perturbative_mhz,beat_amplitude\n";
  for (const Row& r : rows) {
    out << format_double(r.angle) << ',' << format_double(r.exact) << ',' << format_double(r.perturbative) << ','
        << format_double(r.amplitude) << '\n';
  }
}

void cmd_rabi(const Context& ctx, const TraceArgs& args, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const FieldOrientation field = chosen_field(ctx, args.at_sta);
  const double drive = calibrated_drive(ctx);
  const RamseyTrace trace = simulate_rabi(c.system, field, {drive, 0.0, 0.0}, linspace(0.0, c.rabi_t_max, c.rabi_n_points));

  out << csv_preamble(c) << '\n';
  out << "# " << describe(field) << '\n';
  write_trace(out, trace, "t_us");
  summary(ctx, out, "drive_amplitude = " + format_double(drive) + " MHz");
  try {
    summary(ctx, out, "first_minimum = " + format_double(pi_pulse_from_rabi(trace)) + " us");
  } catch (const NumericalError& e) {
    summary(ctx, out, std::string("first_minimum = none (") + e.what() + ")");
  }
  const SpectrumPeaks peaks = spectrum_peaks(trace, 3);
  report_peaks(ctx, out, peaks);
  if (!peaks.peaks.empty()) {
    const SinusoidFit fit = fit_sinusoid(trace, peaks.peaks.front().frequency, 2.0 * peaks.bin_width);
    summary(ctx, out, "single_sinusoid_frequency = " + format_double(fit.frequency) + " MHz");
    summary(ctx, out, "single_sinusoid_rms_over_contrast = " +
                          format_double(fit.rms_residual / (2.0 * std::abs(fit.amplitude))));
  }
}

void cmd_ramsey(const Context& ctx, const TraceArgs& args, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const FieldOrientation field = chosen_field(ctx, args.at_sta);
  ZqRamseyOptions opt;
  opt.t2_sq = c.t2_sq;
  opt.t2_zq = c.t2_star;
  opt.shape = c.envelope;
  double pi_duration = 0.0;
  if (c.pi_duration) {
    pi_duration = *c.pi_duration;
  } else {
    opt.rabi_amplitude = calibrated_drive(ctx);
    const RamseyTrace rabi = simulate_rabi(c.system, field, {opt.rabi_amplitude, c.detuning, 0.0},
                                           linspace(0.0, c.rabi_t_max, c.rabi_n_points));
    pi_duration = pi_pulse_from_rabi(rabi);
  }
  const RamseyTrace trace =
      simulate_zq_ramsey(c.system, field, pi_duration, c.detuning, linspace(0.0, c.tau_max, c.n_points), opt);

  out << csv_preamble(c) << '\n';
  out << "# " << describe(field) << '\n';
  write_trace(out, trace, "tau_us");
  summary(ctx, out, "pi_duration = " + format_double(pi_duration) + " us");
  summary(ctx, out, "delta_exact = " + format_double(zero_quantum_splitting_exact(solve(c.system, field))) + " MHz");
  const SpectrumPeaks peaks = spectrum_peaks(trace, 3);
  if (peaks.peaks.empty()) summary(ctx, out, "no beat (constant trace)");
  report_peaks(ctx, out, peaks);
}

void cmd_fit(const Context& ctx, const FitArgs& args, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const ScanDataset data = read_dataset_file(args.dataset_path);
  FitOptions opt;
  opt.threads = ctx.threads;
  for (const std::string& name : args.fixed) opt.fixed.insert(param_id_from_string(name));
  const FitParameters initial = FitParameters::from(c.system.tensor, c.b, c.phi_offset);
  const FitResult result = fit_hyperfine(c.system, data, initial, opt);

  out << csv_preamble(c) << '\n';
  if (args.bootstrap > 0) {
    const BootstrapResult boot = bootstrap_fit(c.system, data, result, args.bootstrap, c.seed, opt);
    write_fit_report(out, result, data, &boot);
  } else {
    write_fit_report(out, result, data);
  }
  if (!args.residuals_path.empty()) {
    std::ofstream res(args.residuals_path);
    if (!res) throw InvalidInput("cannot write residuals to '" + args.residuals_path + "'");
    res << csv_preamble(c) << '\n';
    write_residual_csv(res, result, data);
  }
  if (ctx.info) *ctx.info << result.message << '\n';
}

void cmd_sensitivity(const Context& ctx, const SensitivityArgs& args, std::ostream& out) {
  const RunConfig& c = ctx.config;
  const FieldOrientation field = chosen_field(ctx, args.at_sta);
  out << csv_preamble(c) << '\n';
  out << "# " << describe(field) << '\n';
  out << "param,c_value,slope_1,slope_2,slope_3,slope_4,delta_a_mhz\n";
  for (ParamId id : {ParamId::a_xx, ParamId::a_yy, ParamId::a_zz, ParamId::a}) {
    const SensitivityReport r = sensitivity_c(c.system, field, id, args.step);
    out << to_string(id) << ',' << format_double(r.c_value);
    for (double s : r.slopes) out << ',' << format_double(s);
    out << ',';
    if (r.c_value > 0.0) out << format_double(precision_propagation(args.delta_omega, r.c_value));
    else out << "inf";
    out << '\n';
  }
}

void cmd_principal(const Context& ctx, std::ostream& out) {
  const HyperfineTensor& t = ctx.config.system.tensor;
  const PrincipalAxes p = principal_axes(t);
  const PrincipalUncertainty u = propagate_principal_uncertainty(t, ctx.config.tensor_sigma);
  out << csv_preamble(ctx.config) << '\n';
  out << "quantity,value,sigma,unit\n";
  out << "principal_low," << format_double(p.in_plane_low) << ',' << format_double(u.in_plane_low) << ",MHz\n";
  out << "principal_y," << format_double(p.y_value) << ',' << format_double(u.y_value) << ",MHz\n";
  out << "principal_high," << format_double(p.in_plane_high) << ',' << format_double(u.in_plane_high) << ",MHz\n";
  out << "theta_p," << format_double(p.theta_p) << ',' << format_double(u.theta_p) << ",deg\n";
  out << "theta_p_alt," << format_double(p.theta_p_alt) << ',' << format_double(u.theta_p) << ",deg\n";
}

void cmd_synth(const Context& ctx, const SynthArgs& args, std::ostream& out) {
  const RunConfig& c = ctx.config;
  if (args.design.empty()) throw InvalidInput("synth: empty design");
  std::vector<DesignPoint> design;
  std::optional<FieldOrientation> sta;
  auto need_sta = [&]() -> const FieldOrientation& {
    if (!sta) sta = sta_field(ctx);
    return *sta;
  };
  for (const std::string& item : args.design) {
    std::vector<DesignPoint> part;
    if (item == "sq-sta") {
      part = sq_lines_design(need_sta().theta(), need_sta().phi());
    } else if (item == "zq-phi-sweep") {
      part = zq_phi_sweep_design(c.field().theta(), 0.0, 360.0, args.phi_step);
    } else if (item == "amp-theta-scan") {
      // Amplitude dip around the single-transition axis, skipping its centre.
      std::vector<double> thetas;
      const double centre = need_sta().theta();
      for (int k = -5; k <= 5; ++k) {
        if (k != 0 && centre + k >= 0.0) thetas.push_back(centre + k);
      }
      part = zq_amplitude_theta_design(need_sta().phi(), thetas);
    } else {
      throw InvalidInput("synth: unknown design item '" + item + "' (sq-sta, zq-phi-sweep, amp-theta-scan)");
    }
    design.insert(design.end(), part.begin(), part.end());
  }
  const FitParameters truth = FitParameters::from(c.system.tensor, c.b, c.phi_offset);
  const ScanDataset data = synthesize_dataset(c.system, truth, design, c.noise, c.imperfection_if_enabled(), c.seed);
  out << csv_preamble(c) << '\n';
  write_dataset_csv(out, data);
}

}  // namespace nvbeat::cli

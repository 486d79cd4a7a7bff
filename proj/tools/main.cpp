#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "nvbeat/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

}  // namespace

int main(int argc, char** argv) {
  using namespace nvbeat;
  using namespace nvbeat::cli;

  CLI::App app{"Electron-nuclear spin pair simulation and hyperfine tensor estimation"};
  app.set_version_flag("--version", std::string("nvbeat ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "Run configuration (key = value)");
  auto* seed_opt = app.add_option("--seed", seed, "Overrides the configured seed");
  app.add_option("--out", out_path, "Write the primary output here instead of stdout");
  app.add_option("--threads", threads, "Worker threads for grid evaluations")->check(CLI::Range(1, 256));

  SpectrumArgs spectrum;
  auto* c_spectrum = app.add_subcommand("spectrum", "Single-quantum lines and their drive amplitudes");
  c_spectrum->add_flag("--at-sta", spectrum.at_sta, "Use the single-transition axis at the configured field");
  c_spectrum->add_option("--min-amplitude", spectrum.min_relative_amplitude,
                         "Drop lines weaker than this fraction of the strongest");

  ZqScanArgs zq;
  std::string sweep = "phi";
  auto* c_zq = app.add_subcommand("zq-scan", "Ground-manifold splitting versus one field angle");
  c_zq->add_option("--sweep", sweep, "theta or phi")->check(CLI::IsMember({"theta", "phi"}));
  c_zq->add_option("--from", zq.from, "First angle, degrees");
  c_zq->add_option("--to", zq.to, "Last angle, degrees");
  c_zq->add_option("--step", zq.step, "Angle step, degrees");

  TraceArgs rabi;
  auto* c_rabi = app.add_subcommand("rabi", "Rabi oscillation trace and its frequency content");
  c_rabi->add_flag("--at-sta", rabi.at_sta, "Use the single-transition axis at the configured field");

  TraceArgs ramsey;
  auto* c_ramsey = app.add_subcommand("ramsey", "Zero-quantum Ramsey trace and its beat spectrum");
  c_ramsey->add_flag("--at-sta", ramsey.at_sta, "Use the single-transition axis at the configured field");

  FitArgs fit;
  std::string fixed;
  auto* c_fit = app.add_subcommand("fit", "Least-squares fit of the hyperfine tensor to a scan dataset");
  c_fit->add_option("dataset", fit.dataset_path, "Scan dataset CSV")->required();
  c_fit->add_option("--fix", fixed, "Comma-separated parameters held at their configured values");
  c_fit->add_option("--bootstrap", fit.bootstrap, "Residual-bootstrap resamples (0 disables)")
      ->check(CLI::NonNegativeNumber);
  c_fit->add_option("--residuals", fit.residuals_path, "Write the residual table to this CSV");

  SensitivityArgs sens;
  auto* c_sens = app.add_subcommand("sensitivity", "Line sensitivities to each tensor component");
  c_sens->add_flag("--at-sta", sens.at_sta, "Use the single-transition axis at the configured field");
  c_sens->add_option("--step", sens.step, "Finite-difference step, MHz");
  c_sens->add_option("--delta-omega", sens.delta_omega, "Frequency precision to propagate, MHz");

  app.add_subcommand("principal", "Principal values and axis angle of the tensor");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Synthetic scan dataset from the configured parameters");
  c_synth->add_option("--design", synth.design, "Design items: sq-sta, zq-phi-sweep, amp-theta-scan")
      ->delimiter(',');
  c_synth->add_option("--phi-step", synth.phi_step, "Step of the zq-phi-sweep, degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    Context ctx;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (*seed_opt) ctx.config.seed = seed;
    ctx.threads = threads;

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw InvalidInput("cannot open output file '" + out_path + "'");
      out = &file;
      ctx.info = &std::cout;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "spectrum") {
      cmd_spectrum(ctx, spectrum, *out);
    } else if (name == "zq-scan") {
      zq.axis = sweep == "theta" ? SweepAxis::theta : SweepAxis::phi;
      cmd_zq_scan(ctx, zq, *out);
    } else if (name == "rabi") {
      cmd_rabi(ctx, rabi, *out);
    } else if (name == "ramsey") {
      cmd_ramsey(ctx, ramsey, *out);
    } else if (name == "fit") {
      std::stringstream list(fixed);
      for (std::string item; std::getline(list, item, ',');) {
        if (!item.empty()) fit.fixed.push_back(item);
      }
      cmd_fit(ctx, fit, *out);
    } else if (name == "sensitivity") {
      cmd_sensitivity(ctx, sens, *out);
    } else if (name == "principal") {
      cmd_principal(ctx, *out);
    } else if (name == "synth") {
      cmd_synth(ctx, synth, *out);
    }
    out->flush();
    if (!*out) throw nvbeat::Error("failed writing output");
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

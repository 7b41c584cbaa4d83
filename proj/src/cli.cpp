/* Copyright 2026 The Pulsegate Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "pulsegate/cli.hpp"
#include "pulsegate/errors.hpp"
#include "pulsegate/io.hpp"

namespace pulsegate {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> rf_scales(const GrapeProblem& problem, double scale) {
  return std::vector<double>(problem.channels().size(), scale);
}

// Fidelity of `pulse` on the nominal member with every channel's RF scaled.
double scaled_fidelity(const GrapeProblem& problem, const ControlPulse& pulse, double scale) {
  EnsembleMember member{rf_scales(problem, scale), {}, 1.0};
  return evaluate(problem.with_ensemble({member}), pulse).weighted;
}

int cmd_design(const std::string& config_path, const std::vector<std::uint64_t>& seeds_arg,
               const std::string& out, const std::string& report, std::ostream& os) {
  const RunConfig cfg = load_config(config_path);
  const GrapeProblem problem = cfg.problem();
  const auto seeds = seeds_arg.empty() ? cfg.seeds : seeds_arg;
  const DesignResult result = design(problem, cfg.options, seeds);
  const double nominal = evaluate(problem.nominal_only(), result.pulse).weighted;

  write_pulse(result.pulse, out);
  if (!report.empty()) write_text_file_atomic(report, design_report_json(result, nominal));

  const auto& best = result.outcomes[result.best];
  os << "best_seed " << best.seed << "\n";
  os << "nominal_fidelity " << fixed(nominal) << "\n";
  os << "worst_member_fidelity " << fixed(best.fidelity.worst()) << "\n";
  if (nominal < cfg.required_fidelity) {
    std::cerr << "error: nominal fidelity " << fixed(nominal) << " is below the required "
              << fixed(cfg.required_fidelity) << "\n";
    return 2;
  }
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& pulse_path,
                 std::optional<double> rf_scale, std::ostream& os) {
  const RunConfig cfg = load_config(config_path);
  const GrapeProblem problem = cfg.problem();
  const ControlPulse pulse = read_pulse(pulse_path);
  problem.check_pulse(pulse);
  if (rf_scale) {
    if (!(*rf_scale > 0.0)) throw ValidationError("--rf-scale must be > 0");
    os << fixed(scaled_fidelity(problem, pulse, *rf_scale)) << "\n";
  } else {
    os << fixed(evaluate(problem.nominal_only(), pulse).weighted) << "\n";
  }
  return 0;
}

int cmd_sensitivity(const std::string& config_path, const std::string& pulse_path,
                    const std::string& specs_path, const std::string& out, std::ostream& os) {
  const RunConfig cfg = load_config(config_path);
  const ControlPulse pulse = read_pulse(pulse_path);
  const auto specs = load_deviation_specs(specs_path);
  const std::string csv = sensitivity_csv(scan(pulse, cfg.problem(), specs));
  if (out.empty())
    os << csv;
  else
    write_text_file_atomic(out, csv);
  return 0;
}

// "comp" or "pe:A,B".
OperatorMatrix ideal_unitary(const std::string& spec, const SpinSystem& system) {
  if (spec == "comp") return ideal_comp_unitary(system.size());
  if (spec.rfind("pe:", 0) == 0) {
    const auto comma = spec.find(',', 3);
    if (comma == std::string::npos) throw ValidationError("--ideal pe needs two spins, e.g. pe:C2,H");
    return ideal_pe_unitary(PeVariant::phase_variant, system.index_of(spec.substr(3, comma - 3)),
                            system.index_of(spec.substr(comma + 1)), system.size());
  }
  throw ValidationError("--ideal expects 'comp' or 'pe:A,B', got '" + spec + "'");
}

int cmd_spectrum(const std::string& config_path, const std::string& pulse_path,
                 const std::string& ideal, const std::string& readout, std::optional<double> rf_scale,
                 const std::string& prefix, std::ostream& os) {
  const RunConfig cfg = load_config(config_path);
  AcquisitionConfig acq = cfg.acquisition;
  if (!readout.empty()) {
    cfg.system.channel_index(readout);
    acq.channel = readout;
    if (readout != cfg.acquisition.channel) acq.windows.clear();
  }
  if (!pulse_path.empty() && !ideal.empty()) throw ValidationError("give either a pulse or --ideal, not both");

  // Pulses act on the thermal equilibrium state, as in the lab.
  OperatorMatrix rho = thermal_deviation_state(cfg.system);
  if (!pulse_path.empty()) {
    const GrapeProblem problem = cfg.problem();
    const ControlPulse pulse = read_pulse(pulse_path);
    problem.check_pulse(pulse);
    const auto scale = rf_scales(problem, rf_scale.value_or(1.0));
    rho = propagate(rho, pulse.with_dt(problem.dt()), problem.drift(), problem.controls(), scale).final();
  } else if (!ideal.empty()) {
    rho = conjugate(ideal_unitary(ideal, cfg.system), rho);
  }

  const Measurement m = measure(rho, cfg.system, acq);
  std::string table = "spin,polarization\n";
  for (const auto& [label, value] : m.polarization) table += label + "," + fixed(value) + "\n";
  if (!prefix.empty()) {
    write_text_file_atomic(prefix + "_fid.csv", fid_csv(m.fid));
    write_text_file_atomic(prefix + "_spectrum.csv", spectrum_csv(m.spectrum));
    write_text_file_atomic(prefix + "_polarization.csv", table);
  }
  os << table;
  return 0;
}

int cmd_convert(const std::string& pulse_path, const std::string& channel, const std::string& component,
                std::ostream& os) {
  const ControlPulse pulse = read_pulse(pulse_path);
  Axis axis = Axis::x;
  if (component == "y") axis = Axis::y;
  else if (component != "x") throw ValidationError("--component must be x or y");
  os << spectrum_csv(pulse_spectrum(pulse, channel.empty() ? pulse.channels().front() : channel, axis));
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& os) {
  CLI::App app{"Shaped-pulse design and verification for small NMR spin systems"};
  app.require_subcommand(1);

  std::string config, pulse, specs, out, report, ideal, readout, channel, component = "x";
  std::vector<std::uint64_t> seeds;
  std::optional<double> rf_scale;

  auto* design_cmd = app.add_subcommand("design", "Optimize a pulse for the config's problem");
  design_cmd->add_option("config", config, "Run config (JSON)")->required();
  design_cmd->add_option("--seeds", seeds, "Comma-separated random seeds")->delimiter(',');
  design_cmd->add_option("--out", out, "Pulse file to write")->required();
  design_cmd->add_option("--report", report, "JSON report to write");

  auto* eval_cmd = app.add_subcommand("evaluate", "Print the nominal fidelity of a pulse");
  eval_cmd->add_option("config", config)->required();
  eval_cmd->add_option("pulse", pulse)->required();
  eval_cmd->add_option("--rf-scale", rf_scale, "Scale every channel's RF amplitude");

  auto* sens_cmd = app.add_subcommand("sensitivity", "Fidelity under single-parameter deviations");
  sens_cmd->add_option("config", config)->required();
  sens_cmd->add_option("pulse", pulse)->required();
  sens_cmd->add_option("specs", specs, "Deviation rows (JSON)")->required();
  sens_cmd->add_option("--out", out, "CSV file to write (default stdout)");

  auto* spec_cmd = app.add_subcommand("spectrum", "Simulated readout spectrum and polarizations");
  spec_cmd->add_option("config", config)->required();
  spec_cmd->add_option("pulse", pulse, "Pulse applied to the equilibrium state (omit for reference)");
  spec_cmd->add_option("--ideal", ideal, "Apply an ideal gate instead: comp or pe:A,B");
  spec_cmd->add_option("--readout", readout, "Observed channel");
  spec_cmd->add_option("--rf-scale", rf_scale, "Scale every channel's RF amplitude");
  spec_cmd->add_option("--out", out, "Output prefix for FID, spectrum and polarization CSVs");

  auto* conv_cmd = app.add_subcommand("convert", "Fourier transform of one pulse component");
  conv_cmd->add_option("pulse", pulse)->required();
  conv_cmd->add_option("--channel", channel);
  conv_cmd->add_option("--component", component, "x or y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*design_cmd) return cmd_design(config, seeds, out, report, os);
    if (*eval_cmd) return cmd_evaluate(config, pulse, rf_scale, os);
    if (*sens_cmd) return cmd_sensitivity(config, pulse, specs, out, os);
    if (*spec_cmd) return cmd_spectrum(config, pulse, ideal, readout, rf_scale, out, os);
    if (*conv_cmd) return cmd_convert(pulse, channel, component, os);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace pulsegate

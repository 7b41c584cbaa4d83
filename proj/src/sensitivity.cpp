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
#include <cmath>

#include "pulsegate/errors.hpp"
#include "pulsegate/sensitivity.hpp"

namespace pulsegate {

namespace {

std::pair<int, int> parse_pair(const SpinSystem& system, const std::string& target) {
  const auto dash = target.find('-');
  if (dash == std::string::npos) throw ValidationError("expected spin pair 'A-B', got '" + target + "'");
  const int a = system.index_of(target.substr(0, dash));
  const int b = system.index_of(target.substr(dash + 1));
  if (a == b) throw ValidationError("spin pair '" + target + "' names one spin twice");
  return {a, b};
}

}  // namespace

const char* to_string(DeviationKind kind) {
  switch (kind) {
    case DeviationKind::b0_scale: return "b0_scale";
    case DeviationKind::j_coupling: return "j_coupling";
    case DeviationKind::duration_scale: return "duration_scale";
    case DeviationKind::channel_offset: return "channel_offset";
    case DeviationKind::pair_larmor_difference: return "pair_larmor_difference";
  }
  return "?";
}

DeviationKind deviation_kind_from_string(std::string_view text) {
  for (auto k : {DeviationKind::b0_scale, DeviationKind::j_coupling, DeviationKind::duration_scale,
                 DeviationKind::channel_offset, DeviationKind::pair_larmor_difference})
    if (text == to_string(k)) return k;
  throw ValidationError("unknown deviation kind '" + std::string(text) + "'");
}

double nominal_value(const GrapeProblem& problem, const DeviationSpec& spec) {
  const SpinSystem& sys = problem.system();
  switch (spec.kind) {
    case DeviationKind::b0_scale:
    case DeviationKind::duration_scale:
      return 1.0;
    case DeviationKind::channel_offset:
      sys.channel_index(spec.target);
      return 0.0;
    case DeviationKind::j_coupling: {
      const auto [a, b] = parse_pair(sys, spec.target);
      return sys.coupling(a, b);
    }
    case DeviationKind::pair_larmor_difference: {
      const auto [a, b] = parse_pair(sys, spec.target);
      return std::abs(sys.spin(a).offset_hz - sys.spin(b).offset_hz);
    }
  }
  return 0.0;
}

GrapeProblem apply_deviation(const GrapeProblem& problem, const DeviationSpec& spec) {
  if (!std::isfinite(spec.value)) throw ValidationError("deviation value must be finite");
  SpinSystem sys = problem.system();
  switch (spec.kind) {
    case DeviationKind::b0_scale:
      if (!(spec.value > 0.0)) throw ValidationError("b0_scale must be > 0");
      for (int i = 0; i < sys.size(); ++i) sys.set_offset(i, sys.spin(i).offset_hz * spec.value);
      return problem.with_system(std::move(sys));
    case DeviationKind::duration_scale:
      if (!(spec.value > 0.0)) throw ValidationError("duration_scale must be > 0");
      return problem.with_duration(problem.duration() * spec.value);
    case DeviationKind::j_coupling: {
      const auto [a, b] = parse_pair(sys, spec.target);
      sys.set_coupling(a, b, spec.value);
      return problem.with_system(std::move(sys));
    }
    case DeviationKind::channel_offset:
      for (int i : sys.spins_on(spec.target)) sys.set_offset(i, sys.spin(i).offset_hz - spec.value);
      return problem.with_system(std::move(sys));
    case DeviationKind::pair_larmor_difference: {
      const auto [a, b] = parse_pair(sys, spec.target);
      if (spec.value < 0.0) throw ValidationError("pair_larmor_difference must be >= 0");
      const double oa = sys.spin(a).offset_hz;
      const double ob = sys.spin(b).offset_hz;
      const double mean = 0.5 * (oa + ob);
      const double sign = oa >= ob ? 1.0 : -1.0;
      sys.set_offset(a, mean + sign * 0.5 * spec.value);
      sys.set_offset(b, mean - sign * 0.5 * spec.value);
      return problem.with_system(std::move(sys));
    }
  }
  throw ValidationError("unhandled deviation kind");
}

SensitivityReport scan(const ControlPulse& pulse, const GrapeProblem& problem,
                       const std::vector<DeviationSpec>& specs) {
  const GrapeProblem nominal = problem.nominal_only();
  SensitivityReport report;
  report.rows.push_back({"nominal", 0.0, 0.0, evaluate(nominal, pulse).weighted});
  // Validate everything before the (slow) propagations.
  std::vector<GrapeProblem> deviated;
  for (const auto& spec : specs) deviated.push_back(apply_deviation(nominal, spec));
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    SensitivityRow row;
    row.label = spec.label.empty() ? std::string(to_string(spec.kind)) +
                                         (spec.target.empty() ? "" : ":" + spec.target)
                                   : spec.label;
    row.nominal = nominal_value(nominal, spec);
    row.deviated = spec.value;
    row.fidelity = evaluate(deviated[k], pulse).weighted;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace pulsegate

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
#pragma once

#include <string>
#include <vector>

#include "pulsegate/grape.hpp"

namespace pulsegate {

enum class DeviationKind { b0_scale, j_coupling, duration_scale, channel_offset, pair_larmor_difference };

const char* to_string(DeviationKind kind);
DeviationKind deviation_kind_from_string(std::string_view text);

/// A single-parameter deviation from the nominal problem.
///
///   b0_scale               value = field ratio; multiplies every offset (J is field independent)
///   j_coupling             target "A-B"; value = new J in Hz
///   duration_scale         value = ratio; multiplies dt
///   channel_offset         target channel; value = carrier shift f in Hz,
///                          every spin on that channel has its offset lowered by f
///   pair_larmor_difference target "A-B"; value = new |offset_A - offset_B| in Hz,
///                          mean offset and ordering of the pair preserved
struct DeviationSpec {
  DeviationKind kind = DeviationKind::b0_scale;
  std::string target;
  double value = 0.0;
  std::string label;  // free text for reports
};

GrapeProblem apply_deviation(const GrapeProblem& problem, const DeviationSpec& spec);

// The nominal value of the parameter a spec touches, in the spec's own units
// (1 for the scale kinds, 0 for channel_offset).
double nominal_value(const GrapeProblem& problem, const DeviationSpec& spec);

struct SensitivityRow {
  std::string label;
  double nominal = 0.0;
  double deviated = 0.0;
  double fidelity = 0.0;
};

struct SensitivityReport {
  std::vector<SensitivityRow> rows;  // rows[0] is the undeviated problem
};

/// Nominal-member fidelity of a fixed pulse under each deviation in turn.
SensitivityReport scan(const ControlPulse& pulse, const GrapeProblem& problem,
                       const std::vector<DeviationSpec>& specs);

}  // namespace pulsegate

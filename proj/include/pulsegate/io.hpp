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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsegate/grape.hpp"
#include "pulsegate/sensitivity.hpp"
#include "pulsegate/spectro.hpp"

namespace pulsegate {

/// Everything one config file describes: the spin system, the design problem,
/// optimizer settings and the acquisition used for verification.
struct RunConfig {
  SpinSystem system;
  OperatorMatrix initial;
  OperatorMatrix target;
  double duration_s = 0.0;
  int steps = 0;
  std::vector<EnsembleMember> ensemble;
  DesignOptions options;
  double required_fidelity = 0.99;
  std::vector<std::uint64_t> seeds{1};
  AcquisitionConfig acquisition;

  GrapeProblem problem() const;
};

// Errors are ValidationError naming the JSON pointer of the offending field.
RunConfig parse_config(std::string_view json_text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

std::vector<DeviationSpec> parse_deviation_specs(std::string_view json_text,
                                                 const std::string& source = "specs");
std::vector<DeviationSpec> load_deviation_specs(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Pulse files
//
//   #format_version 1
//   #channels C H
//   #steps 1000
//   #dt_us 6
//   #max_rf_hz 2000.000000 2000.000000
//   amp_hz_ch1,phase_deg_ch1,amp_hz_ch2,phase_deg_ch2
//   ...
//
// Amplitude and phase (degrees, [0,360)) are printed with six decimals.

constexpr int kPulseFormatVersion = 1;

std::string format_pulse(const ControlPulse& pulse);
ControlPulse parse_pulse(std::string_view text, const std::string& source = "pulse");

void write_pulse(const ControlPulse& pulse, const std::filesystem::path& path);
ControlPulse read_pulse(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

std::string ascent_report_json(const AscentReport& report);
std::string design_report_json(const DesignResult& result, double nominal_fidelity);
std::string sensitivity_csv(const SensitivityReport& report);
std::string fid_csv(const FidRecord& fid);
std::string spectrum_csv(const Spectrum& spectrum);

std::string read_text_file(const std::filesystem::path& path);

// Writes via a temporary sibling and rename, so readers never see half a file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace pulsegate

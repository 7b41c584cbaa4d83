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

// Simulated lab verification: hard readout pulse, FID acquisition, Fourier
// transform and line integration.

#include <map>
#include <string>
#include <vector>

#include "pulsegate/propagation.hpp"

namespace pulsegate {

// Ideal instantaneous 90 degree pulse on every spin of `channel`, about the
// axis cos(phase) x + sin(phase) y. Phase 0 takes Iz to -Iy, phase pi/2 takes
// Iz to +Ix.
OperatorMatrix readout_90(const OperatorMatrix& rho, const SpinSystem& system,
                          std::string_view channel, double phase_rad);

struct FidRecord {
  double dwell = 0.0;  // s
  std::string channel;
  Eigen::VectorXcd samples;

  int points() const { return static_cast<int>(samples.size()); }
};

/// s(t_k) = sum over spins i on the channel of Tr(I+_i rho(t_k)) exp(-t_k/T2*_i),
/// with rho evolving freely under the drift Hamiltonian. Spins without a T2*
/// do not decay.
FidRecord acquire(const OperatorMatrix& rho, const SpinSystem& system, std::string_view channel,
                  double dwell_s, int points);

struct LineWindow {
  std::string label;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

struct Spectrum {
  Eigen::VectorXd frequencies;  // Hz, strictly increasing, centred on the carrier
  Eigen::VectorXcd values;
  std::vector<LineWindow> windows;

  double bin_width() const { return frequencies.size() > 1 ? frequencies(1) - frequencies(0) : 0.0; }
};

struct TransformOptions {
  int zero_fill = 2;  // transform length = next_pow2(points) * zero_fill
  // Weight of the t=0 sample. 0.5 removes the constant baseline a one-sided
  // discrete transform otherwise adds under every line.
  double first_point_scale = 0.5;
};

// Forward DFT, exp(-2 pi i f t). Axis spans [-1/(2 dwell), 1/(2 dwell)).
Spectrum to_spectrum(const FidRecord& fid, TransformOptions options = {});

// Windows of +-(sum_j |J_ij|/2 + margin_linewidths * 1/(pi T2*_i)) around each
// spin's offset. Spins without a T2* get a 1 Hz linewidth.
std::vector<LineWindow> default_windows(const SpinSystem& system, std::string_view channel,
                                        double margin_linewidths = 5.0);

// Throws if any two windows overlap or one leaves the spectrum axis.
void check_windows(const Spectrum& spectrum, const std::vector<LineWindow>& windows);

// Raw integral of Re(spectrum) over each window (Hz-weighted).
std::map<std::string, double> line_integrals(const Spectrum& spectrum,
                                             const std::vector<LineWindow>& windows);

/// Line integrals normalised by the same windows in a reference spectrum:
/// 1.0 means "the reference polarization of that spin".
std::map<std::string, double> integrate_lines(const Spectrum& spectrum, const Spectrum& reference,
                                              const std::vector<LineWindow>& windows);

// DFT of one Cartesian component of a channel's waveform; spectral width 1/dt.
Spectrum pulse_spectrum(const ControlPulse& pulse, std::string_view channel, Axis component);

struct AcquisitionConfig {
  double dwell_s = 200e-6;
  int points = 8192;
  int zero_fill = 2;
  double readout_phase_deg = 90.0;
  std::string channel;              // empty: first channel
  std::vector<LineWindow> windows;  // empty: default_windows()
  double window_margin_linewidths = 5.0;
};

struct Measurement {
  FidRecord fid;
  Spectrum spectrum;
  std::map<std::string, double> polarization;  // relative to thermal equilibrium
};

/// Readout, acquisition, transform and line integration of `rho`, normalised
/// against the same pipeline run on the thermal equilibrium state.
Measurement measure(const OperatorMatrix& rho, const SpinSystem& system,
                    const AcquisitionConfig& acquisition);

}  // namespace pulsegate

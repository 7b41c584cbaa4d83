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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pulsegate/spin_core.hpp"

namespace pulsegate {

/// Piecewise-constant multi-channel RF waveform. Amplitudes are stored as an
/// N x 2C matrix in Hz with columns (ux_0, uy_0, ux_1, uy_1, ...), one column
/// pair per channel in `channels()` order.
class ControlPulse {
 public:
  static constexpr int kMaxSteps = 5000;

  ControlPulse(double dt_s, std::vector<std::string> channels, std::vector<double> max_rf_hz,
               Eigen::MatrixXd amplitudes);

  static ControlPulse zeros(double dt_s, int steps, std::vector<std::string> channels,
                            std::vector<double> max_rf_hz);

  double dt() const { return dt_; }
  int steps() const { return static_cast<int>(amps_.rows()); }
  int n_channels() const { return static_cast<int>(channels_.size()); }
  double duration() const { return dt_ * steps(); }

  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<double>& max_rf() const { return max_rf_; }
  const Eigen::MatrixXd& amplitudes() const { return amps_; }
  int channel_index(std::string_view name) const;

  double ux(int step, int channel) const { return amps_(step, 2 * channel); }
  double uy(int step, int channel) const { return amps_(step, 2 * channel + 1); }

  ControlPulse with_amplitudes(Eigen::MatrixXd amplitudes) const;
  ControlPulse with_dt(double dt_s) const;

  // Largest sqrt(ux^2+uy^2) / max_rf over all steps and channels.
  double peak_cap_ratio() const;

 private:
  double dt_;
  std::vector<std::string> channels_;
  std::vector<double> max_rf_;
  Eigen::MatrixXd amps_;
};

/// Concatenation A||B. Both pulses need the same dt and channels.
ControlPulse concatenate(const ControlPulse& a, const ControlPulse& b);

/// exp(-i H dt) from the eigendecomposition of a Hermitian H. Keeps the
/// eigenbasis around because the gradient needs it.
struct HermitianExp {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd values;
  Eigen::MatrixXcd propagator;

  HermitianExp(const Eigen::MatrixXcd& h, double dt);

  // Daleckii-Krein divided differences of f(x) = exp(-i x dt) on the
  // eigenvalues; dU = V (M o V^dagger dH V) V^dagger.
  Eigen::MatrixXcd divided_differences(double dt) const;
};

OperatorMatrix expm_step(const OperatorMatrix& h, double dt);

struct PropagateOptions {
  bool keep_propagators = false;
  bool keep_states = false;
};

struct Trajectory {
  std::vector<Eigen::MatrixXcd> propagators;  // U_1..U_N when kept
  std::vector<Eigen::MatrixXcd> states;       // rho_0..rho_N when kept
  Eigen::MatrixXcd final_state;

  OperatorMatrix final() const { return OperatorMatrix(final_state, Role::state); }
};

using ControlMap = std::map<std::string, ControlPair>;

/// Drift and control operators resolved into pulse-channel order.
struct StepModel {
  Eigen::MatrixXcd drift;
  std::vector<Eigen::MatrixXcd> hx;
  std::vector<Eigen::MatrixXcd> hy;

  StepModel(const OperatorMatrix& drift, const ControlMap& controls,
            const std::vector<std::string>& channels);

  // H_j with per-channel RF scaling (empty scale => 1).
  Eigen::MatrixXcd hamiltonian(const ControlPulse& pulse, int step,
                               std::span<const double> rf_scale) const;
};

Trajectory propagate(const OperatorMatrix& rho0, const ControlPulse& pulse,
                     const OperatorMatrix& drift, const ControlMap& controls,
                     std::span<const double> rf_scale = {}, PropagateOptions options = {});

/// Re Tr(target^dagger rho) / (|target|_F |rho|_F).
double fidelity(const OperatorMatrix& rho, const OperatorMatrix& target);
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& target);

}  // namespace pulsegate

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
#include <string>
#include <vector>

#include "pulsegate/propagation.hpp"

namespace pulsegate {

/// One realisation of the hardware the pulse has to survive. `rf_scale`
/// multiplies both RF components of each channel; `carrier_shift_hz` moves
/// each channel's carrier (every spin on that channel sees its offset drop
/// by the shift). Empty vectors mean nominal.
struct EnsembleMember {
  std::vector<double> rf_scale;
  std::vector<double> carrier_shift_hz;
  double weight = 1.0;
};

std::vector<EnsembleMember> nominal_ensemble(int n_channels);

// Members scaling every channel jointly by each factor, equal weights.
std::vector<EnsembleMember> rf_scale_ensemble(int n_channels, const std::vector<double>& scales);

/// State-to-state design problem on a spin system.
class GrapeProblem {
 public:
  GrapeProblem(SpinSystem system, OperatorMatrix rho0, OperatorMatrix target, double duration_s,
               int steps, std::vector<EnsembleMember> ensemble = {});

  const SpinSystem& system() const { return system_; }
  const OperatorMatrix& drift() const { return drift_; }
  const ControlMap& controls() const { return controls_; }
  const OperatorMatrix& rho0() const { return rho0_; }
  const OperatorMatrix& target() const { return target_; }
  double duration() const { return duration_; }
  int steps() const { return steps_; }
  double dt() const { return duration_ / steps_; }
  const std::vector<EnsembleMember>& ensemble() const { return ensemble_; }

  const std::vector<std::string>& channels() const { return channel_names_; }
  std::vector<double> max_rf() const;

  // Drift seen by ensemble member k (carrier shifts folded in).
  const OperatorMatrix& member_drift(std::size_t k) const { return member_drift_[k]; }

  GrapeProblem with_system(SpinSystem system) const;
  GrapeProblem with_duration(double duration_s) const;
  GrapeProblem with_ensemble(std::vector<EnsembleMember> ensemble) const;
  GrapeProblem nominal_only() const;

  // Throws unless the pulse has this problem's step count and channel order.
  void check_pulse(const ControlPulse& pulse) const;

 private:
  SpinSystem system_;
  OperatorMatrix drift_;
  ControlMap controls_;
  OperatorMatrix rho0_;
  OperatorMatrix target_;
  double duration_;
  int steps_;
  std::vector<EnsembleMember> ensemble_;
  std::vector<std::string> channel_names_;
  std::vector<OperatorMatrix> member_drift_;
};

struct EnsembleFidelity {
  double weighted = 0.0;
  std::vector<double> members;

  double worst() const;
};

// Pulses are always played with the problem's dt.
EnsembleFidelity evaluate(const GrapeProblem& problem, const ControlPulse& pulse);

struct GradientResult {
  Eigen::MatrixXd gradient;  // same layout as ControlPulse::amplitudes(), 1/Hz
  EnsembleFidelity fidelity;
};

/// Exact gradient of the ensemble-weighted fidelity with respect to every
/// (step, channel, x/y) amplitude. Adjoint scheme: one forward sweep storing
/// the step eigenbases, one backward sweep of the costate
///   lambda_N = T/(|T||rho_N|) - phi rho_N/|rho_N|^2
/// so the norm in the denominator is differentiated too.
GradientResult fidelity_gradient(const GrapeProblem& problem, const ControlPulse& pulse);

inline Eigen::MatrixXd gradient(const GrapeProblem& problem, const ControlPulse& pulse) {
  return fidelity_gradient(problem, pulse).gradient;
}

// Amplitude uniform in [0, amplitude_fraction * max_rf], phase uniform in
// [0, 2pi), drawn step by step from mt19937_64(seed).
ControlPulse init_random_pulse(const GrapeProblem& problem, std::uint64_t seed,
                               double amplitude_fraction = 0.2);

// Radial projection of every (ux, uy) onto the disc of radius max_rf.
ControlPulse clamp(const ControlPulse& pulse, std::span<const double> max_rf_hz);
ControlPulse clamp(const ControlPulse& pulse);

struct AscentOptions {
  int max_iters = 2000;
  double target_fidelity = 0.999;
  // Step sizes are the largest single-amplitude change (Hz) a trial step makes.
  double initial_step = 50.0;
  double backtrack_factor = 0.5;
  double growth_factor = 1.5;
  double min_step = 1e-6;
};

enum class Termination { target_reached, max_iters, step_underflow, stationary };

const char* to_string(Termination t);

struct AscentReport {
  std::vector<double> history;  // ensemble fidelity, entry 0 is the start point
  std::vector<double> member_fidelity;
  int iterations = 0;
  int rejected_trials = 0;
  Termination termination = Termination::max_iters;
  std::uint64_t seed = 0;

  double final_fidelity() const { return history.empty() ? 0.0 : history.back(); }
};

struct AscentResult {
  ControlPulse pulse;
  AscentReport report;
};

/// Monotonic gradient ascent with backtracking: a trial u + eps*g is projected
/// onto the RF cap and accepted only if the ensemble fidelity strictly rises.
AscentResult ascend(const GrapeProblem& problem, const ControlPulse& pulse0,
                    const AscentOptions& options, std::uint64_t seed = 0);

struct DesignOptions {
  AscentOptions nominal;  // phase 1, nominal member only
  AscentOptions robust;   // phase 2, full ensemble
  // Random-start amplitude cap as a fraction of max_rf. Starts near 0.2 leave
  // diagonal-to-diagonal transfers parked on the zero-RF saddle.
  double init_amplitude_fraction = 1.0;
  bool parallel = true;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  AscentReport nominal;
  AscentReport robust;
  EnsembleFidelity fidelity;  // final pulse against the full ensemble
};

struct DesignResult {
  ControlPulse pulse;
  std::size_t best = 0;  // index into outcomes
  std::vector<SeedOutcome> outcomes;
};

/// Two-phase design per seed (nominal ascent, then robust re-ascent), keeping
/// the pulse with the best worst-case ensemble member.
DesignResult design(const GrapeProblem& problem, const DesignOptions& options,
                    const std::vector<std::uint64_t>& seeds);

}  // namespace pulsegate

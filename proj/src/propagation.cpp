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

#include <Eigen/Eigenvalues>

#include "pulsegate/errors.hpp"
#include "pulsegate/propagation.hpp"

namespace pulsegate {

ControlPulse::ControlPulse(double dt_s, std::vector<std::string> channels,
                           std::vector<double> max_rf_hz, Eigen::MatrixXd amplitudes)
    : dt_(dt_s), channels_(std::move(channels)), max_rf_(std::move(max_rf_hz)),
      amps_(std::move(amplitudes)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ValidationError("pulse dt must be > 0");
  if (channels_.empty()) throw ValidationError("pulse has no channels");
  if (max_rf_.size() != channels_.size())
    throw ValidationError("pulse needs one max_rf per channel");
  for (double m : max_rf_)
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("pulse max_rf must be > 0");
  if (amps_.rows() < 1) throw ValidationError("pulse needs at least one step");
  if (amps_.rows() > kMaxSteps)
    throw ValidationError("pulse has " + std::to_string(amps_.rows()) + " steps; the limit is " +
                          std::to_string(kMaxSteps));
  if (amps_.cols() != 2 * static_cast<Eigen::Index>(channels_.size()))
    throw ValidationError("pulse amplitude matrix must have 2 columns per channel");
  if (!amps_.allFinite()) throw ValidationError("pulse has non-finite amplitudes");
}

ControlPulse ControlPulse::zeros(double dt_s, int steps, std::vector<std::string> channels,
                                 std::vector<double> max_rf_hz) {
  const auto cols = 2 * static_cast<Eigen::Index>(channels.size());
  return ControlPulse(dt_s, std::move(channels), std::move(max_rf_hz),
                      Eigen::MatrixXd::Zero(steps, cols));
}

int ControlPulse::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i] == name) return static_cast<int>(i);
  throw ValidationError("pulse has no channel '" + std::string(name) + "'");
}

ControlPulse ControlPulse::with_amplitudes(Eigen::MatrixXd amplitudes) const {
  return ControlPulse(dt_, channels_, max_rf_, std::move(amplitudes));
}

ControlPulse ControlPulse::with_dt(double dt_s) const {
  return ControlPulse(dt_s, channels_, max_rf_, amps_);
}

double ControlPulse::peak_cap_ratio() const {
  double peak = 0.0;
  for (int c = 0; c < n_channels(); ++c)
    for (int j = 0; j < steps(); ++j)
      peak = std::max(peak, std::hypot(ux(j, c), uy(j, c)) / max_rf_[static_cast<std::size_t>(c)]);
  return peak;
}

ControlPulse concatenate(const ControlPulse& a, const ControlPulse& b) {
  if (a.dt() != b.dt() || a.channels() != b.channels())
    throw ValidationError("concatenated pulses need equal dt and channels");
  Eigen::MatrixXd amps(a.steps() + b.steps(), a.amplitudes().cols());
  amps << a.amplitudes(), b.amplitudes();
  return a.with_amplitudes(std::move(amps));
}

HermitianExp::HermitianExp(const Eigen::MatrixXcd& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  vectors = es.eigenvectors();
  values = es.eigenvalues();
  const Eigen::VectorXcd phases =
      (values.array() * (-dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
  propagator = vectors * phases.asDiagonal() * vectors.adjoint();
}

Eigen::MatrixXcd HermitianExp::divided_differences(double dt) const {
  // (f(a)-f(b))/(a-b) = -i dt exp(-i (a+b) dt/2) sinc((a-b) dt/2), which is
  // also the right limit f'(a) when a == b.
  const Eigen::Index n = values.size();
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double x = 0.5 * (values(a) - values(b)) * dt;
      const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      m(a, b) = cx(0.0, -dt) * std::polar(sinc, -0.5 * (values(a) + values(b)) * dt);
    }
  }
  return m;
}

OperatorMatrix expm_step(const OperatorMatrix& h, double dt) {
  if (h.role() != Role::hamiltonian) h.as(Role::hamiltonian);  // validates Hermiticity
  if (!std::isfinite(dt)) throw ValidationError("time step must be finite");
  return OperatorMatrix(HermitianExp(h.matrix(), dt).propagator, Role::propagator);
}

StepModel::StepModel(const OperatorMatrix& drift_op, const ControlMap& controls,
                     const std::vector<std::string>& channels)
    : drift(drift_op.matrix()) {
  for (const auto& name : channels) {
    auto it = controls.find(name);
    if (it == controls.end()) throw ValidationError("no control operators for channel '" + name + "'");
    if (it->second.hx.dim() != drift.rows())
      throw ValidationError("control operator dimension does not match drift");
    hx.push_back(it->second.hx.matrix());
    hy.push_back(it->second.hy.matrix());
  }
}

Eigen::MatrixXcd StepModel::hamiltonian(const ControlPulse& pulse, int step,
                                        std::span<const double> rf_scale) const {
  Eigen::MatrixXcd h = drift;
  for (int c = 0; c < pulse.n_channels(); ++c) {
    const double s = rf_scale.empty() ? 1.0 : rf_scale[static_cast<std::size_t>(c)];
    const auto ci = static_cast<std::size_t>(c);
    h.noalias() += (s * pulse.ux(step, c)) * hx[ci];
    h.noalias() += (s * pulse.uy(step, c)) * hy[ci];
  }
  return h;
}

Trajectory propagate(const OperatorMatrix& rho0, const ControlPulse& pulse,
                     const OperatorMatrix& drift, const ControlMap& controls,
                     std::span<const double> rf_scale, PropagateOptions options) {
  if (rho0.dim() != drift.dim()) throw ValidationError("state and drift dimensions differ");
  if (!rf_scale.empty() && rf_scale.size() != static_cast<std::size_t>(pulse.n_channels()))
    throw ValidationError("rf_scale needs one entry per pulse channel");
  if (!pulse.amplitudes().allFinite()) throw NumericError("pulse has NaN amplitudes");

  const StepModel model(drift, controls, pulse.channels());
  Trajectory traj;
  Eigen::MatrixXcd rho = rho0.matrix();
  if (options.keep_states) traj.states.push_back(rho);
  for (int j = 0; j < pulse.steps(); ++j) {
    const HermitianExp step(model.hamiltonian(pulse, j, rf_scale), pulse.dt());
    rho = step.propagator * rho * step.propagator.adjoint();
    if (options.keep_propagators) traj.propagators.push_back(step.propagator);
    if (options.keep_states) traj.states.push_back(rho);
  }
  traj.final_state = std::move(rho);
  return traj;
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& target) {
  if (rho.rows() != target.rows() || rho.cols() != target.cols())
    throw ValidationError("fidelity arguments differ in dimension");
  const double nr = rho.norm();
  const double nt = target.norm();
  if (nr == 0.0 || nt == 0.0) throw NumericError("fidelity of a zero-norm state");
  return target.conjugate().cwiseProduct(rho).sum().real() / (nr * nt);
}

double fidelity(const OperatorMatrix& rho, const OperatorMatrix& target) {
  return fidelity(rho.matrix(), target.matrix());
}

}  // namespace pulsegate

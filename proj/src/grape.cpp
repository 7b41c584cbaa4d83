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
#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "pulsegate/errors.hpp"
#include "pulsegate/grape.hpp"

namespace pulsegate {

std::vector<EnsembleMember> nominal_ensemble(int n_channels) {
  return {EnsembleMember{std::vector<double>(static_cast<std::size_t>(n_channels), 1.0),
                         std::vector<double>(static_cast<std::size_t>(n_channels), 0.0), 1.0}};
}

std::vector<EnsembleMember> rf_scale_ensemble(int n_channels, const std::vector<double>& scales) {
  if (scales.empty()) throw ValidationError("rf ensemble needs at least one scale");
  std::vector<EnsembleMember> out;
  for (double s : scales)
    out.push_back({std::vector<double>(static_cast<std::size_t>(n_channels), s),
                   std::vector<double>(static_cast<std::size_t>(n_channels), 0.0),
                   1.0 / static_cast<double>(scales.size())});
  return out;
}

// ---------------------------------------------------------------------------
// GrapeProblem

GrapeProblem::GrapeProblem(SpinSystem system, OperatorMatrix rho0, OperatorMatrix target,
                           double duration_s, int steps, std::vector<EnsembleMember> ensemble)
    : system_(std::move(system)),
      drift_(build_drift_hamiltonian(system_)),
      controls_(build_control_operators(system_)),
      rho0_(rho0.as(Role::state)),
      target_(target.as(Role::state)),
      duration_(duration_s),
      steps_(steps),
      ensemble_(std::move(ensemble)) {
  const auto d = static_cast<Eigen::Index>(system_.dim());
  if (rho0_.dim() != d || target_.dim() != d)
    throw ValidationError("initial/target state dimension does not match the spin system");
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) throw ValidationError("duration must be > 0");
  if (steps_ < 1 || steps_ > ControlPulse::kMaxSteps)
    throw ValidationError("steps must be in [1, " + std::to_string(ControlPulse::kMaxSteps) + "]");
  if (rho0_.matrix().norm() == 0.0 || target_.matrix().norm() == 0.0)
    throw ValidationError("initial and target states must be nonzero");

  for (const auto& c : system_.channels()) channel_names_.push_back(c.name);
  const auto nc = channel_names_.size();
  if (ensemble_.empty()) ensemble_ = nominal_ensemble(static_cast<int>(nc));

  double total = 0.0;
  for (auto& m : ensemble_) {
    if (m.rf_scale.empty()) m.rf_scale.assign(nc, 1.0);
    if (m.carrier_shift_hz.empty()) m.carrier_shift_hz.assign(nc, 0.0);
    if (m.rf_scale.size() != nc || m.carrier_shift_hz.size() != nc)
      throw ValidationError("ensemble member needs one rf_scale/carrier shift per channel");
    if (!(m.weight > 0.0)) throw ValidationError("ensemble weights must be positive");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("ensemble weights must sum to 1");

  for (const auto& m : ensemble_) {
    SpinSystem shifted = system_;
    bool any = false;
    for (std::size_t c = 0; c < nc; ++c) {
      if (m.carrier_shift_hz[c] == 0.0) continue;
      any = true;
      for (int i : shifted.spins_on(channel_names_[c]))
        shifted.set_offset(i, shifted.spin(i).offset_hz - m.carrier_shift_hz[c]);
    }
    member_drift_.push_back(any ? build_drift_hamiltonian(shifted) : drift_);
  }
}

std::vector<double> GrapeProblem::max_rf() const {
  std::vector<double> out;
  for (const auto& c : system_.channels()) out.push_back(c.max_rf_hz);
  return out;
}

GrapeProblem GrapeProblem::with_system(SpinSystem system) const {
  return GrapeProblem(std::move(system), rho0_, target_, duration_, steps_, ensemble_);
}

GrapeProblem GrapeProblem::with_duration(double duration_s) const {
  return GrapeProblem(system_, rho0_, target_, duration_s, steps_, ensemble_);
}

GrapeProblem GrapeProblem::with_ensemble(std::vector<EnsembleMember> ensemble) const {
  return GrapeProblem(system_, rho0_, target_, duration_, steps_, std::move(ensemble));
}

GrapeProblem GrapeProblem::nominal_only() const {
  return with_ensemble(nominal_ensemble(static_cast<int>(channel_names_.size())));
}

void GrapeProblem::check_pulse(const ControlPulse& pulse) const {
  if (pulse.steps() != steps_)
    throw ValidationError("pulse has " + std::to_string(pulse.steps()) + " steps, problem expects " +
                          std::to_string(steps_));
  if (pulse.channels() != channel_names_)
    throw ValidationError("pulse channels do not match the problem's channel order");
}

double EnsembleFidelity::worst() const {
  return members.empty() ? 0.0 : *std::min_element(members.begin(), members.end());
}

// ---------------------------------------------------------------------------
// Forward / adjoint sweeps

namespace {

struct ForwardSweep {
  std::vector<HermitianExp> steps;
  std::vector<Eigen::MatrixXcd> states;  // rho_0..rho_N
};

// One routine for both evaluate() and the gradient so fidelities agree bitwise.
Eigen::MatrixXcd forward(const StepModel& model, const ControlPulse& pulse, double dt,
                         std::span<const double> scale, const Eigen::MatrixXcd& rho0,
                         ForwardSweep* keep) {
  Eigen::MatrixXcd rho = rho0;
  if (keep) {
    keep->steps.reserve(static_cast<std::size_t>(pulse.steps()));
    keep->states.reserve(static_cast<std::size_t>(pulse.steps()) + 1);
    keep->states.push_back(rho);
  }
  for (int j = 0; j < pulse.steps(); ++j) {
    HermitianExp step(model.hamiltonian(pulse, j, scale), dt);
    rho = step.propagator * rho * step.propagator.adjoint();
    if (keep) {
      keep->steps.push_back(std::move(step));
      keep->states.push_back(rho);
    }
  }
  return rho;
}

double member_gradient(const StepModel& model, const ControlPulse& pulse, double dt,
                       std::span<const double> scale, const Eigen::MatrixXcd& rho0,
                       const Eigen::MatrixXcd& target, Eigen::MatrixXd* grad) {
  ForwardSweep sweep;
  const Eigen::MatrixXcd rho_n = forward(model, pulse, dt, scale, rho0, grad ? &sweep : nullptr);
  const double phi = fidelity(rho_n, target);
  if (!grad) return phi;

  const double nr = rho_n.norm();
  const double nt = target.norm();
  Eigen::MatrixXcd costate = target / (nr * nt) - (phi / (nr * nr)) * rho_n;

  const int nc = pulse.n_channels();
  for (int j = pulse.steps() - 1; j >= 0; --j) {
    const auto& step = sweep.steps[static_cast<std::size_t>(j)];
    const Eigen::MatrixXcd& u = step.propagator;
    const Eigen::MatrixXcd& v = step.vectors;
    // dphi = 2 Re Tr(dU_j A) with A = rho_{j-1} U_j^dagger lambda_j.
    const Eigen::MatrixXcd a = sweep.states[static_cast<std::size_t>(j)] * u.adjoint() * costate;
    const Eigen::MatrixXcd b = v.adjoint() * a * v;
    const Eigen::MatrixXcd weights =
        step.divided_differences(dt).cwiseProduct(b.transpose());
    for (int c = 0; c < nc; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const double s = scale.empty() ? 1.0 : scale[ci];
      const Eigen::MatrixXcd cx_ = v.adjoint() * model.hx[ci] * v;
      const Eigen::MatrixXcd cy_ = v.adjoint() * model.hy[ci] * v;
      (*grad)(j, 2 * c) += 2.0 * s * weights.cwiseProduct(cx_).sum().real();
      (*grad)(j, 2 * c + 1) += 2.0 * s * weights.cwiseProduct(cy_).sum().real();
    }
    costate = (u.adjoint() * costate * u).eval();
  }
  return phi;
}

EnsembleFidelity sweep_ensemble(const GrapeProblem& problem, const ControlPulse& pulse,
                                Eigen::MatrixXd* grad) {
  problem.check_pulse(pulse);
  if (!pulse.amplitudes().allFinite()) throw NumericError("pulse has NaN amplitudes");
  EnsembleFidelity out;
  const auto& ensemble = problem.ensemble();
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const StepModel model(problem.member_drift(k), problem.controls(), pulse.channels());
    Eigen::MatrixXd member_grad;
    if (grad) member_grad = Eigen::MatrixXd::Zero(pulse.steps(), pulse.amplitudes().cols());
    const double phi = member_gradient(model, pulse, problem.dt(), ensemble[k].rf_scale,
                                       problem.rho0().matrix(), problem.target().matrix(),
                                       grad ? &member_grad : nullptr);
    out.members.push_back(phi);
    out.weighted += ensemble[k].weight * phi;
    if (grad) *grad += ensemble[k].weight * member_grad;
  }
  return out;
}

}  // namespace

EnsembleFidelity evaluate(const GrapeProblem& problem, const ControlPulse& pulse) {
  return sweep_ensemble(problem, pulse, nullptr);
}

GradientResult fidelity_gradient(const GrapeProblem& problem, const ControlPulse& pulse) {
  GradientResult out;
  out.gradient = Eigen::MatrixXd::Zero(pulse.steps(), pulse.amplitudes().cols());
  out.fidelity = sweep_ensemble(problem, pulse, &out.gradient);
  return out;
}

// ---------------------------------------------------------------------------
// Pulses

ControlPulse init_random_pulse(const GrapeProblem& problem, std::uint64_t seed,
                               double amplitude_fraction) {
  if (!(amplitude_fraction > 0.0 && amplitude_fraction <= 1.0))
    throw ValidationError("initial amplitude fraction must be in (0, 1]");
  std::mt19937_64 rng(seed);
  const auto caps = problem.max_rf();
  const int nc = static_cast<int>(caps.size());
  Eigen::MatrixXd amps(problem.steps(), 2 * nc);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int j = 0; j < problem.steps(); ++j) {
    for (int c = 0; c < nc; ++c) {
      std::uniform_real_distribution<double> amp(0.0, amplitude_fraction * caps[static_cast<std::size_t>(c)]);
      const double a = amp(rng);
      const double p = phase(rng);
      amps(j, 2 * c) = a * std::cos(p);
      amps(j, 2 * c + 1) = a * std::sin(p);
    }
  }
  return ControlPulse(problem.dt(), problem.channels(), caps, std::move(amps));
}

ControlPulse clamp(const ControlPulse& pulse, std::span<const double> max_rf_hz) {
  if (max_rf_hz.size() != static_cast<std::size_t>(pulse.n_channels()))
    throw ValidationError("clamp needs one cap per channel");
  Eigen::MatrixXd amps = pulse.amplitudes();
  for (int c = 0; c < pulse.n_channels(); ++c) {
    const double cap = max_rf_hz[static_cast<std::size_t>(c)];
    if (!(cap > 0.0)) throw ValidationError("clamp cap must be > 0");
    for (Eigen::Index j = 0; j < amps.rows(); ++j) {
      const double r = std::hypot(amps(j, 2 * c), amps(j, 2 * c + 1));
      if (r > cap * (1.0 + 1e-14)) {  // slack keeps clamp exactly idempotent
        amps(j, 2 * c) *= cap / r;
        amps(j, 2 * c + 1) *= cap / r;
      }
    }
  }
  return pulse.with_amplitudes(std::move(amps));
}

ControlPulse clamp(const ControlPulse& pulse) { return clamp(pulse, pulse.max_rf()); }

// ---------------------------------------------------------------------------
// Ascent

const char* to_string(Termination t) {
  switch (t) {
    case Termination::target_reached: return "target_reached";
    case Termination::max_iters: return "max_iters";
    case Termination::step_underflow: return "step_underflow";
    case Termination::stationary: return "stationary";
  }
  return "?";
}

AscentResult ascend(const GrapeProblem& problem, const ControlPulse& pulse0,
                    const AscentOptions& options, std::uint64_t seed) {
  if (!(options.backtrack_factor > 0.0 && options.backtrack_factor < 1.0))
    throw ValidationError("backtrack_factor must be in (0,1)");
  if (!(options.growth_factor >= 1.0)) throw ValidationError("growth_factor must be >= 1");
  if (!(options.initial_step > 0.0) || !(options.min_step > 0.0))
    throw ValidationError("step sizes must be > 0");

  const auto caps = problem.max_rf();
  ControlPulse pulse = clamp(pulse0.with_dt(problem.dt()), caps);

  AscentReport report;
  report.seed = seed;
  GradientResult current = fidelity_gradient(problem, pulse);
  double phi = current.fidelity.weighted;
  report.history.push_back(phi);
  double step = options.initial_step;

  while (true) {
    if (phi >= options.target_fidelity) {
      report.termination = Termination::target_reached;
      break;
    }
    if (report.iterations >= options.max_iters) {
      report.termination = Termination::max_iters;
      break;
    }
    const double gmax = current.gradient.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0)) {
      report.termination = Termination::stationary;
      break;
    }
    ++report.iterations;

    bool accepted = false;
    while (step >= options.min_step) {
      ControlPulse trial =
          clamp(pulse.with_amplitudes(pulse.amplitudes() + (step / gmax) * current.gradient), caps);
      const double f = evaluate(problem, trial).weighted;
      if (f > phi) {
        pulse = std::move(trial);
        step *= options.growth_factor;
        accepted = true;
        break;
      }
      step *= options.backtrack_factor;
      ++report.rejected_trials;
    }
    if (!accepted) {
      report.history.push_back(phi);
      report.termination = Termination::step_underflow;
      break;
    }
    current = fidelity_gradient(problem, pulse);
    phi = current.fidelity.weighted;
    report.history.push_back(phi);
  }
  report.member_fidelity = current.fidelity.members;
  return {std::move(pulse), std::move(report)};
}

DesignResult design(const GrapeProblem& problem, const DesignOptions& options,
                    const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ValidationError("design needs at least one seed");
  const GrapeProblem nominal = problem.nominal_only();

  auto run = [&](std::uint64_t seed) {
    SeedOutcome out;
    out.seed = seed;
    AscentResult first = ascend(nominal, init_random_pulse(problem, seed, options.init_amplitude_fraction),
                                options.nominal, seed);
    AscentResult second = ascend(problem, first.pulse, options.robust, seed);
    out.nominal = std::move(first.report);
    out.robust = std::move(second.report);
    out.fidelity = evaluate(problem, second.pulse);
    return std::pair<SeedOutcome, ControlPulse>(std::move(out), std::move(second.pulse));
  };

  std::vector<std::pair<SeedOutcome, ControlPulse>> results;
  if (options.parallel && seeds.size() > 1 && std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<std::pair<SeedOutcome, ControlPulse>>> jobs;
    for (auto s : seeds) jobs.push_back(std::async(std::launch::async, run, s));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (auto s : seeds) results.push_back(run(s));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].first.fidelity.worst() > results[best].first.fidelity.worst()) best = i;

  DesignResult out{results[best].second, best, {}};
  for (auto& r : results) out.outcomes.push_back(std::move(r.first));
  return out;
}

}  // namespace pulsegate

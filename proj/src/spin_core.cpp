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
#include <numbers>

#include "pulsegate/errors.hpp"
#include "pulsegate/spin_core.hpp"

namespace pulsegate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int bit_of(std::size_t index, int spin, int n_spins) {
  return static_cast<int>((index >> (n_spins - 1 - spin)) & 1U);
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::state: return "state";
    case Role::hamiltonian: return "hamiltonian";
    case Role::propagator: return "propagator";
    case Role::observable: return "observable";
  }
  return "?";
}

OperatorMatrix::OperatorMatrix(CMatrix m, Role role) : m_(std::move(m)), role_(role) {
  if (m_.rows() != m_.cols() || !is_power_of_two(m_.rows()))
    throw ValidationError(std::string(to_string(role)) + " matrix must be square with power-of-two size");
  if (!m_.allFinite()) throw NumericError(std::string(to_string(role)) + " matrix has non-finite entries");
  switch (role_) {
    case Role::state:
      if (std::abs(m_.trace()) > kHermitianTol)
        throw ValidationError("state matrix is not traceless");
      [[fallthrough]];
    case Role::hamiltonian:
      if (hermiticity_defect(m_) > kHermitianTol)
        throw ValidationError(std::string(to_string(role)) + " matrix is not Hermitian");
      break;
    case Role::propagator:
      if (unitarity_defect(m_) > kUnitaryTol) throw ValidationError("propagator is not unitary");
      break;
    case Role::observable:
      break;
  }
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator dimension mismatch");
  return OperatorMatrix(a.m_ + b.m_, a.role_ == b.role_ ? a.role_ : Role::observable);
}

OperatorMatrix single_spin_operator(Axis axis, int spin_index, int n_spins) {
  if (n_spins <= 0 || n_spins > kMaxSpins)
    throw ValidationError("n_spins must be in [1," + std::to_string(kMaxSpins) + "]");
  if (spin_index < 0 || spin_index >= n_spins)
    throw ValidationError("spin index " + std::to_string(spin_index) + " out of range");
  return OperatorMatrix(embed_spin_operator(axis, spin_index, n_spins), Role::observable);
}

OperatorMatrix build_drift_hamiltonian(const SpinSystem& system) {
  const int n = system.size();
  const std::size_t d = system.dim();
  // Weak coupling keeps H0 diagonal; build it from the Iz eigenvalues directly.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t idx = 0; idx < d; ++idx) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double mi = bit_of(idx, i, n) ? -0.5 : 0.5;
      e += system.spin(i).offset_hz * mi;
      for (int j = i + 1; j < n; ++j) {
        const double mj = bit_of(idx, j, n) ? -0.5 : 0.5;
        e += system.coupling(i, j) * mi * mj;
      }
    }
    diag(static_cast<Eigen::Index>(idx)) = kTwoPi * e;
  }
  return OperatorMatrix(diag.cast<cx>().asDiagonal().toDenseMatrix(), Role::hamiltonian);
}

std::map<std::string, ControlPair> build_control_operators(const SpinSystem& system) {
  const int n = system.size();
  const auto d = static_cast<Eigen::Index>(system.dim());
  std::map<std::string, ControlPair> out;
  for (const auto& channel : system.channels()) {
    const auto members = system.spins_on(channel.name);
    if (members.empty()) throw ValidationError("channel '" + channel.name + "' drives no spins");
    CMatrix hx = CMatrix::Zero(d, d);
    CMatrix hy = CMatrix::Zero(d, d);
    for (int i : members) {
      hx += embed_spin_operator(Axis::x, i, n);
      hy += embed_spin_operator(Axis::y, i, n);
    }
    out.emplace(channel.name, ControlPair{OperatorMatrix(kTwoPi * hx, Role::hamiltonian),
                                          OperatorMatrix(kTwoPi * hy, Role::hamiltonian)});
  }
  return out;
}

OperatorMatrix thermal_deviation_state(const SpinSystem& system) {
  const int n = system.size();
  const auto d = static_cast<Eigen::Index>(system.dim());
  CMatrix rho = CMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i) rho += system.spin(i).weight * embed_spin_operator(Axis::z, i, n);
  return OperatorMatrix(std::move(rho), Role::state);
}

OperatorMatrix ideal_comp_unitary(int n_spins) {
  if (n_spins != 3) throw ValidationError("compression gate is defined for 3 spins");
  CMatrix u = CMatrix::Identity(8, 8);
  u(3, 3) = 0.0;
  u(4, 4) = 0.0;
  u(3, 4) = 1.0;
  u(4, 3) = 1.0;
  return OperatorMatrix(std::move(u), Role::propagator);
}

OperatorMatrix ideal_pe_unitary(PeVariant variant, int spin_a, int spin_b, int n_spins) {
  if (n_spins <= 0 || n_spins > kMaxSpins) throw ValidationError("n_spins out of range");
  if (spin_a < 0 || spin_b < 0 || spin_a >= n_spins || spin_b >= n_spins)
    throw ValidationError("exchange spin index out of range");
  if (spin_a == spin_b) throw ValidationError("exchange needs two distinct spins");

  const std::size_t d = hilbert_dim(n_spins);
  const std::size_t mask_a = std::size_t{1} << (n_spins - 1 - spin_a);
  const std::size_t mask_b = std::size_t{1} << (n_spins - 1 - spin_b);
  CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t idx = 0; idx < d; ++idx) {
    const bool a = idx & mask_a;
    const bool b = idx & mask_b;
    std::size_t target = idx & ~(mask_a | mask_b);
    if (a) target |= mask_b;
    if (b) target |= mask_a;
    const double phase = (variant == PeVariant::phase_variant && a && b) ? -1.0 : 1.0;
    u(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(idx)) = phase;
  }
  return OperatorMatrix(std::move(u), Role::propagator);
}

OperatorMatrix conjugate(const OperatorMatrix& unitary, const OperatorMatrix& rho) {
  if (unitary.dim() != rho.dim()) throw ValidationError("operator dimension mismatch");
  const CMatrix& u = unitary.matrix();
  CMatrix out = u * rho.matrix() * u.adjoint();
  // Clean round-off so the result passes the state checks.
  out = 0.5 * (out + out.adjoint()).eval();
  out.diagonal().array() -= out.trace() / static_cast<double>(out.rows());
  return OperatorMatrix(std::move(out), Role::state);
}

Eigen::VectorXd z_expectations(const OperatorMatrix& rho, int n_spins) {
  if (rho.dim() != static_cast<Eigen::Index>(hilbert_dim(n_spins)))
    throw ValidationError("state dimension does not match spin count");
  Eigen::VectorXd out(n_spins);
  const Eigen::VectorXd pops = rho.matrix().diagonal().real();
  for (int i = 0; i < n_spins; ++i) {
    double s = 0.0;
    for (Eigen::Index idx = 0; idx < pops.size(); ++idx)
      s += (bit_of(static_cast<std::size_t>(idx), i, n_spins) ? -0.5 : 0.5) * pops(idx);
    out(i) = s;
  }
  return out;
}

}  // namespace pulsegate

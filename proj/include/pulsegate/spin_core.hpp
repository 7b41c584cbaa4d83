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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pulsegate/spin_ops.hpp"

namespace pulsegate {

struct Spin {
  std::string name;
  std::string channel;
  double offset_hz = 0.0;  // rotating-frame shift relative to the channel carrier
  double weight = 1.0;     // relative equilibrium polarization
  std::optional<double> t1_s;
  std::optional<double> t2star_s;
};

struct Coupling {
  std::string a;
  std::string b;
  double j_hz = 0.0;
};

struct Channel {
  std::string name;
  double max_rf_hz = 0.0;
};

/// Named spin-1/2 nuclei, their weak couplings and the RF channels driving
/// them. Validated on construction and after every mutation; list position
/// fixes the bit position of each spin (position 0 is the most significant).
class SpinSystem {
 public:
  SpinSystem(std::vector<Spin> spins, std::vector<Coupling> couplings,
             std::vector<Channel> channels);

  int size() const { return static_cast<int>(spins_.size()); }
  std::size_t dim() const { return hilbert_dim(size()); }

  const std::vector<Spin>& spins() const { return spins_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const Spin& spin(int i) const { return spins_.at(static_cast<std::size_t>(i)); }

  // Symmetric J matrix (Hz), zero diagonal.
  const Eigen::MatrixXd& j_matrix() const { return j_; }
  double coupling(int a, int b) const { return j_(a, b); }

  int index_of(std::string_view spin_name) const;  // throws on unknown name
  int channel_index(std::string_view channel_name) const;
  std::vector<int> spins_on(std::string_view channel_name) const;

  void set_offset(int spin, double offset_hz);
  void set_coupling(int a, int b, double j_hz);
  void set_weight(int spin, double weight);

 private:
  void validate() const;

  std::vector<Spin> spins_;
  std::vector<Channel> channels_;
  Eigen::MatrixXd j_;
};

enum class Role { state, hamiltonian, propagator, observable };

const char* to_string(Role role);

/// A 2^n x 2^n complex matrix tagged with what it represents. The tag is
/// checked against the matrix on construction:
///   state       -> Hermitian and traceless (deviation density matrix)
///   hamiltonian -> Hermitian (rad/s)
///   propagator  -> unitary
class OperatorMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kUnitaryTol = 1e-10;

  OperatorMatrix(CMatrix m, Role role);

  const CMatrix& matrix() const { return m_; }
  Role role() const { return role_; }
  Eigen::Index dim() const { return m_.rows(); }

  // Re-tag (and re-validate) the same matrix.
  OperatorMatrix as(Role role) const { return OperatorMatrix(m_, role); }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);

 private:
  CMatrix m_;
  Role role_;
};

OperatorMatrix single_spin_operator(Axis axis, int spin_index, int n_spins);

/// Parses sums of scaled product operators, e.g. "Iz(C1)+Iz(C2)+4*Iz(H)" or
/// "1.5*Iz(C1)+2*Iz(H)*Iz(C2)*Iz(C1)". No parentheses; a '-' before a term
/// negates it. Result carries Role::observable; use .as(Role::state) for
/// deviation states. Errors name the character offset.
OperatorMatrix parse_operator_expression(std::string_view text, const SpinSystem& system);

/// 2*pi * (sum_i nu_i Iz_i + sum_{i<j} J_ij Iz_i Iz_j), rad/s.
OperatorMatrix build_drift_hamiltonian(const SpinSystem& system);

struct ControlPair {
  OperatorMatrix hx;
  OperatorMatrix hy;
};

// Channel name -> 2*pi * sum over its spins of (Ix, Iy).
std::map<std::string, ControlPair> build_control_operators(const SpinSystem& system);

// sum_i weight_i Iz_i
OperatorMatrix thermal_deviation_state(const SpinSystem& system);

// |011> <-> |100> permutation (basis indices 3 and 4).
OperatorMatrix ideal_comp_unitary(int n_spins = 3);

enum class PeVariant { plain_swap, phase_variant };

// SWAP of spins a and b; phase_variant flips the sign of |11><11| on the pair.
OperatorMatrix ideal_pe_unitary(PeVariant variant, int spin_a, int spin_b, int n_spins);

// U rho U^dagger, tagged as a state.
OperatorMatrix conjugate(const OperatorMatrix& unitary, const OperatorMatrix& rho);

// Expectation Tr(Iz_i rho) for each spin.
Eigen::VectorXd z_expectations(const OperatorMatrix& rho, int n_spins);

}  // namespace pulsegate

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
#include <doctest.h>

#include <numbers>
#include <random>

#include "pulsegate/errors.hpp"
#include "test_support.hpp"

using namespace pulsegate;
using namespace pulsegate::testing;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index d, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

ControlPulse random_pulse(std::mt19937_64& rng, double dt, int steps, const std::vector<std::string>& ch,
                          std::vector<double> caps) {
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  Eigen::MatrixXd a(steps, 2 * static_cast<int>(ch.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return clamp(ControlPulse(dt, ch, std::move(caps), a));
}

}  // namespace

TEST_CASE("control pulse validation") {
  CHECK_THROWS_AS(ControlPulse::zeros(0.0, 10, {"X"}, {1000}), ValidationError);
  CHECK_THROWS_AS(ControlPulse::zeros(1e-6, 0, {"X"}, {1000}), ValidationError);
  CHECK_THROWS_AS(ControlPulse::zeros(1e-6, 5001, {"X"}, {1000}), ValidationError);
  CHECK_NOTHROW(ControlPulse::zeros(1e-6, 5000, {"X"}, {1000}));
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ControlPulse(1e-6, {"X"}, {1000}, bad), ValidationError);
  CHECK_THROWS_AS(ControlPulse(1e-6, {"X"}, {1000}, Eigen::MatrixXd::Zero(3, 3)), ValidationError);
  const auto p = ControlPulse::zeros(2e-6, 7, {"X", "Y"}, {1000, 500});
  CHECK(p.duration() == doctest::Approx(14e-6));
  CHECK(p.channel_index("Y") == 1);
  CHECK_THROWS_AS(p.channel_index("Z"), ValidationError);
}

TEST_CASE("expm_step examples") {
  const auto z1 = OperatorMatrix(CMatrix::Zero(4, 4), Role::hamiltonian);
  CHECK(max_abs(expm_step(z1, 0.37).matrix() - CMatrix::Identity(4, 4)) < 1e-14);

  // 2 kHz nutation for 125 us is a pi/2 rotation about x: Iz -> -Iy.
  const auto ix = single_spin_operator(Axis::x, 0, 1);
  const auto iy = single_spin_operator(Axis::y, 0, 1);
  const auto iz = single_spin_operator(Axis::z, 0, 1);
  const auto u = expm_step(OperatorMatrix(kTwoPi * 2000.0 * ix.matrix(), Role::hamiltonian), 125e-6);
  CHECK(max_abs(conjugate(u, iz.as(Role::state)).matrix() + iy.matrix()) < 1e-12);

  // A full 2 pi turn about z returns Ix and the propagator is -1.
  const auto uz = expm_step(OperatorMatrix(kTwoPi * 100.0 * iz.matrix(), Role::hamiltonian), 10e-3);
  CHECK(max_abs(uz.matrix() + CMatrix::Identity(2, 2)) < 1e-12);
  CHECK(max_abs(conjugate(uz, ix.as(Role::state)).matrix() - ix.matrix()) < 1e-12);
}

TEST_CASE("propagation examples") {
  const auto sys = tce_system();
  const auto drift = build_drift_hamiltonian(sys);
  const auto ctl = build_control_operators(sys);
  const auto rho = thermal_deviation_state(sys);
  const auto zero = ControlPulse::zeros(6e-6, 1000, {"C", "H"}, {2000, 2000});
  CHECK(max_abs(propagate(rho, zero, drift, ctl).final_state - rho.matrix()) < 1e-12);

  const SpinSystem one({{"A", "X", 0.0}}, {}, {{"X", 2000}});
  Eigen::MatrixXd amps(5, 2);
  amps.col(0).setConstant(2000.0);
  amps.col(1).setZero();
  const ControlPulse hard(25e-6, {"X"}, {2000}, amps);
  const auto out = propagate(single_spin_operator(Axis::z, 0, 1).as(Role::state), hard,
                             build_drift_hamiltonian(one), build_control_operators(one));
  CHECK(max_abs(out.final_state + single_spin_operator(Axis::y, 0, 1).matrix()) < 1e-12);

  std::mt19937_64 rng(7);
  const auto pulse = random_pulse(rng, 6e-6, 50, {"C", "H"}, {2000, 2000});
  const auto rho2 = state("Ix(C1)+Iz(H)", sys);
  const std::vector<double> off{0.0, 0.0};
  CHECK(max_abs(propagate(rho2, pulse, drift, ctl, off).final_state -
                propagate(rho2, pulse.with_amplitudes(Eigen::MatrixXd::Zero(50, 4)), drift, ctl).final_state) <
        1e-12);
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(propagate(rho2, pulse, drift, ctl, wrong), ValidationError);
}

TEST_CASE("fidelity examples") {
  const auto sys = tce_system();
  const auto x = state(kPeInitial, sys);
  CHECK(fidelity(x, x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(fidelity(state("Iz(C1)", sys), state("Ix(C1)", sys))) < 1e-15);
  const auto comp_sys = tce_system(1.0);
  const auto comp = conjugate(ideal_comp_unitary(), state(kCompInitial, comp_sys));
  CHECK(fidelity(comp, state(kCompTarget, comp_sys)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(OperatorMatrix(3.0 * x.matrix(), Role::state), OperatorMatrix(0.2 * x.matrix(), Role::state)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity(x, OperatorMatrix(-x.matrix(), Role::state)) == doctest::Approx(-1.0).epsilon(1e-14));
  const auto zero = OperatorMatrix(CMatrix::Zero(8, 8), Role::state);
  CHECK_THROWS_AS(fidelity(zero, x), NumericError);
}

TEST_CASE("propagator invariants on random Hamiltonians") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = Eigen::Index{1} << (1 + trial % 4);
    const auto h = OperatorMatrix(random_hermitian(rng, d, 5000.0), Role::hamiltonian);
    std::uniform_real_distribution<double> t(1e-6, 1e-3);
    const double t1 = t(rng), t2 = t(rng);
    const auto u1 = expm_step(h, t1), u2 = expm_step(h, t2), u12 = expm_step(h, t1 + t2);
    CHECK(unitarity_defect(u1.matrix()) <= 1e-10);
    CHECK(max_abs(u1.matrix() * u2.matrix() - u12.matrix()) <= 1e-10);
  }
}

TEST_CASE("trajectory invariants") {
  std::mt19937_64 rng(99);
  const auto sys = tce_system();
  const auto drift = build_drift_hamiltonian(sys);
  const auto ctl = build_control_operators(sys);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_pulse(rng, 6e-6, 40, {"C", "H"}, {2000, 2000});
    const auto b = random_pulse(rng, 6e-6, 25, {"C", "H"}, {2000, 2000});
    const auto rho = state(trial % 2 ? kPeInitial : "Ix(C1)+0.3*Iy(H)*Iz(C2)", sys);

    PropagateOptions keep{true, true};
    const auto tr = propagate(rho, concatenate(a, b), drift, ctl, {}, keep);
    REQUIRE(tr.states.size() == 66);
    REQUIRE(tr.propagators.size() == 65);
    const double n0 = rho.matrix().norm();
    for (const auto& s : tr.states) CHECK(std::abs(s.norm() - n0) / n0 <= 1e-10);
    for (const auto& u : tr.propagators) CHECK(unitarity_defect(u) <= 1e-10);

    const auto mid = propagate(rho, a, drift, ctl).final();
    const auto end = propagate(mid, b, drift, ctl).final_state;
    CHECK(max_abs(end - tr.final_state) / n0 <= 1e-10);
  }
}

TEST_CASE("rf scaling multiplies amplitudes") {
  std::mt19937_64 rng(3);
  const auto sys = tce_system();
  const auto drift = build_drift_hamiltonian(sys);
  const auto ctl = build_control_operators(sys);
  const auto p = random_pulse(rng, 6e-6, 30, {"C", "H"}, {2000, 2000});
  const std::vector<double> scale{0.9, 1.1};
  Eigen::MatrixXd scaled = p.amplitudes();
  scaled.leftCols(2) *= 0.9;
  scaled.rightCols(2) *= 1.1;
  const auto rho = state("Iz(C1)+Ix(H)", sys);
  CHECK(max_abs(propagate(rho, p, drift, ctl, scale).final_state -
                propagate(rho, ControlPulse(p.dt(), p.channels(), {3000, 3000}, scaled), drift, ctl).final_state) <
        1e-12);
}

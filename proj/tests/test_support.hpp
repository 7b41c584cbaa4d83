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

#include <random>
#include <string>

#include "pulsegate/grape.hpp"

namespace pulsegate::testing {

inline SpinSystem tce_system(double h_weight = 4.0) {
  return SpinSystem({{"C1", "C", 541.7, 1.0, 29.2, 0.23},
                     {"C2", "C", -541.7, 1.0, 17.3, 0.44},
                     {"H", "H", 0.0, h_weight, 2.67, 0.2}},
                    {{"H", "C2", 200.8}, {"C1", "C2", 103.1}, {"H", "C1", 9.0}},
                    {{"C", 2000.0}, {"H", 2000.0}});
}

inline OperatorMatrix state(const std::string& expr, const SpinSystem& sys) {
  return parse_operator_expression(expr, sys).as(Role::state);
}

inline const char* kPeInitial = "Iz(C1)+Iz(C2)+4*Iz(H)";
inline const char* kPeTarget = "Iz(C1)+4*Iz(C2)+Iz(H)";
inline const char* kCompInitial = "Iz(C1)+Iz(C2)+Iz(H)";
inline const char* kCompTarget = "1.5*Iz(C1)+0.5*Iz(C2)+0.5*Iz(H)+2*Iz(H)*Iz(C2)*Iz(C1)";

inline bool non_decreasing(const AscentReport& r) {
  for (std::size_t k = 1; k < r.history.size(); ++k)
    if (r.history[k] < r.history[k - 1]) return false;
  return true;
}

/// Random 2- or 3-spin system with one channel per spin group, random
/// offsets/couplings and a random traceless initial/target pair.
inline GrapeProblem random_problem(std::mt19937_64& rng, int n_spins, int steps) {
  std::uniform_real_distribution<double> offset(-800.0, 800.0), j(-150.0, 150.0), w(0.2, 2.0);
  std::vector<Spin> spins;
  for (int i = 0; i < n_spins; ++i)
    spins.push_back({"S" + std::to_string(i), i == n_spins - 1 ? "B" : "A", offset(rng), w(rng), {}, {}});
  std::vector<Coupling> couplings;
  for (int a = 0; a < n_spins; ++a)
    for (int b = a + 1; b < n_spins; ++b) couplings.push_back({spins[a].name, spins[b].name, j(rng)});
  SpinSystem sys(spins, couplings, {{"A", 1500.0}, {"B", 1500.0}});

  auto random_state = [&] {
    OperatorMatrix out = single_spin_operator(Axis::z, 0, n_spins);
    std::normal_distribution<double> g;
    CMatrix m = CMatrix::Zero(out.dim(), out.dim());
    for (int i = 0; i < n_spins; ++i)
      for (Axis ax : {Axis::x, Axis::y, Axis::z}) m += g(rng) * single_spin_operator(ax, i, n_spins).matrix();
    return OperatorMatrix(m, Role::state);
  };
  std::uniform_real_distribution<double> dur(0.5e-3, 3e-3);
  return GrapeProblem(sys, random_state(), random_state(), dur(rng), steps);
}

}  // namespace pulsegate::testing

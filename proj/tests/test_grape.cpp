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

#include <limits>
#include <random>

#include "pulsegate/errors.hpp"
#include "test_support.hpp"

using namespace pulsegate;
using namespace pulsegate::testing;

namespace {

// Largest per-component relative error between the adjoint gradient and a
// central difference with step h (Hz). Components far below the gradient's
// scale are compared against that scale instead of their own size, and the
// difference quotient's own rounding noise (~eps/h) is discounted.
double worst_fd_error(const GrapeProblem& p, const ControlPulse& pulse, double h = 1e-3) {
  const Eigen::MatrixXd g = gradient(p, pulse);
  Eigen::MatrixXd fd(g.rows(), g.cols());
  for (Eigen::Index j = 0; j < g.rows(); ++j)
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      Eigen::MatrixXd a = pulse.amplitudes();
      a(j, c) += h;
      const double fp = evaluate(p, pulse.with_amplitudes(a)).weighted;
      a(j, c) -= 2 * h;
      const double fm = evaluate(p, pulse.with_amplitudes(a)).weighted;
      fd(j, c) = (fp - fm) / (2 * h);
    }
  const double floor = 1e-3 * fd.cwiseAbs().maxCoeff();
  const double rounding = 16.0 * std::numeric_limits<double>::epsilon() / h;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < fd.size(); ++k) {
    const double err = std::max(0.0, std::abs(g.data()[k] - fd.data()[k]) - rounding);
    worst = std::max(worst, err / std::max(std::abs(fd.data()[k]), floor));
  }
  return worst;
}

GrapeProblem small_pe(int steps = 60) {
  const auto sys = tce_system();
  return GrapeProblem(sys, state(kPeInitial, sys), state(kPeTarget, sys), 6e-3, steps);
}

}  // namespace

TEST_CASE("ensemble construction") {
  CHECK(nominal_ensemble(2).size() == 1);
  const auto e = rf_scale_ensemble(2, {0.95, 1.0, 1.05});
  REQUIRE(e.size() == 3);
  CHECK(e[2].rf_scale == std::vector<double>{1.05, 1.05});
  double w = 0.0;
  for (const auto& m : e) w += m.weight;
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));

  const auto sys = tce_system();
  const auto rho = state(kPeInitial, sys);
  CHECK_THROWS_AS(GrapeProblem(sys, rho, rho, 6e-3, 10, {{{1.0, 1.0}, {}, 0.5}}), ValidationError);
  CHECK_THROWS_AS(GrapeProblem(sys, rho, rho, 6e-3, 10, {{{1.0}, {}, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GrapeProblem(sys, rho, rho, 6e-3, 0), ValidationError);
  CHECK_THROWS_AS(GrapeProblem(sys, rho, rho, -1.0, 10), ValidationError);
}

TEST_CASE("clamp examples and projection property") {
  Eigen::MatrixXd a(3, 2);
  a << 3000, 0, 0, 0, 3000, 4000;
  const auto c = clamp(ControlPulse(1e-6, {"X"}, {2000}, a));
  CHECK(c.ux(0, 0) == doctest::Approx(2000));
  CHECK(c.uy(0, 0) == 0.0);
  CHECK(c.ux(1, 0) == 0.0);
  CHECK(c.uy(1, 0) == 0.0);
  CHECK(c.ux(2, 0) == doctest::Approx(1200));
  CHECK(c.uy(2, 0) == doctest::Approx(1600));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 3000.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd r(20, 4);
    for (Eigen::Index k = 0; k < r.size(); ++k) r.data()[k] = g(rng);
    const ControlPulse p(1e-6, {"A", "B"}, {2000, 1500}, r);
    const auto once = clamp(p);
    CHECK(once.peak_cap_ratio() <= 1.0 + 1e-14);
    CHECK(clamp(once).amplitudes() == once.amplitudes());
  }
}

TEST_CASE("random initial pulses") {
  const auto p = small_pe(200);
  const auto a = init_random_pulse(p, 11);
  CHECK(a.amplitudes() == init_random_pulse(p, 11).amplitudes());
  CHECK(a.peak_cap_ratio() <= 0.2 + 1e-12);
  CHECK(init_random_pulse(p, 11, 1.0).peak_cap_ratio() <= 1.0 + 1e-12);
  CHECK(a.dt() == doctest::Approx(p.dt()));
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    differing += init_random_pulse(p, 2 * s).amplitudes() != init_random_pulse(p, 2 * s + 1).amplitudes();
  CHECK(differing == 100);
  CHECK_THROWS_AS(init_random_pulse(p, 1, 0.0), ValidationError);
  CHECK_THROWS_AS(init_random_pulse(p, 1, 1.5), ValidationError);
}

TEST_CASE("gradient matches finite differences on random problems") {
  std::mt19937_64 rng(20260);
  std::uniform_int_distribution<int> steps(10, 100);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const auto p = random_problem(rng, n, steps(rng));
    const auto pulse = init_random_pulse(p, 100 + trial, 1.0);
    CAPTURE(trial);
    CHECK(worst_fd_error(p, pulse) <= 1e-5);
  }
}

TEST_CASE("gradient on a random 50-step single-channel two-spin problem") {
  const SpinSystem sys({{"A", "X", 310.0}, {"B", "X", -120.0}}, {{"A", "B", 45.0}}, {{"X", 1000.0}});
  const auto p = GrapeProblem(sys, state("Iz(A)", sys), state("Iz(B)", sys), 2e-3, 50);
  CHECK(worst_fd_error(p, init_random_pulse(p, 3, 1.0)) <= 1e-5);
}

TEST_CASE("gradient with an ensemble and carrier shifts") {
  const auto base = small_pe(30);
  const std::vector<EnsembleMember> members = {{{0.95, 1.0}, {0.0, 20.0}, 0.25},
                                               {{1.0, 1.0}, {}, 0.5},
                                               {{1.05, 0.97}, {-20.0, 0.0}, 0.25}};
  const auto p = base.with_ensemble(members);
  const auto pulse = init_random_pulse(p, 4, 1.0);
  CHECK(worst_fd_error(p, pulse) <= 1e-5);
  const auto r = fidelity_gradient(p, pulse);
  CHECK(r.fidelity.members.size() == 3);
  CHECK(r.fidelity.weighted ==
        doctest::Approx(0.25 * r.fidelity.members[0] + 0.5 * r.fidelity.members[1] + 0.25 * r.fidelity.members[2]));
  CHECK(r.fidelity.weighted == evaluate(p, pulse).weighted);
}

TEST_CASE("gradient vanishes at a perfect transfer") {
  const auto base = small_pe(40);
  const auto pulse = init_random_pulse(base, 9, 1.0);
  const auto reached = propagate(base.rho0(), pulse, base.drift(), base.controls()).final();
  const GrapeProblem p(base.system(), base.rho0(), reached, base.duration(), base.steps());
  const auto r = fidelity_gradient(p, pulse);
  CHECK(r.fidelity.weighted == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.gradient.cwiseAbs().maxCoeff() <= 1e-8);

  const auto ar = ascend(p, pulse, AscentOptions{});
  CHECK(ar.report.termination == Termination::target_reached);
  CHECK(ar.report.iterations == 0);
  CHECK(ar.pulse.amplitudes() == pulse.amplitudes());
}

TEST_CASE("single-member ensemble equals the nominal gradient") {
  const auto p = small_pe(25);
  const auto pulse = init_random_pulse(p, 2, 1.0);
  const auto one = p.with_ensemble(rf_scale_ensemble(2, {1.0}));
  CHECK((gradient(p, pulse) - gradient(one, pulse)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("ascent is monotonic and respects the cap") {
  const auto p = small_pe(100).with_ensemble(rf_scale_ensemble(2, {0.95, 1.0, 1.05}));
  AscentOptions o;
  o.max_iters = 60;
  const auto r = ascend(p, init_random_pulse(p, 1, 1.0), o, 1);
  CHECK(non_decreasing(r.report));
  for (std::size_t k = 1; k < r.report.history.size(); ++k) CHECK(r.report.history[k] > r.report.history[k - 1]);
  CHECK(r.report.history.size() == static_cast<std::size_t>(r.report.iterations) + 1);
  CHECK(r.report.final_fidelity() > r.report.history.front());
  CHECK(r.pulse.peak_cap_ratio() <= 1.0 + 1e-12);
  CHECK(r.report.member_fidelity.size() == 3);
  CHECK(r.report.final_fidelity() == evaluate(p, r.pulse).weighted);
  CHECK(r.report.seed == 1);
}

TEST_CASE("ascent is deterministic") {
  const auto p = small_pe(50);
  AscentOptions o;
  o.max_iters = 20;
  const auto a = ascend(p, init_random_pulse(p, 3, 1.0), o);
  const auto b = ascend(p, init_random_pulse(p, 3, 1.0), o);
  CHECK(a.report.history == b.report.history);
  CHECK(a.pulse.amplitudes() == b.pulse.amplitudes());
}

TEST_CASE("ascent options are validated") {
  const auto p = small_pe(10);
  const auto pulse = init_random_pulse(p, 1);
  AscentOptions o;
  o.backtrack_factor = 1.0;
  CHECK_THROWS_AS(ascend(p, pulse, o), ValidationError);
  o = {};
  o.initial_step = 0.0;
  CHECK_THROWS_AS(ascend(p, pulse, o), ValidationError);
  CHECK_THROWS_AS(ascend(small_pe(11), pulse, AscentOptions{}), ValidationError);
}

TEST_CASE("design keeps the best worst-case seed") {
  const auto p = small_pe(80).with_ensemble(rf_scale_ensemble(2, {0.95, 1.0, 1.05}));
  DesignOptions o;
  o.nominal.max_iters = 25;
  o.robust.max_iters = 10;
  const auto d = design(p, o, {1, 2, 3});
  REQUIRE(d.outcomes.size() == 3);
  for (const auto& out : d.outcomes) {
    CHECK(d.outcomes[d.best].fidelity.worst() >= out.fidelity.worst());
    CHECK(non_decreasing(out.nominal));
    CHECK(non_decreasing(out.robust));
  }
  CHECK(d.pulse.peak_cap_ratio() <= 1.0 + 1e-12);
  CHECK(evaluate(p, d.pulse).worst() == d.outcomes[d.best].fidelity.worst());

  // One seed is the nominal ascent followed by the robust ascent.
  const auto single = design(p, o, {2});
  const auto phase1 = ascend(p.nominal_only(), init_random_pulse(p, 2, o.init_amplitude_fraction), o.nominal, 2);
  const auto phase2 = ascend(p, phase1.pulse, o.robust, 2);
  CHECK(single.pulse.amplitudes() == phase2.pulse.amplitudes());
  CHECK(single.outcomes[0].robust.history == phase2.report.history);
  CHECK(single.outcomes[0].fidelity.worst() == d.outcomes[1].fidelity.worst());

  CHECK_THROWS_AS(design(p, o, {}), ValidationError);
}

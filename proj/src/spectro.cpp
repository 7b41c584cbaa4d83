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
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "pulsegate/errors.hpp"
#include "pulsegate/spectro.hpp"

namespace pulsegate {

namespace {

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Centred DFT of `samples` zero-filled to `length`.
Spectrum centred_dft(const Eigen::VectorXcd& samples, double dwell, Eigen::Index length) {
  std::vector<cx> in(static_cast<std::size_t>(length), cx(0.0, 0.0));
  std::copy(samples.data(), samples.data() + samples.size(), in.begin());
  std::vector<cx> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);

  Spectrum spec;
  spec.frequencies.resize(length);
  spec.values.resize(length);
  const double df = 1.0 / (static_cast<double>(length) * dwell);
  const Eigen::Index half = length / 2;
  for (Eigen::Index k = 0; k < length; ++k) {
    const Eigen::Index src = (k + half) % length;  // fftshift
    spec.frequencies(k) = static_cast<double>(k - half) * df;
    spec.values(k) = out[static_cast<std::size_t>(src)];
  }
  return spec;
}

}  // namespace

OperatorMatrix readout_90(const OperatorMatrix& rho, const SpinSystem& system,
                          std::string_view channel, double phase_rad) {
  const auto spins = system.spins_on(channel);
  const int n = system.size();
  const auto d = static_cast<Eigen::Index>(system.dim());
  if (rho.dim() != d) throw ValidationError("state dimension does not match the spin system");
  CMatrix generator = CMatrix::Zero(d, d);
  for (int i : spins)
    generator += std::cos(phase_rad) * embed_spin_operator(Axis::x, i, n) +
                 std::sin(phase_rad) * embed_spin_operator(Axis::y, i, n);
  const OperatorMatrix u =
      expm_step(OperatorMatrix(std::move(generator), Role::hamiltonian), 0.5 * std::numbers::pi);
  return conjugate(u, rho);
}

FidRecord acquire(const OperatorMatrix& rho, const SpinSystem& system, std::string_view channel,
                  double dwell_s, int points) {
  if (!(dwell_s > 0.0)) throw ValidationError("dwell must be > 0");
  if (points < 2) throw ValidationError("acquisition needs at least 2 points");
  const auto spins = system.spins_on(channel);
  if (spins.empty()) throw ValidationError("channel '" + std::string(channel) + "' has no spins");

  const int n = system.size();
  // Tr(A rho) = sum(A^T o rho); keep the transposed raising operators.
  std::vector<CMatrix> raise_t;
  std::vector<double> decay_rate;
  for (int i : spins) {
    raise_t.push_back((embed_spin_operator(Axis::x, i, n) +
                       cx(0.0, 1.0) * embed_spin_operator(Axis::y, i, n))
                          .transpose());
    const auto& t2 = system.spin(i).t2star_s;
    decay_rate.push_back(t2 ? 1.0 / *t2 : 0.0);
  }

  const CMatrix u = expm_step(build_drift_hamiltonian(system), dwell_s).matrix();
  FidRecord fid{dwell_s, std::string(channel), Eigen::VectorXcd(points)};
  CMatrix current = rho.matrix();
  for (int k = 0; k < points; ++k) {
    const double t = k * dwell_s;
    cx s(0.0, 0.0);
    for (std::size_t m = 0; m < raise_t.size(); ++m)
      s += raise_t[m].cwiseProduct(current).sum() * std::exp(-t * decay_rate[m]);
    fid.samples(k) = s;
    current = (u * current * u.adjoint()).eval();
  }
  if (!fid.samples.allFinite()) throw NumericError("FID has non-finite samples");
  return fid;
}

Spectrum to_spectrum(const FidRecord& fid, TransformOptions options) {
  if (fid.points() < 2) throw ValidationError("FID needs at least 2 points");
  if (options.zero_fill < 1) throw ValidationError("zero_fill must be >= 1");
  Eigen::VectorXcd samples = fid.samples;
  samples(0) *= options.first_point_scale;
  return centred_dft(samples, fid.dwell, next_pow2(fid.points()) * options.zero_fill);
}

std::vector<LineWindow> default_windows(const SpinSystem& system, std::string_view channel,
                                        double margin_linewidths) {
  std::vector<LineWindow> out;
  for (int i : system.spins_on(channel)) {
    const auto& spin = system.spin(i);
    const double linewidth = spin.t2star_s ? 1.0 / (std::numbers::pi * *spin.t2star_s) : 1.0;
    const double half = 0.5 * system.j_matrix().row(i).cwiseAbs().sum() + margin_linewidths * linewidth;
    out.push_back({spin.name, spin.offset_hz - half, spin.offset_hz + half});
  }
  return out;
}

void check_windows(const Spectrum& spectrum, const std::vector<LineWindow>& windows) {
  const double lo = spectrum.frequencies(0);
  const double hi = spectrum.frequencies(spectrum.frequencies.size() - 1);
  for (std::size_t a = 0; a < windows.size(); ++a) {
    const auto& w = windows[a];
    if (!(w.f_lo < w.f_hi)) throw ValidationError("window '" + w.label + "' is empty");
    if (w.f_lo < lo || w.f_hi > hi)
      throw ValidationError("window '" + w.label + "' leaves the spectral range");
    for (std::size_t b = a + 1; b < windows.size(); ++b) {
      const auto& v = windows[b];
      if (w.f_lo < v.f_hi && v.f_lo < w.f_hi)
        throw ValidationError("windows '" + w.label + "' and '" + v.label + "' overlap");
    }
  }
}

std::map<std::string, double> line_integrals(const Spectrum& spectrum,
                                             const std::vector<LineWindow>& windows) {
  check_windows(spectrum, windows);
  std::map<std::string, double> out;
  const double df = spectrum.bin_width();
  for (const auto& w : windows) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < spectrum.frequencies.size(); ++k) {
      const double f = spectrum.frequencies(k);
      if (f >= w.f_lo && f <= w.f_hi) sum += spectrum.values(k).real();
    }
    out[w.label] = sum * df;
  }
  return out;
}

std::map<std::string, double> integrate_lines(const Spectrum& spectrum, const Spectrum& reference,
                                              const std::vector<LineWindow>& windows) {
  if (spectrum.frequencies.size() != reference.frequencies.size())
    throw ValidationError("spectrum and reference have different axes");
  const auto measured = line_integrals(spectrum, windows);
  const auto ref = line_integrals(reference, windows);
  std::map<std::string, double> out;
  for (const auto& [label, value] : measured) {
    const double r = ref.at(label);
    if (r == 0.0) throw NumericError("reference integral of '" + label + "' is zero");
    out[label] = value / r;
  }
  return out;
}

Spectrum pulse_spectrum(const ControlPulse& pulse, std::string_view channel, Axis component) {
  if (component == Axis::z) throw ValidationError("pulse components are x or y");
  const int c = pulse.channel_index(channel);
  const int col = 2 * c + (component == Axis::y ? 1 : 0);
  const Eigen::VectorXcd samples = pulse.amplitudes().col(col).cast<cx>();
  return centred_dft(samples, pulse.dt(), next_pow2(pulse.steps()));
}

Measurement measure(const OperatorMatrix& rho, const SpinSystem& system,
                    const AcquisitionConfig& acq) {
  const std::string channel = acq.channel.empty() ? system.channels().front().name : acq.channel;
  const double phase = acq.readout_phase_deg * std::numbers::pi / 180.0;
  const TransformOptions transform{acq.zero_fill};

  auto run = [&](const OperatorMatrix& state) {
    FidRecord fid = acquire(readout_90(state, system, channel, phase), system, channel, acq.dwell_s,
                            acq.points);
    Spectrum spec = to_spectrum(fid, transform);
    return std::pair{std::move(fid), std::move(spec)};
  };

  auto [fid, spectrum] = run(rho);
  const auto reference = run(thermal_deviation_state(system)).second;
  spectrum.windows = acq.windows.empty()
                         ? default_windows(system, channel, acq.window_margin_linewidths)
                         : acq.windows;
  auto polarization = integrate_lines(spectrum, reference, spectrum.windows);
  return {std::move(fid), std::move(spectrum), std::move(polarization)};
}

}  // namespace pulsegate

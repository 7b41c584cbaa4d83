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

// Dense spin-1/2 operator algebra. Everything here is templated on the real
// scalar so the same builders work for float/double/long double matrices.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace pulsegate {

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cx = std::complex<double>;
using CMatrix = CMat<double>;

enum class Axis { x, y, z };

constexpr int kMaxSpins = 10;

inline constexpr std::size_t hilbert_dim(int n_spins) {
  return std::size_t{1} << n_spins;
}

// 1/2 * Pauli matrix for one spin.
template <typename Real = double>
CMat<Real> half_pauli(Axis axis) {
  using C = std::complex<Real>;
  const Real h = Real(0.5);
  CMat<Real> m = CMat<Real>::Zero(2, 2);
  switch (axis) {
    case Axis::x:
      m(0, 1) = C(h, 0);
      m(1, 0) = C(h, 0);
      break;
    case Axis::y:
      m(0, 1) = C(0, -h);
      m(1, 0) = C(0, h);
      break;
    case Axis::z:
      m(0, 0) = C(h, 0);
      m(1, 1) = C(-h, 0);
      break;
  }
  return m;
}

template <typename Derived1, typename Derived2>
auto kron(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  using Scalar = typename Derived1::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// I_axis on spin `index` of an n-spin register. Spin 0 is the most
// significant bit of the basis index; bit value 0 is spin-up.
// No range checks: callers go through single_spin_operator().
template <typename Real = double>
CMat<Real> embed_spin_operator(Axis axis, int index, int n_spins) {
  CMat<Real> out = CMat<Real>::Identity(1, 1);
  for (int k = 0; k < n_spins; ++k) {
    if (k == index)
      out = kron(out, half_pauli<Real>(axis));
    else
      out = kron(out, CMat<Real>::Identity(2, 2));
  }
  return out;
}

template <typename Derived1, typename Derived2>
auto commutator(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  return (a * b - b * a).eval();
}

// Max absolute element of M - M^dagger.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace pulsegate

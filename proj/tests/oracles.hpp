#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// production code paths they check.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sense/freefermion.hpp"
#include "sense/model.hpp"

namespace oracles {

using complex = std::complex<double>;

// --- SU(2) helpers (local, independent of sense::freefermion::rotation) ---
inline Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, complex(0, -1), complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& A) {
  // exp(A) via scaling-and-squaring on the 2x2 Taylor series
  int s = 0;
  double nrm = A.norm();
  while (nrm > 0.25) {
    nrm /= 2;
    ++s;
  }
  Eigen::Matrix2cd X = A / std::pow(2.0, s);
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity(), term = Eigen::Matrix2cd::Identity();
  for (int k = 1; k < 24; ++k) {
    term = term * X / double(k);
    out += term;
  }
  for (int i = 0; i < s; ++i) out = out * out;
  return out;
}

// one-period mode propagator with the delta kick resolved as a narrow square
// pulse of width tau/slices (a genuinely different construction)
inline Eigen::Matrix2cd sliced_delta_propagator(const sense::ValidatedParams& p, double k,
                                                int slices) {
  const auto& mp = p.get();
  const Eigen::Vector3d field(0.0, -2.0 * mp.J * std::sin(k),
                              -2.0 * (mp.h0 - mp.J * std::cos(k)));
  const double w = mp.tau / slices;
  const double amp = mp.h1 / w;  // kick area preserved
  const Eigen::Vector3d pulse_field = field + Eigen::Vector3d(0.0, 0.0, -2.0 * amp);
  const complex mi(0, -1);
  Eigen::Matrix2cd Hfree = field.x() * pauli(0) + field.y() * pauli(1) + field.z() * pauli(2);
  Eigen::Matrix2cd Hpulse =
      pulse_field.x() * pauli(0) + pulse_field.y() * pauli(1) + pulse_field.z() * pauli(2);
  return expm2(mi * w * Hpulse) * expm2(mi * (mp.tau - w) * Hfree);
}

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
inline double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd sq =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(
      Eigen::MatrixXcd(sq * sigma * sq));
  double tr = 0.0;
  for (long i = 0; i < es2.eigenvalues().size(); ++i)
    tr += std::sqrt(std::max(0.0, es2.eigenvalues()[i]));
  return tr * tr;
}

// QFI estimate from state overlap decay, F ~ 8 (1 - sqrt(F(rho(h), rho(h+d)))) / d^2
inline double fidelity_qfi(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& rho_d,
                           double d) {
  return 8.0 * (1.0 - std::sqrt(fidelity(rho, rho_d))) / (d * d);
}

// dense Majorana matrices on L sites (bit j = site j, set = fermion present)
inline Eigen::MatrixXcd majorana(int L, int idx) {
  const int site = idx / 2;
  const bool ytype = idx % 2;
  const long dim = 1L << L;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  for (long b = 0; b < dim; ++b) {
    int str = 1;
    for (int j = 0; j < site; ++j)
      if ((b >> j) & 1) str = -str;
    const bool down = (b >> site) & 1;
    complex amp(str, 0);
    if (ytype) amp *= down ? complex(0, -1) : complex(0, 1);
    A(b ^ (1L << site), b) = amp;
  }
  return A;
}

}  // namespace oracles

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "sense/model.hpp"

namespace sense::freefermion {

using complex = std::complex<double>;

// Jordan-Wigner reduction of the chain, spin-up = fermion vacuum. Each
// quasi-momentum k > 0 carries an independent two-level problem in the basis
// {|0>, c+_k c+_{-k}|0>}. The static chain restricted to one such pair is
//   h_k = field(k) . sigma,    field(k) = -2 (0, J sin k, h0 - J cos k),
// and one delta kick of strength h1 acts as exp(+2i h1 sz) on the pair
// (sum_j sz_j restricts to 2 sz on a pair block).
struct ModeHamiltonian {
  double k = 0.0;
  Eigen::Vector3d field = Eigen::Vector3d::Zero();
};

ModeHamiltonian static_mode(const ValidatedParams& p, double k);

/// exp(-i t v.sigma) in closed form.
Eigen::Matrix2cd rotation(const Eigen::Vector3d& v, double t);

/// One-period propagator of mode k.
/// DeltaKick:   U = exp(+2i h1 sz) * exp(-i field.sigma tau)
/// SquarePulse: U = exp(-i (field - 2 h1 z).sigma w) * exp(-i field.sigma (tau-w))
Eigen::Matrix2cd period_propagator(const ValidatedParams& p, double k);

/// State of one k-pair: pure amplitudes (u, v) with |u|^2+|v|^2 = 1, or a 2x2
/// density matrix for thermal preparations.
struct ModeState {
  Eigen::Vector2cd amp{1.0, 0.0};
  Eigen::Matrix2cd rho;
  bool thermal = false;

  double occupation() const;   // <c+_k c_k> in {0..1}
  complex pair_amp() const;    // <c+_k c+_{-k}> = u conj(v) for pure states
  double sz() const;           // |u|^2 - |v|^2
};

std::vector<ModeState> initial_modes(const ValidatedParams& p, const InitialState& s);

/// One-period propagator diagonalized: quasi-energy in [0, pi/tau], rotation
/// axis of the Floquet Hamiltonian, its eigenvectors and the overlaps with the
/// initial mode state. Modes where U is proportional to the identity have no
/// well-defined axis and are flagged degenerate.
struct FloquetMode {
  double k = 0.0;
  Eigen::Matrix2cd U;
  double quasi_energy = 0.0;         // |mu^F| in [0, pi/tau]
  Eigen::Vector3d axis{0, 0, 1};     // n^F, arbitrary (z) when degenerate
  bool degenerate = false;
  Eigen::Vector2cd plus, minus;      // U|+/-> = exp(-/+ i quasi_energy tau)|+/->
  complex r_plus{0, 0}, r_minus{0, 0};  // <psi0_k | +/->
};

FloquetMode floquet_mode(const ValidatedParams& p, double k, const ModeState& initial);

/// Precomputed per-mode eigensystems; stroboscopic states at any period count
/// in O(N) without repeated matrix powers.
class StroboscopicEvolution {
 public:
  StroboscopicEvolution(const ValidatedParams& p, const InitialState& s);
  std::vector<ModeState> at(long n) const;
  const std::vector<double>& ks() const { return ks_; }

 private:
  std::vector<double> ks_;
  bool thermal_ = false;
  // pure: amp(n) = sum_b exp(i theta_b n) <e_b|psi0> e_b
  std::vector<Eigen::Vector2cd> e0_, e1_;
  std::vector<Eigen::Vector2d> theta_;
  std::vector<Eigen::Vector2cd> coef_;
  // thermal: rho(n) = V diag(e^{i theta n}) R diag(e^{-i theta n}) V^+,  R = V^+ rho0 V
  std::vector<Eigen::Matrix2cd> V_, R_;
};

std::vector<ModeState> evolve_modes(const ValidatedParams& p, const InitialState& s, long n);

/// Two-point functions of an L-site block, C_ij = <c+_i c_j>, I_ij = <c+_i c+_j>.
struct CorrelationData {
  Eigen::MatrixXcd C, I;
  std::string label;
};

CorrelationData correlators_at(const ValidatedParams& p, const std::vector<ModeState>& modes,
                               int L);

/// Diagonal-ensemble (dephased, n -> infinity) correlators; requires a pure
/// initial state. Degenerate modes never dephase and contribute their initial
/// expectation values.
CorrelationData steady_correlators(const ValidatedParams& p, const InitialState& s, int L);

/// m_z = (1/N) sum_j <sz_j>; PolarizedUp gives exactly 1.
double magnetization(const ValidatedParams& p, const std::vector<ModeState>& modes);

struct GapResult {
  double gap = 0.0;   // min_k 2 |mu^F_k|
  double k_min = 0.0;
};

GapResult floquet_gap(const ValidatedParams& p);

/// For each h0: the analytic zero-gap drive amplitude h1* = tau |h0 - J| and
/// the numerically minimizing h1 of floquet_gap (coarse scan + golden section).
struct GapLinePoint {
  double h0 = 0.0;
  double h1_analytic = 0.0;
  double h1_numeric = 0.0;
  double gap_at_numeric = 0.0;
};

std::vector<GapLinePoint> gap_line(const ModelParams& base, const std::vector<double>& h0s,
                                   double h1_max = 0.0);

}  // namespace sense::freefermion

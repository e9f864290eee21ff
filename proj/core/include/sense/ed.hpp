#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <memory>
#include <vector>

#include "sense/freefermion.hpp"
#include "sense/model.hpp"

namespace sense::ed {

using complex = std::complex<double>;
using RowMatrixXcd = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kAlphaInf = std::numeric_limits<double>::infinity();

/// Long-range kicked chain, H_a(t) = -sum_{i<j} J/r_ij^a sx_i sx_j - (h0+h(t)) sum_i sz_i.
/// alpha = inf keeps nearest-neighbor bonds only. periodic switches both the
/// wrap bond (alpha = inf) and the ring distance min(|i-j|, N-|i-j|).
struct EDParams {
  int N = 8;
  double alpha = kAlphaInf;
  double J = 1.0;
  double h0 = 0.0;
  double h1 = 0.0;
  double tau = 0.2;
  PulseShape pulse = PulseShape::delta_kick();
  bool periodic = false;
};

void validate_ed(const EDParams& p);

/// Computational basis: bit j of the index is site j, bit set = spin down
/// (= Jordan-Wigner fermion present), so |0...0> is the all-up state.
Eigen::MatrixXd build_hamiltonian(const EDParams& p, double field);

/// Matrix-free sx sx + z-field Hamiltonian for large N.
class SparseSpinH {
 public:
  SparseSpinH(const EDParams& p, double field);
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  void apply_block(const RowMatrixXcd& x, RowMatrixXcd& y) const;
  double norm_bound() const { return bound_; }
  int N() const { return N_; }

 private:
  int N_ = 0;
  std::vector<std::pair<long, double>> bonds_;  // (flip mask, coupling)
  std::vector<double> diag_;
  double bound_ = 0.0;
};

/// exp(-i t H) |psi> by a Chebyshev expansion of the matrix exponential;
/// coefficients are Bessel functions of the scaled time, truncated below 1e-15.
class ChebyshevExp {
 public:
  ChebyshevExp(const SparseSpinH& H, double t);
  void apply(Eigen::VectorXcd& psi) const;
  void apply_block(RowMatrixXcd& cols) const;
  int terms() const { return static_cast<int>(coef_.size()); }

 private:
  const SparseSpinH* H_;
  double scale_ = 1.0;
  std::vector<complex> coef_;
};

struct EDState {
  Eigen::VectorXcd psi;
  Eigen::MatrixXcd rho;
  bool thermal = false;
};

EDState polarized_up(int N);
EDState thermal_of_h0(const EDParams& p, double beta);

/// Dense one-period propagator (kick applied after the free segment, pulse
/// applied in the last w of the period). Intended for N <= 12.
Eigen::MatrixXcd period_propagator_ed(const EDParams& p);

/// One period of the kicked evolution, matrix-free; supports batches of state
/// columns evolving under a common static chain but per-column kick strengths.
class KickedEvolver {
 public:
  explicit KickedEvolver(const EDParams& p);
  void step(Eigen::VectorXcd& psi) const;
  void step_block(RowMatrixXcd& cols, const std::vector<double>& h1_per_col) const;

 private:
  EDParams p_;
  SparseSpinH h0_;
  ChebyshevExp free_seg_;
  // delta kick phases exp(+i h1 (N - 2 popcount)) are formed on the fly
  std::vector<int> popcount_;
  // square pulse: h1-dependent pulse Hamiltonian, cached for the fixed h1
  std::unique_ptr<SparseSpinH> pulse_h_;
  std::unique_ptr<ChebyshevExp> pulse_seg_;
};

EDState evolve_ed(const EDParams& p, const EDState& initial, long n);

/// Reduced density matrix of L contiguous sites starting at `first`.
Eigen::MatrixXcd partial_trace(const EDState& s, int N, int first, int L);

double magnetization_ed(const EDState& s, int N);

/// Jordan-Wigner two-point functions of the leading L sites, the exact oracle
/// for the free-fermion engine (pure states only).
freefermion::CorrelationData correlators_ed(const EDState& s, int N, int L);

}  // namespace sense::ed

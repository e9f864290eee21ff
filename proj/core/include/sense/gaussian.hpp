#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "sense/freefermion.hpp"
#include "sense/model.hpp"

namespace sense::gaussian {

using complex = std::complex<double>;

/// Majorana two-point matrix Gamma_ij = Tr(rho a_i a_j), a_{2i-1} = c_i + c+_i,
/// a_{2i} = i(c+_i - c_i). Gamma = 1 + iM with M real antisymmetric; Hermitian,
/// eigenvalues in [0, 2].
struct MajoranaCovariance {
  Eigen::MatrixXcd gamma;
  int L = 0;
  double h1_tag = 0.0;
};

MajoranaCovariance gamma_from_correlators(const freefermion::CorrelationData& corr,
                                          double h1_tag = 0.0);

struct NonPhysicalGamma : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QfiResult {
  double value = 0.0;
  int skipped_pairs = 0;
  bool singular = false;  // skipped pairs carried non-negligible weight
};

/// QFI of a Gaussian state from Gamma and its parameter derivative:
///   F_Q = 1/2 sum_{rs} |<r|dGamma|s>|^2 / (1 - g_r g_s),
/// in the eigenbasis of Gamma - 1 (eigenvalues g in [-1, 1]); pairs with
/// |1 - g_r g_s| < 1e-8 are excluded (singular-state pairs g_r = g_s = +-1).
QfiResult qfi_from_gamma(const MajoranaCovariance& g, const Eigen::MatrixXcd& dgamma);

/// Evaluation context: stroboscopic time n, or the dephased steady state.
struct QfiContext {
  InitialState initial = InitialState::polarized_up();
  std::optional<long> n;  // nullopt = steady state
};

/// Central finite difference dGamma/dh1 with step dh1 around the run's h1.
QfiResult qfi_gaussian(const ValidatedParams& p, int L, const QfiContext& ctx,
                       double dh1 = 1e-3);

/// Explicit 2^L density matrix (basis: bit j of the index = site j, set = down).
struct BlockState {
  Eigen::MatrixXcd rho;
  int L = 0;
};

/// Reconstructs rho_L = prod_j (1 - i nu_j atilde_{2j-1} atilde_{2j}) / 2 from
/// the canonical (real Schur) form of M; throws NonPhysicalGamma when some
/// |nu_j| > 1 + 1e-8. Intended for L <= 12.
BlockState block_state_from_gamma(const MajoranaCovariance& g);

/// Probabilities of total block magnetization L, L-2, ..., -L (L+1 outcomes).
std::vector<double> block_magnetization_distribution(const BlockState& s);

/// Two-site density matrix from Wick contractions of (C, I); X-shaped, equals
/// block_state_from_gamma at L = 2.
BlockState two_site_density_matrix(const freefermion::CorrelationData& corr);

/// Symmetric logarithmic derivative of a block state, d rho = (L rho + rho L)/2,
/// solved in the eigenbasis of rho, with its own eigensystem (optimal POVM).
struct SldResult {
  Eigen::MatrixXcd sld;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // columns
  bool degenerate = false;        // a required pair had lambda_r + lambda_s < 1e-12
};

SldResult sld_two_site(const BlockState& state, const Eigen::MatrixXcd& dstate);

}  // namespace sense::gaussian

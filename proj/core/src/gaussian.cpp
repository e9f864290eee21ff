#include "sense/gaussian.hpp"

#include <bit>
#include <cmath>

namespace sense::gaussian {

MajoranaCovariance gamma_from_correlators(const freefermion::CorrelationData& corr,
                                          double h1_tag) {
  const int L = static_cast<int>(corr.C.rows());
  MajoranaCovariance g;
  g.L = L;
  g.h1_tag = h1_tag;
  g.gamma.resize(2 * L, 2 * L);
  const complex I1(0, 1);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const double d = (i == j) ? 1.0 : 0.0;
      const complex C = corr.C(i, j), Ia = corr.I(i, j);
      g.gamma(2 * i, 2 * j) = d + 2.0 * I1 * std::imag(C + Ia);
      g.gamma(2 * i, 2 * j + 1) = I1 * d - 2.0 * I1 * std::real(C - Ia);
      g.gamma(2 * i + 1, 2 * j) = -I1 * d + 2.0 * I1 * std::real(C + Ia);
      g.gamma(2 * i + 1, 2 * j + 1) = d + 2.0 * I1 * std::imag(C - Ia);
    }
  }
  return g;
}

QfiResult qfi_from_gamma(const MajoranaCovariance& g, const Eigen::MatrixXcd& dgamma) {
  const long n = g.gamma.rows();
  const Eigen::MatrixXcd gt =
      0.5 * ((g.gamma - Eigen::MatrixXcd::Identity(n, n)) +
             (g.gamma - Eigen::MatrixXcd::Identity(n, n)).adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gt);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXcd D = es.eigenvectors().adjoint() * dgamma * es.eigenvectors();
  QfiResult out;
  for (long r = 0; r < n; ++r) {
    for (long s = 0; s < n; ++s) {
      const double den = 1.0 - ev[r] * ev[s];
      const double num = 0.5 * std::norm(D(r, s));
      if (std::abs(den) < 1e-8) {
        ++out.skipped_pairs;
        if (num > 1e-6) out.singular = true;
        continue;
      }
      out.value += num / den;
    }
  }
  return out;
}

namespace {
MajoranaCovariance gamma_in_context(const ValidatedParams& p, int L, const QfiContext& ctx) {
  if (ctx.n.has_value()) {
    const auto modes = freefermion::evolve_modes(p, ctx.initial, *ctx.n);
    return gamma_from_correlators(freefermion::correlators_at(p, modes, L), p->h1);
  }
  return gamma_from_correlators(freefermion::steady_correlators(p, ctx.initial, L), p->h1);
}
}  // namespace

QfiResult qfi_gaussian(const ValidatedParams& p, int L, const QfiContext& ctx, double dh1) {
  if (!(dh1 > 0)) throw InvalidParams({"finite-difference step must be > 0"});
  const MajoranaCovariance g0 = gamma_in_context(p, L, ctx);
  const MajoranaCovariance gp = gamma_in_context(with_h1(p, p->h1 + dh1), L, ctx);
  const MajoranaCovariance gm = gamma_in_context(with_h1(p, p->h1 - dh1), L, ctx);
  const Eigen::MatrixXcd dg = (gp.gamma - gm.gamma) / (2.0 * dh1);
  return qfi_from_gamma(g0, dg);
}

namespace {
// dense Majorana matrices a_{2i} (x type) and a_{2i+1} (y type), 0-based;
// Z string on lower bits, site j = bit j
Eigen::MatrixXcd majorana_dense(int L, int idx) {
  const int site = idx / 2;
  const bool ytype = idx % 2;
  const long dim = 1L << L;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  const unsigned long below = (1UL << site) - 1;
  for (long b = 0; b < dim; ++b) {
    const double str = std::popcount(static_cast<unsigned long>(b) & below) % 2 ? -1.0 : 1.0;
    const bool down = (b >> site) & 1;
    complex amp(str, 0);
    if (ytype) amp *= down ? complex(0, -1) : complex(0, 1);
    A(b ^ (1L << site), b) = amp;
  }
  return A;
}
}  // namespace

BlockState block_state_from_gamma(const MajoranaCovariance& g) {
  const int L = g.L;
  const long twoL = 2 * L;
  // Gamma = 1 + iM, M real antisymmetric
  Eigen::MatrixXd M = ((g.gamma - Eigen::MatrixXcd::Identity(twoL, twoL)) / complex(0, 1))
                          .real();
  M = 0.5 * (M - M.transpose().eval());
  Eigen::RealSchur<Eigen::MatrixXd> schur(M);
  const Eigen::MatrixXd T = schur.matrixT();
  const Eigen::MatrixXd O = schur.matrixU();

  // canonical pair amplitudes nu_j from the 2x2 antisymmetric blocks of T;
  // 1x1 zero blocks are maximally mixed pairs and contribute a plain 1/2
  std::vector<double> nu;
  std::vector<int> pos;
  int zero_cols = 0;
  for (long i = 0; i < twoL;) {
    if (i + 1 < twoL && std::abs(T(i + 1, i)) > 1e-12) {
      nu.push_back(T(i, i + 1));
      pos.push_back(static_cast<int>(i));
      i += 2;
    } else {
      ++zero_cols;
      ++i;
    }
  }
  for (double v : nu)
    if (std::abs(v) > 1.0 + 1e-8) throw NonPhysicalGamma("pair amplitude |nu| exceeds 1");

  const long dim = 1L << L;
  std::vector<Eigen::MatrixXcd> A(twoL);
  for (int i = 0; i < twoL; ++i) A[i] = majorana_dense(L, i);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(dim, dim);
  rho *= std::pow(0.5, 0.5 * zero_cols);
  for (size_t j = 0; j < nu.size(); ++j) {
    Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < twoL; ++i) {
      a1 += O(i, pos[j]) * A[i];
      a2 += O(i, pos[j] + 1) * A[i];
    }
    rho = rho * (0.5 * (Eigen::MatrixXcd::Identity(dim, dim) -
                        complex(0, 1) * nu[j] * (a1 * a2)));
  }
  return {rho, L};
}

std::vector<double> block_magnetization_distribution(const BlockState& s) {
  const int L = s.L;
  std::vector<double> p(L + 1, 0.0);
  for (long b = 0; b < (1L << L); ++b)
    p[std::popcount(static_cast<unsigned long>(b))] += std::real(s.rho(b, b));
  return p;  // p[k-1] corresponds to magnetization L - 2(k-1)
}

BlockState two_site_density_matrix(const freefermion::CorrelationData& corr) {
  if (corr.C.rows() < 2) throw InvalidParams({"two-site state requires L >= 2 correlators"});
  freefermion::CorrelationData c2;
  c2.C = corr.C.topLeftCorner(2, 2);
  c2.I = corr.I.topLeftCorner(2, 2);
  const Eigen::MatrixXcd gam = gamma_from_correlators(c2).gamma;
  const Eigen::MatrixXd M =
      ((gam - Eigen::MatrixXcd::Identity(4, 4)) / complex(0, 1)).real();

  // Majorana Wick contractions of the pair block (indices a_1..a_4)
  const double sz = M(0, 1);                                        // <sz_i> = <sz_{i+1}>
  const double zz = M(0, 1) * M(2, 3) - M(0, 2) * M(1, 3) + M(0, 3) * M(1, 2);
  const double xx = M(1, 2);
  const double yy = -M(0, 3);
  const double xy = M(1, 3);
  const double yx = -M(0, 2);

  const complex u11 = 0.25 * (1 + 2 * sz + zz);
  const complex u22 = 0.25 * (1 - zz);
  const complex u44 = 0.25 * (1 - 2 * sz + zz);
  const complex u23 = 0.25 * complex(xx + yy, xy - yx);
  const complex u14 = 0.25 * complex(xx - yy, -(xy + yx));

  BlockState out;
  out.L = 2;
  out.rho = Eigen::MatrixXcd::Zero(4, 4);
  // basis index = s0 + 2 s1 (bit = down): |uu>=0, |du>=1, |ud>=2, |dd>=3
  out.rho(0, 0) = u11;
  out.rho(2, 2) = u22;  // |ud> = up at site 0, down at site 1
  out.rho(1, 1) = u22;  // u33 = u22
  out.rho(3, 3) = u44;
  out.rho(2, 1) = u23;  // <ud|rho|du>
  out.rho(1, 2) = std::conj(u23);
  out.rho(0, 3) = u14;
  out.rho(3, 0) = std::conj(u14);
  return out;
}

SldResult sld_two_site(const BlockState& state, const Eigen::MatrixXcd& dstate) {
  const long n = state.rho.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      Eigen::MatrixXcd(0.5 * (state.rho + state.rho.adjoint())));
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::MatrixXcd D = V.adjoint() * dstate * V;
  Eigen::MatrixXcd Lhat = Eigen::MatrixXcd::Zero(n, n);
  SldResult out;
  for (long r = 0; r < n; ++r)
    for (long s = 0; s < n; ++s) {
      const double den = lam[r] + lam[s];
      if (den < 1e-12) {
        if (std::abs(D(r, s)) > 1e-12) out.degenerate = true;
        continue;
      }
      Lhat(r, s) = 2.0 * D(r, s) / den;
    }
  out.sld = V * Lhat * V.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esl(
      Eigen::MatrixXcd(0.5 * (out.sld + out.sld.adjoint())));
  out.eigenvalues = esl.eigenvalues();
  out.eigenvectors = esl.eigenvectors();
  return out;
}

}  // namespace sense::gaussian

#include "sense/ed.hpp"

#include <bit>
#include <cmath>
#include <memory>

namespace sense::ed {

namespace {
int ring_distance(int i, int j, int N) {
  const int d = std::abs(i - j);
  return std::min(d, N - d);
}

// z-field diagonal: <b| -field sum sz |b> = -field (N - 2 popcount(b))
std::vector<double> zdiag(int N, double field) {
  std::vector<double> d(size_t{1} << N);
  for (long b = 0; b < (long{1} << N); ++b)
    d[b] = -field * (N - 2 * std::popcount(static_cast<unsigned long>(b)));
  return d;
}

std::vector<std::pair<long, double>> make_bonds(const EDParams& p) {
  std::vector<std::pair<long, double>> bonds;
  if (p.alpha == kAlphaInf) {
    for (int i = 0; i + 1 < p.N; ++i) bonds.push_back({(1L << i) | (1L << (i + 1)), p.J});
    if (p.periodic && p.N > 2) bonds.push_back({(1L << (p.N - 1)) | 1L, p.J});
  } else {
    for (int i = 0; i < p.N; ++i)
      for (int j = i + 1; j < p.N; ++j) {
        const int r = p.periodic ? ring_distance(i, j, p.N) : (j - i);
        bonds.push_back({(1L << i) | (1L << j), p.J / std::pow(r, p.alpha)});
      }
  }
  return bonds;
}
}  // namespace

void validate_ed(const EDParams& p) {
  std::vector<std::string> bad;
  if (p.N < 2 || p.N > 14) bad.push_back("ED requires 2 <= N <= 14");
  if (!(p.alpha > 0)) bad.push_back("alpha must be > 0 (or infinity)");
  if (!(p.J > 0)) bad.push_back("J must be > 0");
  if (!(p.tau > 0)) bad.push_back("tau must be > 0");
  if (p.pulse.kind == PulseShape::Kind::SquarePulse &&
      (!(p.pulse.width > 0) || p.pulse.width > p.tau + 1e-15))
    bad.push_back("square pulse requires 0 < w <= tau");
  if (!bad.empty()) throw InvalidParams(std::move(bad));
}

Eigen::MatrixXd build_hamiltonian(const EDParams& p, double field) {
  validate_ed(p);
  const long dim = 1L << p.N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  const auto diag = zdiag(p.N, field);
  for (long b = 0; b < dim; ++b) H(b, b) = diag[b];
  for (const auto& [mask, w] : make_bonds(p))
    for (long b = 0; b < dim; ++b) H(b ^ mask, b) -= w;
  return H;
}

SparseSpinH::SparseSpinH(const EDParams& p, double field)
    : N_(p.N), bonds_(make_bonds(p)), diag_(zdiag(p.N, field)) {
  double wsum = 0.0;
  for (const auto& [mask, w] : bonds_) wsum += std::abs(w);
  bound_ = std::abs(field) * N_ + wsum;
}

void SparseSpinH::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  const long dim = 1L << N_;
  y.resize(dim);
  for (long b = 0; b < dim; ++b) y[b] = diag_[b] * x[b];
  for (const auto& [mask, w] : bonds_)
    for (long b = 0; b < dim; ++b) y[b] -= w * x[b ^ mask];
}

void SparseSpinH::apply_block(const RowMatrixXcd& x, RowMatrixXcd& y) const {
  const long dim = 1L << N_;
  y.resize(dim, x.cols());
  for (long b = 0; b < dim; ++b) y.row(b) = diag_[b] * x.row(b);
  for (const auto& [mask, w] : bonds_)
    for (long b = 0; b < dim; ++b) y.row(b) -= w * x.row(b ^ mask);
}

ChebyshevExp::ChebyshevExp(const SparseSpinH& H, double t) : H_(&H) {
  const double r = std::max(H.norm_bound(), 1e-300) * 1.0001;
  scale_ = 1.0 / r;
  const double z = r * t;
  // exp(-i z x) = sum_m (2 - d_m0) (-i)^m J_m(z) T_m(x) on x in [-1, 1]
  const complex mi(0, -1);
  complex im_pow(1, 0);
  for (int m = 0;; ++m) {
    const double jm = std::cyl_bessel_j(m, z);
    coef_.push_back((m == 0 ? 1.0 : 2.0) * im_pow * jm);
    im_pow *= mi;
    if (m > z + 10 && std::abs(jm) < 1e-16) break;
    if (m > z + 600) break;  // hard guard, never hit for sane parameters
  }
}

void ChebyshevExp::apply(Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd tm_prev = psi, tm(psi.size()), tmp(psi.size());
  H_->apply(psi, tm);
  tm *= scale_;
  Eigen::VectorXcd acc = coef_[0] * tm_prev + coef_[1] * tm;
  for (size_t m = 2; m < coef_.size(); ++m) {
    H_->apply(tm, tmp);
    tmp = 2.0 * scale_ * tmp - tm_prev;
    tm_prev.swap(tm);
    tm.swap(tmp);
    acc += coef_[m] * tm;
  }
  psi.swap(acc);
}

void ChebyshevExp::apply_block(RowMatrixXcd& cols) const {
  RowMatrixXcd tm_prev = cols, tm, tmp;
  H_->apply_block(cols, tm);
  tm *= scale_;
  RowMatrixXcd acc = coef_[0] * tm_prev + coef_[1] * tm;
  for (size_t m = 2; m < coef_.size(); ++m) {
    H_->apply_block(tm, tmp);
    tmp = 2.0 * scale_ * tmp - tm_prev;
    tm_prev.swap(tm);
    tm.swap(tmp);
    acc += coef_[m] * tm;
  }
  cols.swap(acc);
}

EDState polarized_up(int N) {
  EDState s;
  s.psi = Eigen::VectorXcd::Zero(1L << N);
  s.psi[0] = 1.0;
  return s;
}

EDState thermal_of_h0(const EDParams& p, double beta) {
  validate_ed(p);
  if (beta < 0) throw InvalidParams({"thermal state requires beta >= 0"});
  const Eigen::MatrixXd H = build_hamiltonian(p, p.h0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd w = (-beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff()))
                                .exp()
                                .matrix();
  EDState s;
  s.thermal = true;
  s.rho = (es.eigenvectors() * (w / w.sum()).asDiagonal() * es.eigenvectors().transpose())
              .cast<complex>();
  return s;
}

namespace {
// delta kick exp(+i h1 sum sz) as a diagonal phase vector
Eigen::VectorXcd kick_phases(int N, double h1) {
  Eigen::VectorXcd d(1L << N);
  for (long b = 0; b < (1L << N); ++b)
    d[b] = std::polar(1.0, h1 * (N - 2 * std::popcount(static_cast<unsigned long>(b))));
  return d;
}

Eigen::MatrixXcd dense_exp(const EDParams& p, double field, double t) {
  const Eigen::MatrixXd H = build_hamiltonian(p, field);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXcd ph =
      (complex(0, -t) * es.eigenvalues().cast<complex>().array()).exp().matrix();
  return (es.eigenvectors().cast<complex>() * ph.asDiagonal() *
          es.eigenvectors().transpose().cast<complex>());
}
}  // namespace

Eigen::MatrixXcd period_propagator_ed(const EDParams& p) {
  validate_ed(p);
  if (p.N > 12) throw InvalidParams({"dense propagator limited to N <= 12"});
  if (p.pulse.is_delta()) {
    return kick_phases(p.N, p.h1).asDiagonal() * dense_exp(p, p.h0, p.tau);
  }
  const double w = p.pulse.width;
  return dense_exp(p, p.h0 + p.h1, w) * dense_exp(p, p.h0, p.tau - w);
}

KickedEvolver::KickedEvolver(const EDParams& p)
    : p_(p),
      h0_(p, p.h0),
      free_seg_(h0_, p.pulse.is_delta() ? p.tau : p.tau - p.pulse.width) {
  validate_ed(p);
  popcount_.resize(1L << p.N);
  for (long b = 0; b < (1L << p.N); ++b)
    popcount_[b] = std::popcount(static_cast<unsigned long>(b));
  if (!p.pulse.is_delta()) {
    pulse_h_ = std::make_unique<SparseSpinH>(p, p.h0 + p.h1);
    pulse_seg_ = std::make_unique<ChebyshevExp>(*pulse_h_, p.pulse.width);
  }
}

void KickedEvolver::step(Eigen::VectorXcd& psi) const {
  free_seg_.apply(psi);
  if (p_.pulse.is_delta()) {
    for (long b = 0; b < psi.size(); ++b)
      psi[b] *= std::polar(1.0, p_.h1 * (p_.N - 2 * popcount_[b]));
  } else {
    pulse_seg_->apply(psi);
  }
}

void KickedEvolver::step_block(RowMatrixXcd& cols, const std::vector<double>& h1_per_col) const {
  if (!p_.pulse.is_delta())
    throw InvalidParams({"batched per-column evolution supports delta kicks only"});
  if (cols.cols() != static_cast<long>(h1_per_col.size()))
    throw InvalidParams({"column count does not match kick list"});
  free_seg_.apply_block(cols);
  // per-column kick phase depends only on the popcount of the row index
  std::vector<Eigen::VectorXcd> lut(p_.N + 1, Eigen::VectorXcd(cols.cols()));
  for (int pc = 0; pc <= p_.N; ++pc)
    for (long c = 0; c < cols.cols(); ++c)
      lut[pc][c] = std::polar(1.0, h1_per_col[c] * (p_.N - 2 * pc));
  for (long b = 0; b < cols.rows(); ++b)
    cols.row(b).array() *= lut[popcount_[b]].transpose().array();
}

EDState evolve_ed(const EDParams& p, const EDState& initial, long n) {
  validate_ed(p);
  if (n < 0) throw InvalidParams({"period count must be >= 0"});
  EDState s = initial;
  if (n == 0) return s;
  if (!s.thermal) {
    const KickedEvolver ev(p);
    for (long i = 0; i < n; ++i) ev.step(s.psi);
  } else {
    const Eigen::MatrixXcd U = period_propagator_ed(p);
    for (long i = 0; i < n; ++i) s.rho = U * s.rho * U.adjoint();
  }
  return s;
}

Eigen::MatrixXcd partial_trace(const EDState& s, int N, int first, int L) {
  if (first < 0 || L < 1 || first + L > N) throw InvalidParams({"block outside the chain"});
  const long dlo = 1L << first, dblk = 1L << L, dhi = 1L << (N - first - L);
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dblk, dblk);
  if (!s.thermal) {
    for (long h = 0; h < dhi; ++h)
      for (long m = 0; m < dblk; ++m)
        for (long mp = 0; mp < dblk; ++mp) {
          complex acc = 0.0;
          for (long l = 0; l < dlo; ++l)
            acc += s.psi[(h << (first + L)) | (m << first) | l] *
                   std::conj(s.psi[(h << (first + L)) | (mp << first) | l]);
          r(m, mp) += acc;
        }
  } else {
    for (long h = 0; h < dhi; ++h)
      for (long m = 0; m < dblk; ++m)
        for (long mp = 0; mp < dblk; ++mp) {
          complex acc = 0.0;
          for (long l = 0; l < dlo; ++l)
            acc += s.rho((h << (first + L)) | (m << first) | l,
                         (h << (first + L)) | (mp << first) | l);
          r(m, mp) += acc;
        }
  }
  return r;
}

double magnetization_ed(const EDState& s, int N) {
  double mz = 0.0;
  const long dim = 1L << N;
  for (long b = 0; b < dim; ++b) {
    const double w = s.thermal ? std::real(s.rho(b, b)) : std::norm(s.psi[b]);
    mz += w * (N - 2 * std::popcount(static_cast<unsigned long>(b)));
  }
  return mz / N;
}

namespace {
// JW annihilation c_j |b>: bit set = fermion; string sign over lower sites
Eigen::VectorXcd apply_c(const Eigen::VectorXcd& psi, int N, int j, bool dagger) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  const long dim = 1L << N;
  const unsigned long below = (1UL << j) - 1;
  for (long b = 0; b < dim; ++b) {
    const bool occ = (b >> j) & 1;
    if (occ == dagger) continue;
    const int sign = std::popcount(static_cast<unsigned long>(b) & below) % 2 ? -1 : 1;
    out[b ^ (1L << j)] += double(sign) * psi[b];
  }
  return out;
}
}  // namespace

freefermion::CorrelationData correlators_ed(const EDState& s, int N, int L) {
  if (s.thermal) throw InvalidParams({"JW correlator oracle implemented for pure states"});
  std::vector<Eigen::VectorXcd> cpsi(L), cdpsi(L);
  for (int j = 0; j < L; ++j) {
    cpsi[j] = apply_c(s.psi, N, j, false);
    cdpsi[j] = apply_c(s.psi, N, j, true);
  }
  freefermion::CorrelationData cd;
  cd.C.resize(L, L);
  cd.I.resize(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      cd.C(i, j) = cpsi[i].dot(cpsi[j]);    // <c+_i c_j>
      cd.I(i, j) = cpsi[i].dot(cdpsi[j]);   // <c+_i c+_j>
    }
  return cd;
}

}  // namespace sense::ed

#include "sense/freefermion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sense::freefermion {

namespace {
constexpr double kDegenerateTol = 1e-12;
const Eigen::Matrix2cd kId = Eigen::Matrix2cd::Identity();

Eigen::Matrix2cd pauli_dot(const Eigen::Vector3d& n) {
  Eigen::Matrix2cd m;
  m << n.z(), complex(n.x(), -n.y()), complex(n.x(), n.y()), -n.z();
  return m;
}

// quasi-energy of a 2x2 SU(2) propagator, folded to [0, pi/tau]
double quasi_energy_of(const Eigen::Matrix2cd& U, double tau) {
  double c = 0.5 * std::real(U.trace());
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) / tau;
}

// phase-fix: largest-magnitude component made real positive
void fix_phase(Eigen::Vector2cd& v) {
  int i = std::abs(v[0]) >= std::abs(v[1]) ? 0 : 1;
  if (std::abs(v[i]) > 0) v *= std::conj(v[i]) / std::abs(v[i]);
}
}  // namespace

ModeHamiltonian static_mode(const ValidatedParams& p, double k) {
  const double J = p->J, h0 = p->h0;
  return {k, Eigen::Vector3d(0.0, -2.0 * J * std::sin(k), -2.0 * (h0 - J * std::cos(k)))};
}

Eigen::Matrix2cd rotation(const Eigen::Vector3d& v, double t) {
  const double b = v.norm();
  if (b == 0.0) return kId;
  const double a = b * t;
  return std::cos(a) * kId - complex(0, 1) * std::sin(a) * pauli_dot(v / b);
}

Eigen::Matrix2cd period_propagator(const ValidatedParams& p, double k) {
  const Eigen::Vector3d field = static_mode(p, k).field;
  const Eigen::Vector3d kick_z(0.0, 0.0, -2.0 * p->h1);  // exp(+2i h1 sz)
  if (p->pulse.is_delta()) {
    return rotation(kick_z, 1.0) * rotation(field, p->tau);
  }
  const double w = p->pulse.width;
  return rotation(field + kick_z, w) * rotation(field, p->tau - w);
}

double ModeState::occupation() const {
  if (thermal) return std::real(rho(1, 1));
  return std::norm(amp[1]);
}

complex ModeState::pair_amp() const {
  if (thermal) return rho(0, 1);
  return amp[0] * std::conj(amp[1]);
}

double ModeState::sz() const {
  if (thermal) return std::real(rho(0, 0) - rho(1, 1));
  return std::norm(amp[0]) - std::norm(amp[1]);
}

std::vector<ModeState> initial_modes(const ValidatedParams& p, const InitialState& s) {
  const auto ks = kgrid(p->N);
  std::vector<ModeState> modes(ks.size());
  switch (s.kind) {
    case InitialState::Kind::PolarizedUp:
      for (auto& m : modes) m.amp = Eigen::Vector2cd(1.0, 0.0);
      break;
    case InitialState::Kind::GroundStateOfH0: {
      const double h0 = s.h0_gs.value_or(p->h0);
      for (size_t i = 0; i < ks.size(); ++i) {
        // lowest eigenvector of -2[(h0 - J cos k) sz + J sin k sy]
        const double th = std::atan2(p->J * std::sin(ks[i]), h0 - p->J * std::cos(ks[i]));
        modes[i].amp =
            Eigen::Vector2cd(std::cos(0.5 * th), complex(0, 1) * std::sin(0.5 * th));
      }
      break;
    }
    case InitialState::Kind::ThermalOfH0: {
      if (s.beta < 0) throw InvalidParams({"thermal initial state requires beta >= 0"});
      for (size_t i = 0; i < ks.size(); ++i) {
        const Eigen::Vector3d b = static_mode(p, ks[i]).field;
        const double nb = b.norm();
        modes[i].thermal = true;
        modes[i].rho = 0.5 * (kId - std::tanh(s.beta * nb) *
                                        (nb > 0 ? pauli_dot(b / nb) : Eigen::Matrix2cd::Zero()));
      }
      break;
    }
  }
  return modes;
}

FloquetMode floquet_mode(const ValidatedParams& p, double k, const ModeState& initial) {
  FloquetMode fm;
  fm.k = k;
  fm.U = period_propagator(p, k);
  const double eps_tau = quasi_energy_of(fm.U, 1.0);  // folded phase in [0, pi]
  fm.quasi_energy = eps_tau / p->tau;
  const double s = std::sin(eps_tau);
  if (std::abs(s) < kDegenerateTol) {
    fm.degenerate = true;
    fm.axis = Eigen::Vector3d(0, 0, 1);
    fm.plus = Eigen::Vector2cd(1, 0);
    fm.minus = Eigen::Vector2cd(0, 1);
  } else {
    // U = cos(eps tau) - i sin(eps tau) n.sigma
    const Eigen::Matrix2cd M = complex(0, 1) / s * (fm.U - std::cos(eps_tau) * kId);
    fm.axis.x() = 0.5 * std::real(M(0, 1) + M(1, 0));
    fm.axis.y() = 0.5 * std::imag(M(1, 0) - M(0, 1));
    fm.axis.z() = std::real(M(0, 0));
    fm.axis.normalize();
    const double theta = std::acos(std::clamp(fm.axis.z(), -1.0, 1.0));
    const double phi = std::atan2(fm.axis.y(), fm.axis.x());
    const complex eip(std::cos(phi), std::sin(phi));
    fm.plus = Eigen::Vector2cd(std::cos(0.5 * theta), eip * std::sin(0.5 * theta));
    fm.minus = Eigen::Vector2cd(-std::conj(eip) * std::sin(0.5 * theta), std::cos(0.5 * theta));
    fix_phase(fm.plus);
    fix_phase(fm.minus);
  }
  if (!initial.thermal) {
    fm.r_plus = initial.amp.dot(fm.plus);    // <psi0|+>
    fm.r_minus = initial.amp.dot(fm.minus);
  }
  return fm;
}

StroboscopicEvolution::StroboscopicEvolution(const ValidatedParams& p, const InitialState& s)
    : ks_(kgrid(p->N)) {
  const auto modes = initial_modes(p, s);
  thermal_ = !modes.empty() && modes.front().thermal;
  const size_t nk = ks_.size();
  if (thermal_) {
    V_.resize(nk);
    R_.resize(nk);
    theta_.resize(nk);
    for (size_t i = 0; i < nk; ++i) {
      const FloquetMode fm = floquet_mode(p, ks_[i], modes[i]);
      const double et = fm.quasi_energy * p->tau;
      Eigen::Matrix2cd V;
      V.col(0) = fm.plus;
      V.col(1) = fm.minus;
      V_[i] = V;
      R_[i] = V.adjoint() * modes[i].rho * V;
      theta_[i] = Eigen::Vector2d(-et, et);
    }
  } else {
    e0_.resize(nk);
    e1_.resize(nk);
    theta_.resize(nk);
    coef_.resize(nk);
    for (size_t i = 0; i < nk; ++i) {
      const FloquetMode fm = floquet_mode(p, ks_[i], modes[i]);
      const double et = fm.quasi_energy * p->tau;
      e0_[i] = fm.plus;
      e1_[i] = fm.minus;
      theta_[i] = Eigen::Vector2d(-et, et);
      coef_[i] = Eigen::Vector2cd(fm.plus.dot(modes[i].amp), fm.minus.dot(modes[i].amp));
    }
  }
}

std::vector<ModeState> StroboscopicEvolution::at(long n) const {
  std::vector<ModeState> out(ks_.size());
  for (size_t i = 0; i < ks_.size(); ++i) {
    if (thermal_) {
      const complex ph01 =
          std::polar(1.0, (theta_[i][0] - theta_[i][1]) * static_cast<double>(n));
      Eigen::Matrix2cd Rn = R_[i];
      Rn(0, 1) *= ph01;
      Rn(1, 0) *= std::conj(ph01);
      out[i].thermal = true;
      out[i].rho = V_[i] * Rn * V_[i].adjoint();
    } else {
      const complex c0 = std::polar(1.0, theta_[i][0] * static_cast<double>(n)) * coef_[i][0];
      const complex c1 = std::polar(1.0, theta_[i][1] * static_cast<double>(n)) * coef_[i][1];
      out[i].amp = c0 * e0_[i] + c1 * e1_[i];
    }
  }
  return out;
}

std::vector<ModeState> evolve_modes(const ValidatedParams& p, const InitialState& s, long n) {
  if (n < 0) throw InvalidParams({"period count must be >= 0"});
  if (n == 0) return initial_modes(p, s);
  return StroboscopicEvolution(p, s).at(n);
}

namespace {
// cosine / sine transforms of the mode weights; ascending-k accumulation
CorrelationData assemble(const std::vector<double>& ks, const std::vector<double>& occ,
                         const std::vector<complex>& pair, int N, int L) {
  std::vector<double> cker(L, 0.0);
  std::vector<complex> aker(L, 0.0);
  for (size_t m = 0; m < ks.size(); ++m) {
    for (int d = 0; d < L; ++d) {
      cker[d] += occ[m] * std::cos(ks[m] * d);
      aker[d] += pair[m] * std::sin(ks[m] * d);
    }
  }
  CorrelationData cd;
  cd.C.resize(L, L);
  cd.I.resize(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      cd.C(i, j) = complex(2.0 / N) * cker[std::abs(i - j)];
      const int d = j - i;
      cd.I(i, j) = complex(0, 2.0 / N) * (d >= 0 ? aker[d] : -aker[-d]);
    }
  }
  return cd;
}
}  // namespace

CorrelationData correlators_at(const ValidatedParams& p, const std::vector<ModeState>& modes,
                               int L) {
  if (L < 1 || L > p->N) throw InvalidParams({"block length must satisfy 1 <= L <= N"});
  const auto ks = kgrid(p->N);
  if (modes.size() != ks.size()) throw InvalidParams({"mode list does not match chain size"});
  std::vector<double> occ(ks.size());
  std::vector<complex> pair(ks.size());
  for (size_t m = 0; m < ks.size(); ++m) {
    occ[m] = modes[m].occupation();
    pair[m] = modes[m].pair_amp();
  }
  return assemble(ks, occ, pair, p->N, L);
}

CorrelationData steady_correlators(const ValidatedParams& p, const InitialState& s, int L) {
  if (s.kind == InitialState::Kind::ThermalOfH0)
    throw InvalidParams({"steady correlators require a pure initial state"});
  if (L < 1 || L > p->N) throw InvalidParams({"block length must satisfy 1 <= L <= N"});
  const auto ks = kgrid(p->N);
  const auto modes = initial_modes(p, s);
  std::vector<double> occ(ks.size(), 0.0);
  std::vector<complex> pair(ks.size(), 0.0);
  for (size_t m = 0; m < ks.size(); ++m) {
    const FloquetMode fm = floquet_mode(p, ks[m], modes[m]);
    if (fm.degenerate) {
      // U ~ +-1: the mode is stroboscopically frozen
      occ[m] = modes[m].occupation();
      pair[m] = modes[m].pair_amp();
      continue;
    }
    for (const auto& [r, e] : {std::pair{fm.r_plus, fm.plus}, std::pair{fm.r_minus, fm.minus}}) {
      const double w = std::norm(r);
      occ[m] += w * std::norm(e[1]);
      pair[m] += w * e[0] * std::conj(e[1]);
    }
  }
  CorrelationData cd = assemble(ks, occ, pair, p->N, L);
  cd.label = "steady-state";
  return cd;
}

double magnetization(const ValidatedParams& p, const std::vector<ModeState>& modes) {
  double acc = 0.0;
  for (const auto& m : modes) acc += m.sz();
  return 2.0 * acc / p->N;
}

GapResult floquet_gap(const ValidatedParams& p) {
  GapResult g{std::numeric_limits<double>::infinity(), 0.0};
  for (double k : kgrid(p->N)) {
    const double eps = quasi_energy_of(period_propagator(p, k), p->tau);
    if (2 * eps < g.gap) {
      g.gap = 2 * eps;
      g.k_min = k;
    }
  }
  return g;
}

namespace {
double gap_at(ModelParams q, double h1) {
  q.h1 = h1;
  return floquet_gap(validate(q)).gap;
}

// coarse scan + golden-section refinement of min_{h1} gap(h0, h1)
std::pair<double, double> minimize_gap(const ModelParams& base, double lo, double hi) {
  constexpr int kScan = 240;
  double best = std::numeric_limits<double>::infinity(), bh = lo;
  for (int i = 0; i <= kScan; ++i) {
    const double h = lo + (hi - lo) * i / kScan;
    const double g = gap_at(base, h);
    if (g < best) {
      best = g;
      bh = h;
    }
  }
  double a = std::max(lo, bh - (hi - lo) / kScan);
  double b = std::min(hi, bh + (hi - lo) / kScan);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = gap_at(base, x1), f2 = gap_at(base, x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = gap_at(base, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = gap_at(base, x2);
    }
  }
  const double h = 0.5 * (a + b);
  return {h, gap_at(base, h)};
}
}  // namespace

std::vector<GapLinePoint> gap_line(const ModelParams& base, const std::vector<double>& h0s,
                                   double h1_max) {
  std::vector<GapLinePoint> out;
  out.reserve(h0s.size());
  for (double h0 : h0s) {
    ModelParams q = base;
    q.h0 = h0;
    const double analytic = q.tau * std::abs(h0 - q.J);
    const double hi = h1_max > 0 ? h1_max : std::max(2.0 * analytic, 0.5 * q.tau * q.J) + 0.05;
    auto [hnum, g] = minimize_gap(q, 0.0, hi);
    out.push_back({h0, analytic, hnum, g});
  }
  return out;
}

}  // namespace sense::freefermion

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sense/ed.hpp"
#include "sense/gaussian.hpp"
#include "sense/metrology.hpp"

using namespace sense;
using namespace sense::gaussian;
using freefermion::CorrelationData;

namespace {
ValidatedParams make(double h0, double h1, double tau, int N) {
  ModelParams p;
  p.h0 = h0;
  p.h1 = h1;
  p.tau = tau;
  p.N = N;
  return validate(p);
}

CorrelationData vacuum_corr(int L) {
  CorrelationData c;
  c.C = Eigen::MatrixXcd::Zero(L, L);
  c.I = Eigen::MatrixXcd::Zero(L, L);
  return c;
}

CorrelationData driven_corr(double h0, double h1, long n, int N, int L) {
  const auto p = make(h0, h1, 0.2, N);
  return freefermion::correlators_at(
      p, freefermion::evolve_modes(p, InitialState::polarized_up(), n), L);
}
}  // namespace

TEST_SUITE_BEGIN("gaussian");

TEST_CASE("vacuum covariance blocks and eigenvalues") {
  const auto g = gamma_from_correlators(vacuum_corr(2));
  Eigen::Matrix2cd blk;
  blk << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 1.0;
  CHECK((g.gamma.block(0, 0, 2, 2) - blk).norm() < 1e-14);
  CHECK((g.gamma.block(2, 2, 2, 2) - blk).norm() < 1e-14);
  CHECK(g.gamma.block(0, 2, 2, 2).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.gamma);
  for (long i = 0; i < 4; ++i) {
    const double ev = es.eigenvalues()[i];
    CHECK((std::abs(ev) < 1e-12 || std::abs(ev - 2.0) < 1e-12));
  }
}

TEST_CASE("covariance algebra holds for driven states") {
  for (long n : {3L, 57L}) {
    const auto cd = driven_corr(0.7, 0.33, n, 64, 4);
    const auto g = gamma_from_correlators(cd).gamma;
    CHECK((g + g.transpose() - 2.0 * Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);
    CHECK((g - g.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
    CHECK(es.eigenvalues().maxCoeff() < 2.0 + 1e-8);
  }
}

TEST_CASE("covariance matches the ED block state") {
  const int N = 8, L = 3;
  ed::EDParams ep;
  ep.N = N;
  ep.h0 = 1.0;
  ep.h1 = 0.1;
  ep.tau = 0.2;
  ep.periodic = true;
  const auto s = ed::evolve_ed(ep, ed::polarized_up(N), 50);
  const Eigen::MatrixXcd rho = ed::partial_trace(s, N, 0, L);
  const auto g = gamma_from_correlators(driven_corr(1.0, 0.1, 50, N, L)).gamma;
  for (int a = 0; a < 2 * L; ++a)
    for (int b = 0; b < 2 * L; ++b) {
      const std::complex<double> direct =
          (rho * oracles::majorana(L, a) * oracles::majorana(L, b)).trace();
      CHECK(std::abs(direct - g(a, b)) < 1e-8);
    }
}

TEST_CASE("QFI vanishes when the state cannot depend on the estimate") {
  const auto p = make(0.8, 0.3, 0.2, 32);
  // zero periods: the initial state carries no h1 dependence
  const auto r = qfi_gaussian(p, 3, {InitialState::polarized_up(), 0});
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("single-site QFI equals the magnetization closed form") {
  for (auto [h0, h1] : {std::pair{0.191, 0.161}, std::pair{0.6, 0.2}}) {
    const auto p = make(h0, h1, 0.2, 400);
    const double dh = 1e-3;
    const auto mz = [&](double h) {
      const auto cd =
          freefermion::steady_correlators(with_h1(p, h), InitialState::polarized_up(), 1);
      return 1.0 - 2.0 * std::real(cd.C(0, 0));
    };
    const double m0 = mz(h1);
    const double dm = (mz(h1 + dh) - mz(h1 - dh)) / (2 * dh);
    const double closed = dm * dm / ((1 + m0) * (1 - m0));
    const auto r = qfi_gaussian(p, 1, {InitialState::polarized_up(), std::nullopt}, dh);
    CHECK(r.value == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("Gamma-route QFI equals the spectral QFI of the rebuilt state") {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double h0 = 0.1 + 1.4 * u(eng), h1 = 0.05 + 0.4 * u(eng);
    const long n = 5 + static_cast<long>(200 * u(eng));
    const int L = trial % 2 ? 2 : 4;
    const double dh = 1e-3;
    const auto gam = [&](double h) {
      return gamma_from_correlators(driven_corr(h0, h, n, 128, L), h);
    };
    const auto g0 = gam(h1);
    const auto gp = gam(h1 + dh), gm = gam(h1 - dh);
    const Eigen::MatrixXcd dg = (gp.gamma - gm.gamma) / (2 * dh);
    const auto r = qfi_from_gamma(g0, dg);
    const auto rho0 = block_state_from_gamma(g0);
    const Eigen::MatrixXcd drho =
        (block_state_from_gamma(gp).rho - block_state_from_gamma(gm).rho) / (2 * dh);
    const double f_rho = metrology::qfi_spectral(rho0.rho, drho);
    CHECK(r.value == doctest::Approx(f_rho).epsilon(1e-4));
  }
}

TEST_CASE("QFI agrees with the fidelity-decay oracle") {
  const auto p = make(0.6, 0.2, 0.2, 256);
  const int L = 4;
  const long n = 150;
  const double delta = 2e-4;
  const auto ctx = QfiContext{InitialState::polarized_up(), n};
  const auto r = qfi_gaussian(p, L, ctx);
  REQUIRE_FALSE(r.singular);  // away from the rho-singular regime
  const auto gam = [&](double h) {
    const auto q = with_h1(p, h);
    return gamma_from_correlators(
        freefermion::correlators_at(q, freefermion::evolve_modes(q, ctx.initial, n), L));
  };
  const auto r0 = block_state_from_gamma(gam(p->h1));
  const auto rd = block_state_from_gamma(gam(p->h1 + delta));
  const double f_fid = oracles::fidelity_qfi(r0.rho, rd.rho, delta);
  CHECK(r.value == doctest::Approx(f_fid).epsilon(1e-2));
}

TEST_CASE("reconstruction: vacuum, maximally mixed, and the ED oracle") {
  const auto vac = block_state_from_gamma(gamma_from_correlators(vacuum_corr(3)));
  CHECK(std::real(vac.rho(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac.rho.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-10));

  // nu = 0 for every pair: Gamma = identity -> infinite-temperature block
  CorrelationData mixed;
  mixed.C = 0.5 * Eigen::MatrixXcd::Identity(3, 3);
  mixed.I = Eigen::MatrixXcd::Zero(3, 3);
  const auto mix = block_state_from_gamma(gamma_from_correlators(mixed));
  CHECK((mix.rho - Eigen::MatrixXcd::Identity(8, 8) / 8.0).norm() < 1e-12);

  ed::EDParams ep;
  ep.N = 8;
  ep.h0 = 1.0;
  ep.h1 = 0.1;
  ep.tau = 0.2;
  ep.periodic = true;
  const auto s = ed::evolve_ed(ep, ed::polarized_up(8), 50);
  const Eigen::MatrixXcd rho_ed = ed::partial_trace(s, 8, 0, 3);
  const auto rec = block_state_from_gamma(gamma_from_correlators(driven_corr(1.0, 0.1, 50, 8, 3)));
  CHECK((rec.rho - rho_ed).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("reconstructed states are physical and Wick-consistent") {
  const auto g = gamma_from_correlators(driven_corr(0.9, 0.28, 77, 64, 4));
  const auto bs = block_state_from_gamma(g);
  CHECK(std::abs(bs.rho.trace().real() - 1.0) < 1e-10);
  CHECK((bs.rho - bs.rho.adjoint()).norm() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bs.rho);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const std::complex<double> wick =
          (bs.rho * oracles::majorana(4, a) * oracles::majorana(4, b)).trace();
      CHECK(std::abs(wick - g.gamma(a, b)) < 1e-8);
    }
}

TEST_CASE("unphysical covariance is rejected") {
  auto g = gamma_from_correlators(vacuum_corr(2));
  g.gamma = 1.2 * (g.gamma - Eigen::MatrixXcd::Identity(4, 4)) +
            Eigen::MatrixXcd::Identity(4, 4);
  CHECK_THROWS_AS(block_state_from_gamma(g), NonPhysicalGamma);
}

TEST_CASE("parity keeps single-site states diagonal") {
  const auto bs = block_state_from_gamma(gamma_from_correlators(driven_corr(0.7, 0.3, 41, 64, 1)));
  CHECK(std::abs(bs.rho(0, 1)) < 1e-10);
}

TEST_CASE("block magnetization distributions") {
  const auto vac = block_state_from_gamma(gamma_from_correlators(vacuum_corr(3)));
  const auto pv = block_magnetization_distribution(vac);
  CHECK(pv[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pv[1] + pv[2] + pv[3] < 1e-10);

  // L = 1: p_up = (1 + m_z)/2
  const auto cd = driven_corr(0.8, 0.25, 33, 64, 1);
  const double mz = 1.0 - 2.0 * std::real(cd.C(0, 0));
  const auto p1 = block_magnetization_distribution(
      block_state_from_gamma(gamma_from_correlators(cd)));
  CHECK(p1[0] == doctest::Approx((1 + mz) / 2).epsilon(1e-10));

  // maximally mixed block: binomial counts
  CorrelationData mixed;
  mixed.C = 0.5 * Eigen::MatrixXcd::Identity(4, 4);
  mixed.I = Eigen::MatrixXcd::Zero(4, 4);
  const auto pm = block_magnetization_distribution(
      block_state_from_gamma(gamma_from_correlators(mixed)));
  const double binom[5] = {1, 4, 6, 4, 1};
  double total = 0.0;
  for (int k = 0; k < 5; ++k) {
    CHECK(pm[k] == doctest::Approx(binom[k] / 16.0).epsilon(1e-12));
    total += pm[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-site fast path equals the reconstruction") {
  const auto vac2 = two_site_density_matrix(vacuum_corr(2));
  CHECK(std::real(vac2.rho(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 eng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto cd = driven_corr(0.1 + 1.5 * u(eng), 0.05 + 0.4 * u(eng),
                                3 + static_cast<long>(150 * u(eng)), 64, 2);
    const auto fast = two_site_density_matrix(cd);
    const auto full = block_state_from_gamma(gamma_from_correlators(cd));
    CHECK((fast.rho - full.rho).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::real(fast.rho(1, 1)) == doctest::Approx(std::real(fast.rho(2, 2))).epsilon(1e-12));
  }
}

TEST_CASE("two-site SLD: fixed Bell directions and QFI consistency") {
  const double dh = 1e-3;
  for (double h1 : {0.12, 0.27}) {
    const auto cd = driven_corr(0.5, h1, 60, 64, 2);
    const auto cp = driven_corr(0.5, h1 + dh, 60, 64, 2);
    const auto cm = driven_corr(0.5, h1 - dh, 60, 64, 2);
    const auto rho = two_site_density_matrix(cd);
    const Eigen::MatrixXcd drho =
        (two_site_density_matrix(cp).rho - two_site_density_matrix(cm).rho) / (2 * dh);
    const auto sld = sld_two_site(rho, drho);

    // zero mean and QFI as the second moment
    CHECK(std::abs((rho.rho * sld.sld).trace()) < 1e-10);
    const double f_sld = std::real((rho.rho * sld.sld * sld.sld).trace());
    const double f_spec = metrology::qfi_spectral(rho.rho, drho);
    CHECK(f_sld == doctest::Approx(f_spec).epsilon(1e-8));

    // two eigenvectors are the h1-independent Bell combinations of |ud>, |du>
    Eigen::Vector4cd bell_m(0, 1, -1, 0), bell_p(0, 1, 1, 0);
    bell_m /= std::sqrt(2.0);
    bell_p /= std::sqrt(2.0);
    int hits = 0;
    for (int c = 0; c < 4; ++c) {
      const Eigen::Vector4cd v = sld.eigenvectors.col(c);
      if (std::abs(std::abs(bell_m.dot(v)) - 1.0) < 1e-8 ||
          std::abs(std::abs(bell_p.dot(v)) - 1.0) < 1e-8)
        ++hits;
    }
    CHECK(hits == 2);
  }
}

TEST_CASE("block magnetization CFI never exceeds the QFI") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dh = 1e-3;
  for (int trial = 0; trial < 10; ++trial) {
    const double h0 = 0.1 + 1.6 * u(eng), h1 = 0.02 + 0.45 * u(eng);
    const long n = 10 + static_cast<long>(300 * u(eng));
    const int L = 1 + static_cast<int>(3 * u(eng));
    const auto gam = [&](double h) {
      return gamma_from_correlators(driven_corr(h0, h, n, 96, L));
    };
    const auto g0 = gam(h1);
    const auto gp = gam(h1 + dh), gm = gam(h1 - dh);
    const double fq = qfi_from_gamma(g0, (gp.gamma - gm.gamma) / (2 * dh)).value;
    const auto dist = [&](const MajoranaCovariance& g) {
      return block_magnetization_distribution(block_state_from_gamma(g));
    };
    const auto p0 = dist(g0);
    const auto pp = dist(gp), pm = dist(gm);
    std::vector<double> dp(p0.size());
    for (std::size_t i = 0; i < dp.size(); ++i) dp[i] = (pp[i] - pm[i]) / (2 * dh);
    const double fc = metrology::cfi(p0, dp).value;
    CHECK(fc <= fq + 1e-10);
  }
}

TEST_SUITE_END();

#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sense/ed.hpp"
#include "sense/freefermion.hpp"

using namespace sense;
using namespace sense::freefermion;
using std::numbers::pi;

namespace {
ValidatedParams make(double h0, double h1, double tau, int N,
                     PulseShape pulse = PulseShape::delta_kick()) {
  ModelParams p;
  p.J = 1.0;
  p.h0 = h0;
  p.h1 = h1;
  p.tau = tau;
  p.N = N;
  p.pulse = pulse;
  return validate(p);
}
}  // namespace

TEST_SUITE_BEGIN("freefermion");

TEST_CASE("no kick reduces to the static mode evolution") {
  const auto p = make(0.7, 0.0, 0.3, 8);
  for (double k : kgrid(8)) {
    const auto U = period_propagator(p, k);
    const auto Us = rotation(static_mode(p, k).field, p->tau);
    CHECK((U - Us).norm() < 1e-14);
  }
}

TEST_CASE("full-width square pulse is a single static field") {
  ModelParams mp;
  mp.h0 = 0.4;
  mp.h1 = 0.25;
  mp.tau = 0.3;
  mp.N = 8;
  mp.pulse = PulseShape::square(mp.tau);
  const auto p = validate(mp);
  for (double k : kgrid(8)) {
    const Eigen::Vector3d f =
        static_mode(p, k).field + Eigen::Vector3d(0, 0, -2.0 * mp.h1);
    CHECK((period_propagator(p, k) - rotation(f, mp.tau)).norm() < 1e-14);
  }
}

TEST_CASE("delta kick agrees with a narrowly sliced square pulse") {
  const auto p = make(0.5, 0.3, 0.2, 8);
  const double k = pi / 2;
  const auto U = period_propagator(p, k);
  // the finite pulse width carries an O(w) reordering error; first order in w
  const double e4 = (U - oracles::sliced_delta_propagator(p, k, 10000)).norm();
  const double e5 = (U - oracles::sliced_delta_propagator(p, k, 100000)).norm();
  CHECK(e4 / e5 == doctest::Approx(10.0).epsilon(0.05));
  CHECK((U - oracles::sliced_delta_propagator(p, k, 1000000)).norm() < 1e-6);
}

TEST_CASE("propagators are unitary") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const bool square = trial % 2;
    ModelParams mp;
    mp.h0 = 2.0 * u(eng);
    mp.h1 = u(eng);
    mp.tau = 0.05 + 0.9 * u(eng);
    mp.N = 16;
    if (square) mp.pulse = PulseShape::square(mp.tau * (0.1 + 0.9 * u(eng)));
    const auto p = validate(mp);
    for (double k : kgrid(mp.N)) {
      const auto U = period_propagator(p, k);
      CHECK((U.adjoint() * U - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    }
  }
}

TEST_CASE("floquet extraction reproduces the propagator and its spectrum") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ModeState up;
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = make(2 * u(eng), u(eng), 0.05 + 0.9 * u(eng), 12);
    for (double k : kgrid(12)) {
      const auto fm = floquet_mode(p, k, up);
      if (fm.degenerate) continue;
      // exp(-i eps tau n.sigma) == U up to a global phase (here exactly)
      const auto R = rotation(fm.axis * fm.quasi_energy, p->tau);
      CHECK((R - fm.U).norm() < 1e-10);
      // eigenphases are -/+ eps tau
      const Eigen::Vector2cd ep = fm.U * fm.plus;
      const Eigen::Vector2cd em = fm.U * fm.minus;
      const complex lp = std::polar(1.0, -fm.quasi_energy * p->tau);
      const complex lm = std::polar(1.0, +fm.quasi_energy * p->tau);
      CHECK((ep - lp * fm.plus).norm() < 1e-10);
      CHECK((em - lm * fm.minus).norm() < 1e-10);
      // normalized overlaps
      CHECK(std::norm(fm.r_plus) + std::norm(fm.r_minus) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("quasi-energy matches the two-rotation composition formula") {
  const auto p = make(0.191, 0.161, 0.2, 16);
  for (double k : kgrid(16)) {
    const auto fm = floquet_mode(p, k, ModeState{});
    const Eigen::Vector3d b = static_mode(p, k).field;
    const double a1 = 2.0 * p->h1;               // kick angle about -z
    const Eigen::Vector3d n1(0, 0, -1);
    const double a2 = b.norm() * p->tau;
    const Eigen::Vector3d n2 = b.normalized();
    const double c = std::cos(a1) * std::cos(a2) - n1.dot(n2) * std::sin(a1) * std::sin(a2);
    CHECK(std::cos(fm.quasi_energy * p->tau) == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("static limit: quasi-energy equals the folded mode energy") {
  const auto p = make(0.6, 0.0, 0.2, 8);
  for (double k : kgrid(8)) {
    const auto fm = floquet_mode(p, k, ModeState{});
    const Eigen::Vector3d b = static_mode(p, k).field;
    CHECK(fm.quasi_energy == doctest::Approx(b.norm()).epsilon(1e-12));  // |b| tau < pi here
    CHECK((fm.axis - b.normalized()).norm() < 1e-10);
  }
}

TEST_CASE("evolution basics") {
  const auto p = make(1.0, 0.1, 0.2, 8);
  const auto m0 = evolve_modes(p, InitialState::polarized_up(), 0);
  for (const auto& m : m0) {
    CHECK(m.amp[0] == complex(1.0, 0.0));
    CHECK(m.amp[1] == complex(0.0, 0.0));
  }
  CHECK(magnetization(p, m0) == doctest::Approx(1.0).epsilon(1e-14));

  // vanishing coupling: the field commutes with sz, m_z stays 1
  ModelParams mp;
  mp.J = 1e-14;
  mp.h0 = 0.7;
  mp.h1 = 0.3;
  mp.tau = 0.2;
  mp.N = 8;
  const auto pj = validate(mp);
  const auto mn = evolve_modes(pj, InitialState::polarized_up(), 37);
  CHECK(magnetization(pj, mn) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("polarized initial state is the fermion vacuum") {
  const auto p = make(1.0, 0.1, 0.2, 8);
  const auto cd = correlators_at(p, initial_modes(p, InitialState::polarized_up()), 4);
  CHECK(cd.C.norm() == doctest::Approx(0.0));
  CHECK(cd.I.norm() == doctest::Approx(0.0));
}

TEST_CASE("occupations stay within [0, 1]") {
  const auto p = make(0.8, 0.35, 0.4, 16);
  StroboscopicEvolution ev(p, InitialState::polarized_up());
  for (long n : {1L, 13L, 200L, 4111L}) {
    const auto cd = correlators_at(p, ev.at(n), 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(std::imag(cd.C(i, i))) < 1e-12);
      CHECK(std::real(cd.C(i, i)) >= -1e-12);
      CHECK(std::real(cd.C(i, i)) <= 1.0 + 1e-12);
    }
    // C Hermitian, I antisymmetric
    CHECK((cd.C - cd.C.adjoint()).norm() < 1e-10);
    CHECK((cd.I + cd.I.transpose()).norm() < 1e-10);
  }
}

TEST_CASE("ground state of the undriven chain is stationary") {
  const auto p = make(0.65, 0.0, 0.25, 64);
  const auto ini = InitialState::ground_state();
  StroboscopicEvolution ev(p, ini);
  const auto c0 = correlators_at(p, ev.at(0), 4);
  for (long n : {1L, 17L, 400L}) {
    const auto cn = correlators_at(p, ev.at(n), 4);
    CHECK((cn.C - c0.C).norm() < 1e-10);
    CHECK((cn.I - c0.I).norm() < 1e-10);
  }
  // and the dephased steady state equals it too
  const auto cs = steady_correlators(p, ini, 4);
  CHECK((cs.C - c0.C).norm() < 1e-10);
  CHECK((cs.I - c0.I).norm() < 1e-10);
}

TEST_CASE("ground state matches the ED ground state") {
  ed::EDParams ep;
  ep.N = 8;
  ep.h0 = 0.6;
  ep.tau = 0.2;
  ep.periodic = true;
  const Eigen::MatrixXd H = ed::build_hamiltonian(ep, ep.h0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  ed::EDState gs;
  gs.psi = es.eigenvectors().col(0).cast<complex>();
  const auto cd_ed = ed::correlators_ed(gs, ep.N, 4);

  const auto p = make(0.6, 0.0, 0.2, 8);
  const auto cd = correlators_at(p, initial_modes(p, InitialState::ground_state()), 4);
  CHECK((cd.C - cd_ed.C).norm() < 1e-10);
  CHECK((cd.I - cd_ed.I).norm() < 1e-10);
}

TEST_CASE("stroboscopic dynamics matches exact diagonalization") {
  for (int N : {4, 8}) {
    const auto p = make(1.0, 0.1, 0.2, N);
    ed::EDParams ep;
    ep.N = N;
    ep.h0 = 1.0;
    ep.h1 = 0.1;
    ep.tau = 0.2;
    ep.periodic = true;
    auto s = ed::polarized_up(N);
    const ed::KickedEvolver ev(ep);
    StroboscopicEvolution ff(p, InitialState::polarized_up());
    const int L = N / 2;
    for (long n = 0; n <= 30; ++n) {
      if (n > 0) ev.step(s.psi);
      const auto modes = ff.at(n);
      CHECK(magnetization(p, modes) ==
            doctest::Approx(ed::magnetization_ed(s, N)).epsilon(1e-9));
      const auto cff = correlators_at(p, modes, L);
      const auto ced = ed::correlators_ed(s, N, L);
      CHECK((cff.C - ced.C).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((cff.I - ced.I).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("thermal modes: infinite temperature is maximally mixed") {
  const auto p = make(0.8, 0.2, 0.2, 16);
  const auto modes = initial_modes(p, InitialState::thermal(0.0));
  CHECK(magnetization(p, modes) == doctest::Approx(0.0).epsilon(1e-14));
  const auto cd = correlators_at(p, modes, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::real(cd.C(i, i)) == doctest::Approx(0.5).epsilon(1e-12));
  // beta -> infinity approaches the ground state
  const auto cold = initial_modes(p, InitialState::thermal(200.0));
  const auto gs = initial_modes(p, InitialState::ground_state());
  CHECK((correlators_at(p, cold, 3).C - correlators_at(p, gs, 3).C).norm() < 1e-8);
}

TEST_CASE("thermal evolution preserves trace and hermiticity") {
  const auto p = make(0.5, 0.3, 0.2, 8);
  StroboscopicEvolution ev(p, InitialState::thermal(1.0));
  for (long n : {1L, 25L}) {
    for (const auto& m : ev.at(n)) {
      CHECK(std::abs(m.rho.trace().real() - 1.0) < 1e-12);
      CHECK((m.rho - m.rho.adjoint()).norm() < 1e-12);
    }
  }
}

TEST_CASE("floquet gap: closed line and open plateau") {
  // on the zero-gap line the residual is the k-grid discretization floor
  const auto pline = make(0.191, 0.2 * (1.0 - 0.191), 0.2, 2000);
  const auto g = floquet_gap(pline);
  CHECK(g.gap < 4.0 * pi / 2000 * 1.05);
  CHECK(g.k_min == doctest::Approx(pi / 2000).epsilon(1e-12));
  // the floor shrinks like 1/N
  const auto g2 = floquet_gap(make(0.191, 0.2 * (1.0 - 0.191), 0.2, 8000));
  CHECK(g2.gap < g.gap / 3.0);

  // away from the line the gap is O(1)
  CHECK(floquet_gap(make(0.6, 0.2, 0.2, 2000)).gap > 0.05);

  // undriven critical chain: gap closes with N
  const auto gc1 = floquet_gap(make(1.0, 0.0, 0.2, 1000));
  const auto gc2 = floquet_gap(make(1.0, 0.0, 0.2, 4000));
  CHECK(gc2.gap < gc1.gap / 3.5);
}

TEST_CASE("gap line: numeric minimum sits on the analytic line") {
  ModelParams base;
  base.tau = 0.2;
  base.N = 2000;
  const auto pts = gap_line(base, {1.0, 0.83, 0.3});
  CHECK(pts[0].h1_analytic == doctest::Approx(0.0));
  CHECK(std::abs(pts[0].h1_numeric) < 2e-3);
  CHECK(pts[1].h1_analytic == doctest::Approx(0.034).epsilon(1e-12));
  CHECK(std::abs(pts[1].h1_numeric - pts[1].h1_analytic) < 1e-3);
  CHECK(std::abs(pts[2].h1_numeric - pts[2].h1_analytic) < 1e-3);
}

TEST_CASE("steady correlators reject thermal initial states") {
  const auto p = make(0.5, 0.1, 0.2, 16);
  CHECK_THROWS_AS(steady_correlators(p, InitialState::thermal(1.0), 2), InvalidParams);
}

TEST_SUITE_END();

#include "sense/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "sense/ed.hpp"
#include "sense/gaussian.hpp"
#include "sense/metrology.hpp"
#include "sense/model.hpp"
#include "sense/rng.hpp"

namespace sense::experiments {

using io::Config;
using io::ResultTable;

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

ValidatedParams params_from(const Config& c) {
  ModelParams p;
  p.J = c.get_double("J", 1.0);
  p.h0 = c.get_double("h0");
  p.h1 = c.get_double("h1", 0.0);
  p.tau = c.get_double("jtau") / p.J;
  p.N = static_cast<int>(c.get_long("N", 2000));
  const std::string pulse = c.get_str("pulse", "delta");
  if (pulse == "delta") {
    p.pulse = PulseShape::delta_kick();
  } else if (pulse == "square") {
    p.pulse = PulseShape::square(c.get_double("pulse.w_frac", 0.5) * p.tau);
  } else {
    throw io::ConfigError("pulse must be delta or square", {"pulse"});
  }
  p.allow_long_period = c.get_bool("allow_long_period", false);
  return validate(p);
}

InitialState initial_from(const Config& c) {
  const std::string kind = c.get_str("initial", "polarized");
  if (kind == "polarized") return InitialState::polarized_up();
  if (kind == "ground") {
    std::optional<double> at;
    if (c.has("initial.h0_gs")) at = c.get_double("initial.h0_gs");
    return InitialState::ground_state(at);
  }
  if (kind == "thermal") return InitialState::thermal(c.get_double("initial.beta"));
  throw io::ConfigError("initial must be polarized, ground or thermal", {"initial"});
}

ed::EDParams ed_params_from(const Config& c) {
  ed::EDParams p;
  p.N = static_cast<int>(c.get_long("N", 13));
  const std::string a = c.get_str("alpha", "inf");
  p.alpha = (a == "inf" || a == "infinity") ? ed::kAlphaInf : std::stod(a);
  p.J = c.get_double("J", 1.0);
  p.h0 = c.get_double("h0");
  p.h1 = c.get_double("h1", 0.0);
  p.tau = c.get_double("jtau") / p.J;
  p.periodic = c.get_bool("periodic", false);
  const std::string pulse = c.get_str("pulse", "delta");
  if (pulse == "square") p.pulse = PulseShape::square(c.get_double("pulse.w_frac", 0.5) * p.tau);
  ed::validate_ed(p);
  return p;
}

std::vector<double> linspace(double lo, double hi, long steps) {
  std::vector<double> v(steps);
  for (long i = 0; i < steps; ++i)
    v[i] = steps == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(steps - 1);
  return v;
}

std::vector<double> grid_from(const Config& c, const std::string& prefix) {
  return linspace(c.get_double(prefix + ".min"), c.get_double(prefix + ".max"),
                  c.get_long(prefix + ".steps"));
}

// steady (dephased) block QFI and magnetization at one parameter point
struct SteadyPoint {
  double fq = 0.0;
  double mz = 0.0;
};

SteadyPoint steady_point(const ValidatedParams& p, const InitialState& ini, int L, double dh) {
  using namespace freefermion;
  using namespace gaussian;
  const CorrelationData c0 = steady_correlators(p, ini, L);
  const CorrelationData cp = steady_correlators(with_h1(p, p->h1 + dh), ini, L);
  const CorrelationData cm = steady_correlators(with_h1(p, p->h1 - dh), ini, L);
  const MajoranaCovariance g0 = gamma_from_correlators(c0, p->h1);
  const Eigen::MatrixXcd dg =
      (gamma_from_correlators(cp).gamma - gamma_from_correlators(cm).gamma) / (2 * dh);
  SteadyPoint out;
  out.fq = qfi_from_gamma(g0, dg).value;
  double occ = 0.0;
  for (int i = 0; i < L; ++i) occ += std::real(c0.C(i, i));
  out.mz = 1.0 - 2.0 * occ / L;
  return out;
}

// Gamma-route QFI of an L-block at stroboscopic time n, from three evolutions
struct TriEvolution {
  TriEvolution(const ValidatedParams& p, const InitialState& ini, double dh)
      : dh_(dh),
        p0_(p),
        e0_(p, ini),
        ep_(with_h1(p, p->h1 + dh), ini),
        em_(with_h1(p, p->h1 - dh), ini) {}

  gaussian::MajoranaCovariance gamma(const freefermion::StroboscopicEvolution& e, long n,
                                     int L) const {
    return gaussian::gamma_from_correlators(
        freefermion::correlators_at(p0_, e.at(n), L), p0_->h1);
  }

  double fq_at(long n, int L) const {
    const auto g0 = gamma(e0_, n, L);
    const Eigen::MatrixXcd dg = (gamma(ep_, n, L).gamma - gamma(em_, n, L).gamma) / (2 * dh_);
    return gaussian::qfi_from_gamma(g0, dg).value;
  }

  // block magnetization CFI; requires explicit reconstruction
  double fc_at(long n, int L) const {
    const auto dist = [&](const freefermion::StroboscopicEvolution& e) {
      return gaussian::block_magnetization_distribution(
          gaussian::block_state_from_gamma(gamma(e, n, L)));
    };
    const auto p0 = dist(e0_);
    const auto pp = dist(ep_);
    const auto pm = dist(em_);
    std::vector<double> dp(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) dp[i] = (pp[i] - pm[i]) / (2 * dh_);
    return metrology::cfi(p0, dp).value;
  }

  double mz_at(long n) const { return freefermion::magnetization(p0_, e0_.at(n)); }

  double dh_;
  ValidatedParams p0_;
  freefermion::StroboscopicEvolution e0_, ep_, em_;
};

void echo_meta(ResultTable& t, const Config& c, double walltime_s) {
  t.meta.emplace_back("sense.version", kVersion);
  for (const auto& [k, v] : c.entries()) t.meta.emplace_back(k, v);
  std::ostringstream os;
  os << walltime_s;
  t.meta.emplace_back("sense.walltime_s", os.str());
}

}  // namespace

ResultTable evolve(const Config& c, int threads) {
  const auto p = params_from(c);
  const auto ini = initial_from(c);
  const int L = static_cast<int>(c.get_long("L"));
  const long n_min = c.get_long("n_min", 0);
  const long n_max = c.get_long("n_max", 4400);
  const long stride = c.get_long("n_stride", 1);
  const bool emit_cfi = c.get_bool("emit_cfi", false);
  const double dh = c.get_double("dh1", 1e-3);

  const TriEvolution tri(p, ini, dh);
  std::vector<long> ns;
  for (long n = n_min; n <= n_max; n += stride) ns.push_back(n);

  ResultTable t;
  t.columns = {"n", "t", "mz", "fq"};
  if (emit_cfi) t.columns.push_back("fc");
  t.rows.resize(ns.size());
  parallel_for(static_cast<long>(ns.size()), threads, [&](long i) {
    const long n = ns[i];
    std::vector<double> row = {double(n), n * p->tau, tri.mz_at(n), tri.fq_at(n, L)};
    if (emit_cfi) row.push_back(tri.fc_at(n, L));
    t.rows[i] = std::move(row);
  });
  return t;
}

ResultTable gap_scan(const Config& c, int threads) {
  const auto h0s = grid_from(c, "h0");
  const auto h1s = grid_from(c, "h1");
  ModelParams base = params_from(c).get();

  ResultTable t;
  t.columns = {"h0", "h1", "gap", "argmin_k"};
  t.rows.resize(h0s.size() * h1s.size());
  parallel_for(static_cast<long>(t.rows.size()), threads, [&](long i) {
    ModelParams q = base;
    q.h0 = h0s[i / h1s.size()];
    q.h1 = h1s[i % h1s.size()];
    const auto g = freefermion::floquet_gap(validate(q));
    t.rows[i] = {q.h0, q.h1, g.gap, g.k_min};
  });
  return t;
}

ResultTable qfi_scan(const Config& c, int threads) {
  const auto h0s = grid_from(c, "h0");
  const auto h1s = grid_from(c, "h1");
  const int L = static_cast<int>(c.get_long("L"));
  const double dh = c.get_double("dh1", 1e-3);
  const auto ini = initial_from(c);
  ModelParams base = params_from(c).get();

  ResultTable t;
  t.columns = {"h0", "h1", "fqss", "mzss"};
  t.rows.resize(h0s.size() * h1s.size());
  parallel_for(static_cast<long>(t.rows.size()), threads, [&](long i) {
    ModelParams q = base;
    q.h0 = h0s[i / h1s.size()];
    q.h1 = h1s[i % h1s.size()];
    const auto sp = steady_point(validate(q), ini, L, dh);
    t.rows[i] = {q.h0, q.h1, sp.fq, sp.mz};
  });
  return t;
}

ResultTable gap_line_table(const Config& c, int /*threads*/) {
  const auto h0s = grid_from(c, "h0");
  ModelParams base = params_from(c).get();
  const double h1_max = c.get_double("h1.max", 0.0);
  ResultTable t;
  t.columns = {"h0", "h1_analytic", "h1_numeric", "gap_at_numeric"};
  for (const auto& pt : freefermion::gap_line(base, h0s, h1_max))
    t.add_row({pt.h0, pt.h1_analytic, pt.h1_numeric, pt.gap_at_numeric});
  return t;
}

ResultTable scale(const Config& c, int threads) {
  const auto p = params_from(c);
  const auto ini = initial_from(c);
  const int L_min = static_cast<int>(c.get_long("L.min", 1));
  const int L_max = static_cast<int>(c.get_long("L.max", 50));
  const long n_min = c.get_long("window.n_min", 4000);
  const long n_max = c.get_long("window.n_max", 4400);
  const long stride = c.get_long("window.stride", 1);
  const double dh = c.get_double("dh1", 1e-3);
  const std::string route = c.get_str("route", "timeavg");

  std::vector<double> fss(L_max + 1, 0.0);
  if (route == "timeavg") {
    // Eq.-style window average of the time-dependent QFI series
    const TriEvolution tri(p, ini, dh);
    std::vector<long> ns;
    for (long n = n_min; n <= n_max; n += stride) ns.push_back(n);
    std::vector<std::vector<double>> acc(ns.size());
    parallel_for(static_cast<long>(ns.size()), threads, [&](long i) {
      // one pass per time: build Gammas at L_max once, then take sub-blocks
      const auto g0 = tri.gamma(tri.e0_, ns[i], L_max);
      const auto gp = tri.gamma(tri.ep_, ns[i], L_max);
      const auto gm = tri.gamma(tri.em_, ns[i], L_max);
      std::vector<double> local(L_max + 1, 0.0);
      for (int L = L_min; L <= L_max; ++L) {
        gaussian::MajoranaCovariance gl{g0.gamma.topLeftCorner(2 * L, 2 * L), L, g0.h1_tag};
        const Eigen::MatrixXcd dg = (gp.gamma.topLeftCorner(2 * L, 2 * L) -
                                     gm.gamma.topLeftCorner(2 * L, 2 * L)) /
                                    (2 * dh);
        local[L] = gaussian::qfi_from_gamma(gl, dg).value;
      }
      acc[i] = std::move(local);
    });
    for (const auto& loc : acc)
      for (int L = L_min; L <= L_max; ++L) fss[L] += loc[L];
    for (int L = L_min; L <= L_max; ++L) fss[L] /= static_cast<double>(acc.size());
  } else if (route == "dephased") {
    using namespace freefermion;
    const CorrelationData c0 = steady_correlators(p, ini, L_max);
    const CorrelationData cp = steady_correlators(with_h1(p, p->h1 + dh), ini, L_max);
    const CorrelationData cm = steady_correlators(with_h1(p, p->h1 - dh), ini, L_max);
    for (int L = L_min; L <= L_max; ++L) {
      freefermion::CorrelationData cl;
      cl.C = c0.C.topLeftCorner(L, L);
      cl.I = c0.I.topLeftCorner(L, L);
      const auto g0 = gaussian::gamma_from_correlators(cl, p->h1);
      freefermion::CorrelationData clp, clm;
      clp.C = cp.C.topLeftCorner(L, L);
      clp.I = cp.I.topLeftCorner(L, L);
      clm.C = cm.C.topLeftCorner(L, L);
      clm.I = cm.I.topLeftCorner(L, L);
      const Eigen::MatrixXcd dg = (gaussian::gamma_from_correlators(clp).gamma -
                                   gaussian::gamma_from_correlators(clm).gamma) /
                                  (2 * dh);
      fss[L] = gaussian::qfi_from_gamma(g0, dg).value;
    }
  } else {
    throw io::ConfigError("route must be timeavg or dephased", {"route"});
  }

  ResultTable t;
  t.columns = {"L", "fqss"};
  std::vector<std::pair<double, double>> pts;
  for (int L = L_min; L <= L_max; ++L) {
    t.add_row({double(L), fss[L]});
    pts.emplace_back(L, fss[L]);
  }
  const auto fit = metrology::fit_scaling(pts);
  std::ostringstream a, e, r;
  a << fit.A;
  e << fit.eta;
  r << fit.residual;
  t.meta.emplace_back("fit.A", a.str());
  t.meta.emplace_back("fit.eta", e.str());
  t.meta.emplace_back("fit.residual", r.str());
  return t;
}

ResultTable square_pulse_scan(const Config& c, int threads) {
  Config cc = c;
  cc.set("pulse", "square");
  const auto h0s = grid_from(c, "h0");
  const auto h1s = grid_from(c, "h1");
  const int L = static_cast<int>(c.get_long("L"));
  const double dh = c.get_double("dh1", 1e-3);
  const auto ini = initial_from(c);
  ModelParams base = params_from(cc).get();

  ResultTable t;
  t.columns = {"h0", "h1", "fqss", "gap"};
  t.rows.resize(h0s.size() * h1s.size());
  parallel_for(static_cast<long>(t.rows.size()), threads, [&](long i) {
    ModelParams q = base;
    q.h0 = h0s[i / h1s.size()];
    q.h1 = h1s[i % h1s.size()];
    const auto vp = validate(q);
    const auto sp = steady_point(vp, ini, L, dh);
    t.rows[i] = {q.h0, q.h1, sp.fq, freefermion::floquet_gap(vp).gap};
  });
  return t;
}

ResultTable ed_evolve(const Config& c, int /*threads*/) {
  const auto p = ed_params_from(c);
  const int L = static_cast<int>(c.get_long("L"));
  const int first = static_cast<int>(c.get_long("block_first", (p.N - L) / 2));
  const long n_max = c.get_long("n_max", 1000);
  const long stride = c.get_long("n_stride", 1);
  const double dh = c.get_double("dh1", 1e-3);
  const bool emit_cfi = c.get_bool("emit_cfi", true);

  ed::EDParams pp = p, pm = p;
  pp.h1 += dh;
  pm.h1 -= dh;
  const ed::KickedEvolver ev0(p), evp(pp), evm(pm);
  ed::EDState s0 = ed::polarized_up(p.N), sp = s0, sm = s0;

  ResultTable t;
  t.columns = {"n", "t", "mz", "fq"};
  if (emit_cfi) t.columns.push_back("fc");
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) {
      ev0.step(s0.psi);
      evp.step(sp.psi);
      evm.step(sm.psi);
    }
    if (n % stride != 0) continue;
    const Eigen::MatrixXcd r0 = ed::partial_trace(s0, p.N, first, L);
    const Eigen::MatrixXcd rp = ed::partial_trace(sp, p.N, first, L);
    const Eigen::MatrixXcd rm = ed::partial_trace(sm, p.N, first, L);
    const Eigen::MatrixXcd dr = (rp - rm) / (2 * dh);
    std::vector<double> row = {double(n), n * p.tau, ed::magnetization_ed(s0, p.N),
                               metrology::qfi_spectral(r0, dr)};
    if (emit_cfi) {
      const auto dist = [L](const Eigen::MatrixXcd& r) {
        return gaussian::block_magnetization_distribution({r, L});
      };
      const auto d0 = dist(r0);
      const auto dp_ = dist(rp);
      const auto dm_ = dist(rm);
      std::vector<double> dpv(d0.size());
      for (std::size_t i = 0; i < d0.size(); ++i) dpv[i] = (dp_[i] - dm_[i]) / (2 * dh);
      row.push_back(metrology::cfi(d0, dpv).value);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

ResultTable estimate(const Config& c, int /*threads*/, std::uint64_t seed) {
  const auto p = ed_params_from(c);
  const int L = static_cast<int>(c.get_long("L", 4));
  const int first = static_cast<int>(c.get_long("block_first", (p.N - L) / 2));
  const double h1_true = c.get_double("h1_true", p.h1);
  const double prior_lo = c.get_double("prior.lo");
  const double prior_hi = c.get_double("prior.hi");
  const long grid_points = c.get_long("grid_points", 200);
  const long n_lo = c.get_long("window.n_lo", 401);
  const long n_hi = c.get_long("window.n_hi", 500);
  const double dh = c.get_double("dh1", 1e-3);
  const int R = static_cast<int>(c.get_long("R", 50));
  std::vector<double> Ms;
  if (c.has("M_list")) {
    Ms = c.get_list("M_list");
  } else {
    Ms = {1e3, 1e4};
  }

  // columns: the posterior grid, then the true point and its +-dh1 companions
  const std::vector<double> grid = linspace(prior_lo, prior_hi, grid_points);
  std::vector<double> h1cols = grid;
  h1cols.push_back(h1_true);
  h1cols.push_back(h1_true + dh);
  h1cols.push_back(h1_true - dh);

  ed::EDParams pstat = p;
  pstat.h1 = 0.0;  // static part is h1-independent; kicks are applied per column
  const ed::KickedEvolver ev(pstat);
  const long dim = 1L << p.N;
  ed::RowMatrixXcd cols = ed::RowMatrixXcd::Zero(dim, static_cast<long>(h1cols.size()));
  for (long j = 0; j < cols.cols(); ++j) cols(0, j) = 1.0;  // all-up

  // window-averaged block states per column
  std::vector<Eigen::MatrixXcd> rho_avg(h1cols.size(),
                                        Eigen::MatrixXcd::Zero(1L << L, 1L << L));
  long averaged = 0;
  for (long n = 1; n <= n_hi; ++n) {
    ev.step_block(cols, h1cols);
    if (n < n_lo) continue;
    ++averaged;
    for (std::size_t j = 0; j < h1cols.size(); ++j) {
      ed::EDState tmp;
      tmp.psi = cols.col(static_cast<long>(j));
      rho_avg[j] += ed::partial_trace(tmp, p.N, first, L);
    }
  }
  for (auto& r : rho_avg) r /= static_cast<double>(averaged);

  std::vector<std::vector<double>> model_p(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    model_p[g] = gaussian::block_magnetization_distribution({rho_avg[g], L});
  const auto p_true = gaussian::block_magnetization_distribution({rho_avg[grid.size()], L});
  const auto p_plus = gaussian::block_magnetization_distribution({rho_avg[grid.size() + 1], L});
  const auto p_minus =
      gaussian::block_magnetization_distribution({rho_avg[grid.size() + 2], L});
  std::vector<double> dp(p_true.size());
  for (std::size_t i = 0; i < dp.size(); ++i) dp[i] = (p_plus[i] - p_minus[i]) / (2 * dh);
  const double fc = metrology::cfi(p_true, dp).value;

  const auto model = [&](double h1) -> std::vector<double> {
    // grid points are the only admissible model inputs
    const auto it = std::lower_bound(grid.begin(), grid.end(), h1 - 1e-15);
    return model_p[static_cast<std::size_t>(it - grid.begin())];
  };
  const auto prior = [&](double) { return 1.0; };

  ResultTable t;
  t.columns = {"M", "variance", "mean_map", "crb"};
  for (double Md : Ms) {
    const long M = static_cast<long>(Md);
    const auto res = metrology::estimator_variance(R, seed, [&](std::uint64_t s) {
      const auto rec = metrology::simulate_measurements(p_true, M, s);
      return metrology::bayes_posterior(rec, model, prior, grid).map_h1;
    });
    t.add_row({double(M), res.variance, res.mean, 1.0 / (M * fc)});
  }
  std::ostringstream os;
  os << fc;
  t.meta.emplace_back("estimate.fc_true", os.str());
  return t;
}

ResultTable run(const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Config c = opt.config;
  if (opt.seed) c.set("seed", std::to_string(*opt.seed));
  const std::uint64_t seed =
      static_cast<std::uint64_t>(c.get_long("seed", 20240916));
  ResultTable t;
  if (opt.experiment == "evolve") {
    t = evolve(c, opt.threads);
  } else if (opt.experiment == "gap-scan") {
    t = gap_scan(c, opt.threads);
  } else if (opt.experiment == "qfi-scan") {
    t = qfi_scan(c, opt.threads);
  } else if (opt.experiment == "gap-line") {
    t = gap_line_table(c, opt.threads);
  } else if (opt.experiment == "scale") {
    t = scale(c, opt.threads);
  } else if (opt.experiment == "estimate") {
    t = estimate(c, opt.threads, seed);
  } else if (opt.experiment == "ed-evolve") {
    t = ed_evolve(c, opt.threads);
  } else if (opt.experiment == "square-pulse-scan") {
    t = square_pulse_scan(c, opt.threads);
  } else {
    throw io::ConfigError("unknown experiment: " + opt.experiment, {"experiment"});
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  echo_meta(t, c, wall);
  if (!opt.out_path.empty()) io::write_csv(t, opt.out_path);
  return t;
}

}  // namespace sense::experiments

#include "sense/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sense/model.hpp"
#include "sense/rng.hpp"

namespace sense::metrology {

double qfi_spectral(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& drho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      Eigen::MatrixXcd(0.5 * (rho + rho.adjoint())));
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd D = es.eigenvectors().adjoint() * drho * es.eigenvectors();
  double F = 0.0;
  for (long r = 0; r < lam.size(); ++r)
    for (long s = 0; s < lam.size(); ++s) {
      const double den = lam[r] + lam[s];
      if (den < 1e-12) continue;
      F += 2.0 * std::real(D(r, s) * D(s, r)) / den;
    }
  return F;
}

CfiResult cfi(const std::vector<double>& p, const std::vector<double>& dp) {
  if (p.size() != dp.size()) throw InvalidParams({"probability/derivative size mismatch"});
  CfiResult out;
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (p[r] > 1e-12) {
      out.value += dp[r] * dp[r] / p[r];
    } else if (std::abs(dp[r]) > 1e-8) {
      out.singular_outcome = true;
    }
  }
  return out;
}

double steady_average(const TimeSeries& series, long n_min, long n_max) {
  if (n_max <= n_min || n_min < 0) throw InvalidParams({"need n_max > n_min >= 0"});
  double acc = 0.0;
  for (long n = n_min; n <= n_max; ++n) acc += series.at(n);
  return acc / static_cast<double>(n_max - n_min + 1);
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw NonPositiveInput("need at least 3 points");
  for (const auto& [L, F] : points)
    if (!(L > 0) || !(F > 0)) throw NonPositiveInput("scaling fit requires positive inputs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [L, F] : points) {
    const double x = std::log(L), y = std::log(F);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  ScalingFit fit;
  fit.eta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double c = (sy - fit.eta * sx) / n;
  fit.A = std::exp(c);
  fit.L_min = std::numeric_limits<double>::infinity();
  for (const auto& [L, F] : points) {
    const double r = std::log(F) - (c + fit.eta * std::log(L));
    fit.residual += r * r;
    fit.L_min = std::min(fit.L_min, L);
    fit.L_max = std::max(fit.L_max, L);
  }
  return fit;
}

MeasurementRecord simulate_measurements(const std::vector<double>& dist, long M,
                                        std::uint64_t seed) {
  if (M < 1) throw InvalidParams({"sample count must be >= 1"});
  for (double p : dist)
    if (p < -1e-12) throw InvalidParams({"negative probability"});
  MeasurementRecord rec;
  rec.counts.assign(dist.size(), 0);
  rec.total = M;
  Rng rng(seed);
  std::vector<double> w(dist.begin(), dist.end());
  for (double& x : w) x = std::max(x, 0.0);
  for (long i = 0; i < M; ++i) ++rec.counts[rng.categorical(w)];
  return rec;
}

Posterior bayes_posterior(const MeasurementRecord& record,
                          const std::function<std::vector<double>(double)>& model,
                          const std::function<double(double)>& prior,
                          const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidParams({"empty posterior grid"});
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> logp(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double pr = prior(grid[g]);
    if (!(pr > 0)) {
      logp[g] = neg_inf;
      continue;
    }
    logp[g] = std::log(pr);
    const std::vector<double> pk = model(grid[g]);
    if (pk.size() != record.counts.size())
      throw InvalidParams({"model outcome count does not match the record"});
    for (std::size_t k = 0; k < pk.size(); ++k) {
      if (record.counts[k] == 0) continue;
      if (!(pk[k] > 0)) {
        logp[g] = neg_inf;
        break;
      }
      logp[g] += record.counts[k] * std::log(pk[k]);
    }
  }
  const double mx = *std::max_element(logp.begin(), logp.end());
  if (mx == neg_inf) throw AllZeroLikelihood("likelihood vanishes on the whole grid");

  Posterior post;
  post.grid = grid;
  post.mass.resize(grid.size());
  double norm = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    post.mass[g] = logp[g] == neg_inf ? 0.0 : std::exp(logp[g] - mx);
    norm += post.mass[g];
    if (logp[g] != neg_inf) mn = std::min(mn, logp[g]);
  }
  for (double& m : post.mass) m /= norm;
  post.map_index = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (post.mass[g] > post.mass[post.map_index]) post.map_index = g;  // ties keep smaller h1
  post.map_h1 = grid[post.map_index];
  post.degenerate_map = (mx - mn) < 1e-12;
  return post;
}

VarianceResult estimator_variance(int repetitions, std::uint64_t master_seed,
                                  const std::function<double(std::uint64_t)>& pipeline) {
  if (repetitions < 2) throw InvalidParams({"variance needs at least 2 repetitions"});
  VarianceResult out;
  out.estimates.reserve(repetitions);
  for (int r = 0; r < repetitions; ++r)
    out.estimates.push_back(pipeline(derive_seed(master_seed, r)));
  for (double e : out.estimates) out.mean += e;
  out.mean /= repetitions;
  for (double e : out.estimates) out.variance += (e - out.mean) * (e - out.mean);
  out.variance /= (repetitions - 1);
  return out;
}

}  // namespace sense::metrology

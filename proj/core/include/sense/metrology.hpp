#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sense::metrology {

struct FisherResult {
  double value = 0.0;
  enum class Kind { Quantum, Classical } kind = Kind::Quantum;
  std::string context;
};

/// Spectral QFI of a density matrix,
///   F_Q = sum_{rs} 2 Re(<r|drho|s><s|drho|r>) / (lambda_r + lambda_s),
/// excluding pairs with lambda_r + lambda_s < 1e-12.
double qfi_spectral(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& drho);

struct CfiResult {
  double value = 0.0;
  bool singular_outcome = false;  // an outcome below threshold had |dp| > 1e-8
};

/// Classical Fisher information sum (dp_r)^2 / p_r over outcomes with p_r > 1e-12.
CfiResult cfi(const std::vector<double>& p, const std::vector<double>& dp);

/// Time series sampled at integer period counts starting from n_first.
struct TimeSeries {
  long n_first = 0;
  std::vector<double> values;
  double at(long n) const { return values.at(static_cast<std::size_t>(n - n_first)); }
};

/// Arithmetic mean of the series over n in [n_min, n_max] (inclusive).
double steady_average(const TimeSeries& series, long n_min = 4000, long n_max = 4400);

struct ScalingFit {
  double A = 0.0;
  double eta = 0.0;
  double residual = 0.0;  // sum of squared log residuals
  double L_min = 0.0, L_max = 0.0;
};

struct NonPositiveInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares power-law fit F = A L^eta on log-log axes; needs >= 3
/// strictly positive points.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

struct MeasurementRecord {
  std::vector<long> counts;  // per outcome, k = 1..L+1
  long total = 0;
};

/// Seeded multinomial draw of M samples from `dist` (reproducible).
MeasurementRecord simulate_measurements(const std::vector<double>& dist, long M,
                                        std::uint64_t seed);

struct Posterior {
  std::vector<double> grid;
  std::vector<double> mass;  // sums to 1
  std::size_t map_index = 0;
  double map_h1 = 0.0;
  bool degenerate_map = false;  // flat posterior, tie broken toward the grid start
};

struct AllZeroLikelihood : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grid posterior from a multinomial record; log-space accumulation
/// sum_k n_k log p_k(h1) plus log prior (the h1-independent multinomial
/// coefficient is dropped).
Posterior bayes_posterior(const MeasurementRecord& record,
                          const std::function<std::vector<double>(double)>& model,
                          const std::function<double(double)>& prior,
                          const std::vector<double>& grid);

struct VarianceResult {
  double variance = 0.0;  // unbiased sample variance of the MAP estimates
  double mean = 0.0;
  std::vector<double> estimates;
};

/// Runs `pipeline` R times with seeds derived from master_seed.
VarianceResult estimator_variance(int repetitions, std::uint64_t master_seed,
                                  const std::function<double(std::uint64_t)>& pipeline);

}  // namespace sense::metrology

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mimm/core/dependence.hpp"
#include "mimm/core/time_series.hpp"
#include "mimm/gaussian/params.hpp"
#include "mimm/mcle/mcle.hpp"

namespace mimm::oracle {

struct OlsArResult {
  ClassicalARParams classical;
  MinInfoARParams mininfo;
};

/// Least squares of x_t on (x_{t-1}, …, x_{t-d}) for t = d..n-1 with the
/// first d values held fixed; σ̂² = RSS/(n−d).
OlsArResult mle_ols_ar(const TimeSeries& series, int d);

struct OlsVarResult {
  ClassicalVARParams classical;
  std::optional<MinInfoVARParams> mininfo;  // d = 1 and stationary
};
OlsVarResult mle_ols_var(const TimeSeries& series, int d);

struct EnumerationBudget {
  std::size_t max_interior = 8;
};

/// H for every ordering of the interior, identity first.
struct EnumeratedStatistics {
  Matrix H;  // rows: orderings
  std::vector<std::vector<std::size_t>> orders;
  Vector observed() const { return H.row(0).transpose(); }
};

EnumeratedStatistics enumerate_statistics(const DependenceSpec& spec, const TimeSeries& series,
                                          const EnumerationBudget& budget = {});

/// log Σ_π exp(θᵀH_π).
double log_partition(const EnumeratedStatistics& stats, const ThetaVector& theta);
/// f(π|θ) for every enumerated ordering.
Vector conditional_probabilities(const EnumeratedStatistics& stats, const ThetaVector& theta);
/// Exact mean and covariance of H under f(·|θ).
Moments exact_moments(const EnumeratedStatistics& stats, const ThetaVector& theta);

/// f(id|θ) by exhaustive enumeration.
double exact_conditional_likelihood(const DependenceSpec& spec, const TimeSeries& series,
                                    const ThetaVector& theta, const EnumerationBudget& budget = {});

struct ExactCleResult {
  bool finite = true;
  ThetaVector theta;                // the maximizer when finite
  Vector divergence_direction;      // unit vector along which log f(id|θ) keeps rising
  int iterations = 0;
};

/// Newton ascent of log f(id|θ) with exact moments.
ExactCleResult exact_cle(const DependenceSpec& spec, const TimeSeries& series,
                         const EnumerationBudget& budget = {});
ExactCleResult exact_cle(const EnumeratedStatistics& stats);

/// Dense grid over [lo, hi] (K = 1) followed by golden-section refinement.
double grid_search_cle(const EnumeratedStatistics& stats, double lo, double hi,
                       std::size_t points);

/// Physicists' Gauss–Hermite rule (weight e^{−x²}) via Golub–Welsch.
void gauss_hermite(std::size_t nodes, Vector& x, Vector& w);

/// E_{x~N(0,τ²)}[∇²δ(x)] with 64-node quadrature and central differences of
/// δ(x) = (1+φ²)x²/(2σ²) + ½ log(2πσ²), (φ, σ²) from (θ, τ²).
Eigen::Matrix2d ar1_fisher_info_numeric(double theta, double tau2);

/// Exact Gaussian AR(1) log density of the ordered values, x_0 ~ N(0, τ²).
double ar1_log_density(std::span<const double> x, double phi, double sigma2);

}  // namespace mimm::oracle

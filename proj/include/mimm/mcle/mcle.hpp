#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mimm/core/dependence.hpp"
#include "mimm/core/permutation.hpp"
#include "mimm/core/time_series.hpp"
#include "mimm/error.hpp"

namespace mimm {

struct ExchangeConfig {
  std::size_t n_samples = 10000;     // L
  std::optional<std::size_t> burn_in;  // defaults to L/10
  std::size_t thin = 1;
  std::uint64_t seed = 1;

  std::size_t effective_burn_in() const { return burn_in.value_or(n_samples / 10); }
};

struct ExchangeResult {
  Matrix samples;  // L×K, row l is H of the l-th retained state
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
};

/// log ρ = θᵀδ for the statistic change δ of a proposed swap.
double log_ratio_swap(const ThetaVector& theta, const Vector& delta);

/// Metropolis–Hastings over interior transpositions targeting
/// f(π|θ) ∝ exp(θᵀH(π∘x)).  When `state` is given the chain starts from and
/// leaves its final ordering there.
ExchangeResult exchange_sample(const DependenceSpec& spec, const TimeSeries& series,
                               const ThetaVector& theta, const ExchangeConfig& config,
                               Permutation* state = nullptr, const Deadline& deadline = {});

struct ScoringConfig {
  int max_iters = 20;
  double grad_tol = 1e-6;
  double step_damping = 1.0;
  std::optional<double> ridge;  // defaults to 1e-8·tr(Ĝ)/K
  int max_halvings = 5;
};

struct McleResult {
  ThetaVector theta_hat;
  int iterations = 0;
  double final_acceptance_rate = 1.0;
  std::vector<double> score_norm_trace;       // entry 0 is at theta0
  std::vector<ThetaVector> theta_trace;       // aligned with score_norm_trace
  std::vector<double> acceptance_trace;       // aligned with score_norm_trace
  bool converged = false;
};

/// Mean and covariance of H under f(π|θ).
struct Moments {
  Vector mean;
  Matrix cov;
  double acceptance_rate = 1.0;
};
using MomentSource = std::function<Moments(const ThetaVector& theta)>;

/// θ ← θ + (Ĝ + ridge·I)⁻¹ (H_obs − μ̂) with moments from the exchange sampler;
/// the chain is carried over between iterations.
McleResult fisher_scoring(const DependenceSpec& spec, const TimeSeries& series,
                          const ThetaVector& theta0, const ExchangeConfig& exchange,
                          const ScoringConfig& scoring, const Deadline& deadline = {});

/// Same iteration with caller-supplied moments (e.g. exact enumeration).
McleResult fisher_scoring(const SufficientStatistic& observed, const ThetaVector& theta0,
                          const MomentSource& moments, const ScoringConfig& scoring,
                          const Deadline& deadline = {});

}  // namespace mimm

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mimm/core/dependence.hpp"
#include "mimm/core/time_series.hpp"
#include "mimm/error.hpp"

namespace mimm {

/// X_{(s1,s2)} = H(identity) − H(identity with s1, s2 exchanged).
struct PairStatistic {
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  Vector x;
};

PairStatistic pair_statistic(const DependenceSpec& spec, const TimeSeries& series, std::size_t s1,
                             std::size_t s2);

/// Σ log σ(θᵀx) over the pairs.
double log_pl(const ThetaVector& theta, std::span<const PairStatistic> pairs);
/// Gradient of log_pl: Σ σ(−θᵀx) x.
Vector log_pl_gradient(const ThetaVector& theta, std::span<const PairStatistic> pairs);

struct GdConfig {
  int max_epochs = 500;
  double lr0 = 1.0;
  double decay = 0.01;
  double tol = 1e-6;             // on the gradient norm of the mean objective
  double divergence_cap = 1e3;   // ‖θ‖ beyond this is reported as separation
  std::size_t threads = 1;
  std::size_t materialize_limit = std::size_t{1} << 24;  // doubles (K × pairs)
  bool keep_trace = false;
};

struct SgdConfig {
  double eta = 0.01;
  std::size_t n_iters = 10000;
  std::uint64_t seed = 1;
  bool evaluate_log_pl = true;  // all-pairs log_pl at the end, outside wall_time
};

struct PleResult {
  ThetaVector theta_hat;
  double log_pl = 0.0;
  std::size_t n_pairs_used = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool separation_warning = false;
  int epochs = 0;
  std::vector<double> objective_trace;  // mean objective per accepted epoch
};

/// Source of log_pl and its gradient over a fixed set of pairs.
class PairObjective {
 public:
  virtual ~PairObjective() = default;
  virtual std::size_t pair_count() const = 0;
  virtual std::size_t dim() const = 0;
  /// Returns Σ log σ(θᵀx) and writes Σ σ(−θᵀx) x into grad (when non-null).
  virtual double evaluate(const ThetaVector& theta, Vector* grad) const = 0;
  /// ¼ λ_max of the mean of x xᵀ, estimated from up to `limit` pairs.
  virtual double curvature_bound(std::size_t limit) const = 0;
};

/// All C(n−2d, 2) interior pairs; materialized when small enough, otherwise
/// recomputed per evaluation from per-position tables.
std::unique_ptr<PairObjective> all_pairs_objective(const DependenceSpec& spec,
                                                   const TimeSeries& series,
                                                   const GdConfig& config = {});
/// An explicit list of pairs.
std::unique_ptr<PairObjective> pair_list_objective(const DependenceSpec& spec,
                                                   const TimeSeries& series,
                                                   std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Uniform random perfect matching of the interior, ⌊(n−2d)/2⌋ pairs.
std::vector<std::pair<std::size_t, std::size_t>> bipartition_pairs(std::size_t n, std::size_t d,
                                                                   std::uint64_t seed);

/// Gradient ascent from θ = 0 on the mean of log σ(θᵀx).
PleResult maximize_pseudo_likelihood(const PairObjective& objective, const GdConfig& config,
                                     const Deadline& deadline = {});

PleResult fit_naive(const DependenceSpec& spec, const TimeSeries& series, const GdConfig& config = {},
                    const Deadline& deadline = {});
PleResult fit_bipartition(const DependenceSpec& spec, const TimeSeries& series, std::uint64_t seed,
                          const GdConfig& config = {}, const Deadline& deadline = {});
PleResult fit_online_sgd(const DependenceSpec& spec, const TimeSeries& series,
                         const SgdConfig& config = {}, const Deadline& deadline = {});

struct InformationCriteria {
  double aic = 0.0;
  double pic = 0.0;
};

/// AIC = −2 log_pl + 2K, PIC = −2 log_pl + K ln C(n−2d, 2).
InformationCriteria aic_pic(double log_pl_at_opt, int K, std::size_t n, int d);

}  // namespace mimm

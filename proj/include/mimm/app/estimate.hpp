#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mimm/core/dependence.hpp"
#include "mimm/core/time_series.hpp"
#include "mimm/error.hpp"
#include "mimm/mcle/mcle.hpp"
#include "mimm/ple/ple.hpp"

namespace mimm::app {

enum class Estimator { mle, mcle, ple_naive, ple_bipartition, ple_sgd };

Estimator parse_estimator(std::string_view name);
const char* to_string(Estimator estimator) noexcept;

struct EstimatorOptions {
  GdConfig gd;
  SgdConfig sgd;
  ExchangeConfig exchange;
  ScoringConfig scoring;
  std::uint64_t seed = 1;  // bipartition matching, SGD pair stream, exchange chain
};

struct Estimate {
  ThetaVector theta;
  std::optional<double> log_pl;  // PLE flavors only
  std::size_t n_pairs_used = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool separation_warning = false;
  std::optional<double> acceptance_rate;  // MCLE only
  int iterations = 0;
  std::optional<McleResult> mcle;  // per-iteration traces for diagnostics
};

/// Runs one estimator on one series.  MLE is the OLS fit and accepts only the
/// AR(d) spec on univariate data or the x_t ⊗ x_{t-1} spec on VAR(1) data.
Estimate estimate(Estimator estimator, const DependenceSpec& spec, const TimeSeries& series,
                  const EstimatorOptions& options, const Deadline& deadline = {});

/// θ in the order of the x_t ⊗ x_{t-1} spec: θ[i·p + j] multiplies x_{t,i} x_{t-1,j},
/// which is Θ(j, i).
Vector var1_theta_vector(const Matrix& Theta);

/// Exit code for an error kind: 2 validation-type, 3 numerical, 4 timeout.
int exit_code(ErrorKind kind) noexcept;

}  // namespace mimm::app

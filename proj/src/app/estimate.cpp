#include "mimm/app/estimate.hpp"

#include <chrono>

#include "mimm/oracle/oracle.hpp"

namespace mimm::app {

Estimator parse_estimator(std::string_view name) {
  if (name == "mle") return Estimator::mle;
  if (name == "mcle") return Estimator::mcle;
  if (name == "ple-naive") return Estimator::ple_naive;
  if (name == "ple-bipartition") return Estimator::ple_bipartition;
  if (name == "ple-sgd") return Estimator::ple_sgd;
  fail(ErrorKind::validation, "unknown estimator '" + std::string(name) +
                                  "' (expected mle, mcle, ple-naive, ple-bipartition or ple-sgd)");
}

const char* to_string(Estimator estimator) noexcept {
  switch (estimator) {
    case Estimator::mle: return "mle";
    case Estimator::mcle: return "mcle";
    case Estimator::ple_naive: return "ple-naive";
    case Estimator::ple_bipartition: return "ple-bipartition";
    case Estimator::ple_sgd: return "ple-sgd";
  }
  return "?";
}

Vector var1_theta_vector(const Matrix& Theta) {
  const auto p = Theta.rows();
  Vector out(p * p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out[i * p + j] = Theta(j, i);
  }
  return out;
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::no_solution_found:
    case ErrorKind::ill_conditioned:
    case ErrorKind::unbounded_likelihood:
    case ErrorKind::internal:
      return 3;
    case ErrorKind::timeout:
      return 4;
    default:
      return 2;
  }
}

namespace {

Estimate from_ple(const PleResult& r) {
  Estimate e;
  e.theta = r.theta_hat;
  e.log_pl = r.log_pl;
  e.n_pairs_used = r.n_pairs_used;
  e.wall_time_s = r.wall_time_s;
  e.converged = r.converged;
  e.separation_warning = r.separation_warning;
  e.iterations = r.epochs;
  return e;
}

Estimate fit_mle(const DependenceSpec& spec, const TimeSeries& series) {
  const int d = spec.order();
  const auto start = std::chrono::steady_clock::now();
  Estimate e;
  if (series.dim() == 1 && spec == ar_spec(d)) {
    e.theta = oracle::mle_ols_ar(series, d).mininfo.theta;
  } else {
    const KronLag lag1{};
    const int p = static_cast<int>(series.dim());
    require(d == 1 && spec == kron_spec(p, std::span(&lag1, 1)), ErrorKind::validation,
            "mle applies only to the AR(d) spec on univariate data or the x_t (x) x_{t-1} spec");
    const auto ols = oracle::mle_ols_var(series, 1);
    require(ols.mininfo.has_value(), ErrorKind::stationarity,
            "OLS VAR(1) estimate is not stationary, no minimum-information form");
    e.theta = var1_theta_vector(ols.mininfo->Theta);
  }
  e.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  e.converged = true;
  e.n_pairs_used = 0;
  return e;
}

}  // namespace

Estimate estimate(Estimator estimator, const DependenceSpec& spec, const TimeSeries& series,
                  const EstimatorOptions& options, const Deadline& deadline) {
  require(spec.dim() == static_cast<int>(series.dim()), ErrorKind::shape,
          "spec dim " + std::to_string(spec.dim()) + " differs from data dim " +
              std::to_string(series.dim()));
  switch (estimator) {
    case Estimator::mle:
      return fit_mle(spec, series);
    case Estimator::mcle: {
      ExchangeConfig ex = options.exchange;
      ex.seed = options.seed;
      const auto start = std::chrono::steady_clock::now();
      const McleResult r = fisher_scoring(spec, series, ThetaVector::Zero(static_cast<Eigen::Index>(spec.size())),
                                          ex, options.scoring, deadline);
      Estimate e;
      e.theta = r.theta_hat;
      e.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      e.converged = r.converged;
      e.acceptance_rate = r.final_acceptance_rate;
      e.iterations = r.iterations;
      e.mcle = r;
      return e;
    }
    case Estimator::ple_naive:
      return from_ple(fit_naive(spec, series, options.gd, deadline));
    case Estimator::ple_bipartition:
      return from_ple(fit_bipartition(spec, series, options.seed, options.gd, deadline));
    case Estimator::ple_sgd: {
      SgdConfig cfg = options.sgd;
      cfg.seed = options.seed;
      return from_ple(fit_online_sgd(spec, series, cfg, deadline));
    }
  }
  fail(ErrorKind::internal, "unhandled estimator");
}

}  // namespace mimm::app

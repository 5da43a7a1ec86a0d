#include "mimm/mcle/mcle.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mimm/core/statistics.hpp"

namespace mimm {

double log_ratio_swap(const ThetaVector& theta, const Vector& delta) {
  require(theta.size() == delta.size(), ErrorKind::shape, "theta and delta lengths differ");
  return theta.dot(delta);
}

ExchangeResult exchange_sample(const DependenceSpec& spec, const TimeSeries& series,
                               const ThetaVector& theta, const ExchangeConfig& config,
                               Permutation* state, const Deadline& deadline) {
  const StatisticEvaluator eval(spec, series);
  const std::size_t n = series.length();
  const std::size_t d = eval.order();
  const std::size_t k = eval.size();
  require(theta.size() == static_cast<Eigen::Index>(k), ErrorKind::shape,
          "theta has " + std::to_string(theta.size()) + " entries, spec has K=" + std::to_string(k));
  require(theta.allFinite(), ErrorKind::validation, "theta must be finite");
  require(n >= 2 * d + 2, ErrorKind::insufficient_data,
          "exchange sampling needs at least two swappable positions (n - 2d >= 2)");
  require(config.n_samples >= 1 && config.thin >= 1, ErrorKind::validation,
          "exchange sampler needs L >= 1 and thin >= 1");

  Permutation local(n, d);
  Permutation& perm = state ? *state : local;
  require(perm.size() == n && perm.frozen() == d, ErrorKind::shape,
          "warm-start permutation does not match the series");

  std::mt19937_64 rng(config.seed);
  const std::size_t m = n - 2 * d;
  std::uniform_int_distribution<std::size_t> first(0, m - 1);
  std::uniform_int_distribution<std::size_t> second(0, m - 2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ExchangeResult out;
  out.samples.resize(static_cast<Eigen::Index>(config.n_samples), static_cast<Eigen::Index>(k));
  Vector h = eval.total(perm);
  Vector delta(static_cast<Eigen::Index>(k));

  const std::size_t burn = config.effective_burn_in();
  const std::size_t steps = burn + config.n_samples * config.thin;
  std::size_t recorded = 0;
  for (std::size_t step = 1; step <= steps; ++step) {
    if ((step & 0xfff) == 0) deadline.check("exchange sampler");
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    const std::size_t s1 = d + a;
    const std::size_t s2 = d + b;
    eval.delta_swap(perm, s1, s2, delta.data());
    const double log_rho = theta.dot(delta);
    ++out.proposals;
    if (log_rho >= 0.0 || std::log(unif(rng)) < log_rho) {
      perm.swap_positions(s1, s2);
      h += delta;
      ++out.accepted;
    }
    if (step > burn && (step - burn) % config.thin == 0) {
      // Recompute periodically so rounding in the running sum cannot drift.
      if (recorded % 256 == 0) h = eval.total(perm);
      out.samples.row(static_cast<Eigen::Index>(recorded++)) = h.transpose();
    }
  }
  out.acceptance_rate =
      static_cast<double>(out.accepted) / static_cast<double>(std::max<std::size_t>(out.proposals, 1));
  return out;
}

McleResult fisher_scoring(const SufficientStatistic& observed, const ThetaVector& theta0,
                          const MomentSource& moments, const ScoringConfig& scoring,
                          const Deadline& deadline) {
  const auto k = observed.size();
  require(theta0.size() == k, ErrorKind::shape, "theta0 length differs from K");
  require(scoring.grad_tol > 0, ErrorKind::validation, "grad_tol must be positive");
  require(scoring.step_damping > 0 && scoring.step_damping <= 1, ErrorKind::validation,
          "step_damping must lie in (0, 1]");
  require(!scoring.ridge || *scoring.ridge >= 0, ErrorKind::validation, "ridge must be >= 0");

  McleResult res;
  ThetaVector theta = theta0;
  Moments m = moments(theta);
  Vector score = observed - m.mean;
  double norm = score.norm();
  res.score_norm_trace.push_back(norm);
  res.theta_trace.push_back(theta);
  res.acceptance_trace.push_back(m.acceptance_rate);
  const double stop = scoring.grad_tol * (1.0 + observed.norm());

  for (int it = 0; it < scoring.max_iters; ++it) {
    if (norm < stop) {
      res.converged = true;
      break;
    }
    deadline.check("Fisher scoring");
    const double ridge = scoring.ridge.value_or(1e-8 * m.cov.trace() / static_cast<double>(k));
    const Matrix g = m.cov + ridge * Matrix::Identity(k, k);
    const Eigen::LDLT<Matrix> ldlt(g);
    const Vector step = ldlt.solve(score);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (ldlt.info() != Eigen::Success || !step.allFinite() || !(lo > 1e-14 * std::max(hi, 1e-300))) {
      char buf[160];
      std::snprintf(buf, sizeof buf, " (eigenvalues in [%.3e, %.3e], ridge %.3e)", lo, hi, ridge);
      fail(ErrorKind::ill_conditioned,
           "information matrix estimate is singular at iteration " + std::to_string(it + 1) + buf);
    }

    double scale = scoring.step_damping;
    ThetaVector cand;
    Moments mc;
    double nc = 0.0;
    for (int h = 0;; ++h) {
      cand = theta + scale * step;
      mc = moments(cand);
      nc = (observed - mc.mean).norm();
      if (nc <= norm || h >= scoring.max_halvings) break;
      scale *= 0.5;
    }
    theta = cand;
    m = std::move(mc);
    score = observed - m.mean;
    norm = nc;
    res.score_norm_trace.push_back(norm);
    res.theta_trace.push_back(theta);
    res.acceptance_trace.push_back(m.acceptance_rate);
    res.iterations = it + 1;
  }
  if (!res.converged && norm < stop) res.converged = true;
  res.theta_hat = theta;
  res.final_acceptance_rate = m.acceptance_rate;
  return res;
}

McleResult fisher_scoring(const DependenceSpec& spec, const TimeSeries& series,
                          const ThetaVector& theta0, const ExchangeConfig& exchange,
                          const ScoringConfig& scoring, const Deadline& deadline) {
  const StatisticEvaluator eval(spec, series);
  const SufficientStatistic observed = eval.total();
  Permutation chain(series.length(), eval.order());
  std::uint64_t call = 0;
  const MomentSource mcmc = [&](const ThetaVector& theta) {
    ExchangeConfig cfg = exchange;
    cfg.seed = exchange.seed + 0x9e3779b97f4a7c15ULL * call++;
    const auto run = exchange_sample(spec, series, theta, cfg, &chain, deadline);
    Moments m;
    m.mean = run.samples.colwise().mean().transpose();
    const Matrix centered = run.samples.rowwise() - m.mean.transpose();
    m.cov = centered.transpose() * centered / static_cast<double>(run.samples.rows());
    m.acceptance_rate = run.acceptance_rate;
    return m;
  };
  return fisher_scoring(observed, theta0, mcmc, scoring, deadline);
}

}  // namespace mimm

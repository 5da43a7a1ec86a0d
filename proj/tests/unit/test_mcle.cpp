#include <cmath>
#include <random>

#include "doctest.h"
#include "mimm/core/statistics.hpp"
#include "mimm/gaussian/simulate.hpp"
#include "mimm/mcle/mcle.hpp"
#include "mimm/oracle/oracle.hpp"
#include "test_util.hpp"

using namespace mimm;
using mimm::test::error_kind;
using mimm::test::series_of;

namespace {

TimeSeries ar1_series(std::size_t n, std::uint64_t seed) {
  ClassicalARParams p;
  p.phi = Vector::Constant(1, 0.5);
  p.sigma2 = 0.5;
  return simulate_ar(p, n, 100, seed);
}

}  // namespace

TEST_CASE("log ratio of a swap") {
  CHECK(log_ratio_swap(ThetaVector::Constant(2, 1.3), Vector::Zero(2)) == 0.0);
  CHECK(log_ratio_swap(ThetaVector::Zero(2), Vector::Constant(2, 5.0)) == 0.0);
  const Vector delta = delta_statistic_swap(ar_spec(1), series_of({1, 2, 3, 4}), Permutation(4, 1), 1, 2);
  CHECK(log_ratio_swap(ThetaVector::Constant(1, 1.0), delta) == -3.0);
  CHECK(error_kind([] { log_ratio_swap(ThetaVector::Zero(2), Vector::Zero(1)); }) == ErrorKind::shape);
}

TEST_CASE("exchange sampler at theta = 0 accepts everything and matches the uniform mean") {
  const TimeSeries s = ar1_series(8, 4);
  ExchangeConfig cfg;
  cfg.n_samples = 10000;
  cfg.seed = 99;
  const auto r = exchange_sample(ar_spec(1), s, ThetaVector::Zero(1), cfg);
  CHECK(r.acceptance_rate == 1.0);
  CHECK(r.accepted == r.proposals);
  CHECK(r.samples.rows() == 10000);

  const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
  const auto m = oracle::exact_moments(stats, ThetaVector::Zero(1));
  const double mean = r.samples.col(0).mean();
  // consecutive states are correlated; allow for an effective sample size of L/10
  const double se = std::sqrt(m.cov(0, 0) / 1000.0);
  CHECK(std::abs(mean - m.mean[0]) < 3 * se);
}

TEST_CASE("two-position chain reaches the analytic two-state law") {
  const TimeSeries s = series_of({0.3, -1.2, 0.8, 1.1});
  const Vector delta = delta_statistic_swap(ar_spec(1), s, Permutation(4, 1), 1, 2);
  const ThetaVector theta = ThetaVector::Constant(1, 0.9);
  const double p_swapped = 1.0 / (1.0 + std::exp(-theta.dot(delta)));
  const double h_id = total_statistic(ar_spec(1), s)[0];
  const double h_sw = h_id + delta[0];

  ExchangeConfig cfg;
  cfg.n_samples = 20000;
  cfg.seed = 5;
  const auto r = exchange_sample(ar_spec(1), s, theta, cfg);
  std::size_t swapped = 0;
  for (Eigen::Index l = 0; l < r.samples.rows(); ++l) {
    const double h = r.samples(l, 0);
    CHECK((std::abs(h - h_id) < 1e-12 || std::abs(h - h_sw) < 1e-12));
    if (std::abs(h - h_sw) < 1e-12) ++swapped;
  }
  const double freq = static_cast<double>(swapped) / static_cast<double>(r.samples.rows());
  // the two-state chain flips with probability min(1, rho); its lag-1
  // autocorrelation is 1 - a - b, which inflates the variance of the mean
  const double a = std::min(1.0, std::exp(theta.dot(delta)));
  const double b = std::min(1.0, std::exp(-theta.dot(delta)));
  const double rho = 1 - a - b;
  const double var = p_swapped * (1 - p_swapped) / static_cast<double>(r.samples.rows()) *
                     (1 + rho) / (1 - rho);
  CHECK(std::abs(freq - p_swapped) < 3 * std::sqrt(var));
}

TEST_CASE("acceptance falls as the order grows") {
  ClassicalARParams p;
  p.phi = Vector(3);
  p.phi << 0.5, 0.3, 0.1;
  p.sigma2 = 0.5;
  const TimeSeries s = simulate_ar(p, 300, 600, 17);
  double prev = 1.0;
  for (int d = 1; d <= 3; ++d) {
    ExchangeConfig cfg;
    cfg.n_samples = 4000;
    cfg.seed = 3;
    const Vector truth = (Vector(3) << 0.64, 0.5, 0.2).finished();
    const ThetaVector th = truth.head(d);
    const auto r = exchange_sample(ar_spec(d), s, th, cfg);
    CHECK(r.acceptance_rate < prev);
    prev = r.acceptance_rate;
  }
}

TEST_CASE("invalid sampler inputs") {
  const TimeSeries s = series_of({1, 2, 3});
  CHECK(error_kind([&] { exchange_sample(ar_spec(1), s, ThetaVector::Zero(1), {}); }) ==
        ErrorKind::insufficient_data);
  const TimeSeries t = series_of({1, 2, 3, 4, 5});
  ExchangeConfig cfg;
  cfg.n_samples = 0;
  CHECK(error_kind([&] { exchange_sample(ar_spec(1), t, ThetaVector::Zero(1), cfg); }) ==
        ErrorKind::validation);
  CHECK(error_kind([&] { exchange_sample(ar_spec(1), t, ThetaVector::Zero(2), {}); }) == ErrorKind::shape);
}

TEST_CASE("exact-moment scoring reaches the grid maximizer") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed < 40 && checked < 4; ++seed) {
    const TimeSeries s = ar1_series(8, seed);
    const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
    const auto cle = oracle::exact_cle(stats);
    if (!cle.finite || std::abs(cle.theta[0]) > 9) continue;
    ScoringConfig sc;
    sc.max_iters = 100;
    sc.grad_tol = 1e-12;
    const auto r = fisher_scoring(
        stats.observed(), ThetaVector::Zero(1),
        [&](const ThetaVector& th) { return oracle::exact_moments(stats, th); }, sc);
    const double grid = oracle::grid_search_cle(stats, -10, 10, 4001);
    CHECK(std::abs(r.theta_hat[0] - grid) < 1e-3);
    CHECK(r.score_norm_trace.size() == r.theta_trace.size());
    ++checked;
  }
  CHECK(checked == 4);
}

TEST_CASE("zero score at the origin is a fixed point") {
  const TimeSeries s = ar1_series(8, 3);
  const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
  const auto m0 = oracle::exact_moments(stats, ThetaVector::Zero(1));
  ScoringConfig sc;
  sc.max_iters = 10;
  const auto r = fisher_scoring(
      m0.mean, ThetaVector::Zero(1),
      [&](const ThetaVector& th) { return oracle::exact_moments(stats, th); }, sc);
  CHECK(std::abs(r.theta_hat[0]) < 1e-12);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
}

TEST_CASE("MCMC Fisher scoring on AR(1) data") {
  const TimeSeries s = ar1_series(100, 7);
  ExchangeConfig ex;
  ex.n_samples = 4000;
  ex.seed = 7;
  ScoringConfig sc;
  sc.max_iters = 15;
  const auto r = fisher_scoring(ar_spec(1), s, ThetaVector::Zero(1), ex, sc);
  CHECK(std::abs(r.theta_hat[0] - 1.0) < 0.8);
  CHECK(r.final_acceptance_rate >= 0.0);
  CHECK(r.final_acceptance_rate <= 1.0);
  CHECK(r.acceptance_trace.size() == r.score_norm_trace.size());
  for (double a : r.acceptance_trace) CHECK((a >= 0.0 && a <= 1.0));

  const auto again = fisher_scoring(ar_spec(1), s, ThetaVector::Zero(1), ex, sc);
  CHECK(again.theta_hat == r.theta_hat);
}

TEST_CASE("singular information is reported") {
  // a statistic that never moves under reordering has zero covariance
  ScoringConfig sc;
  sc.ridge = 0.0;
  const Vector obs = Vector::Constant(1, 2.0);
  CHECK(error_kind([&] {
          fisher_scoring(
              obs + Vector::Constant(1, 1.0), ThetaVector::Zero(1),
              [&](const ThetaVector&) {
                Moments m;
                m.mean = obs;
                m.cov = Matrix::Zero(1, 1);
                return m;
              },
              sc);
        }) == ErrorKind::ill_conditioned);
}

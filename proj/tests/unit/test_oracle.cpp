#include <cmath>
#include <random>

#include "doctest.h"
#include "mimm/core/statistics.hpp"
#include "mimm/gaussian/simulate.hpp"
#include "mimm/gaussian/transforms.hpp"
#include "mimm/oracle/oracle.hpp"
#include "test_util.hpp"

using namespace mimm;
using mimm::test::error_kind;
using mimm::test::series_of;

namespace {

ClassicalARParams ar(std::initializer_list<double> phi, double sigma2) {
  ClassicalARParams p;
  p.phi = Vector(static_cast<Eigen::Index>(phi.size()));
  Eigen::Index i = 0;
  for (double v : phi) p.phi[i++] = v;
  p.sigma2 = sigma2;
  return p;
}

}  // namespace

TEST_CASE("OLS AR fit") {
  // deterministic recursion with tiny jitter
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1e-9);
  std::vector<double> x{1.0};
  for (int t = 1; t < 200; ++t) x.push_back(0.5 * x.back() + z(rng));
  const auto r = oracle::mle_ols_ar(TimeSeries::univariate(x), 1);
  CHECK(std::abs(r.classical.phi[0] - 0.5) < 1e-6);

  const auto s = simulate_ar(ar({0.5, 0.3, 0.1}, 0.5), 20000, 600, 2);
  const auto f = oracle::mle_ols_ar(s, 3);
  CHECK((f.classical.phi - Vector::LinSpaced(3, 0.5, 0.1)).cwiseAbs().maxCoeff() < 0.03);
  CHECK(std::abs(f.classical.sigma2 - 0.5) < 0.02);
  const auto mi = ard_to_mininfo(f.classical);
  CHECK((mi.theta - f.mininfo.theta).norm() == 0.0);

  CHECK(error_kind([] { oracle::mle_ols_ar(series_of({1, 1, 1, 1, 1, 1}), 1); }).has_value());
}

TEST_CASE("OLS VAR fit") {
  ClassicalVARParams v;
  v.A.push_back(Matrix::Zero(2, 2));
  v.Sigma = Matrix::Identity(2, 2);
  const auto s = simulate_var(v, 5000, 0, 3);
  const auto f = oracle::mle_ols_var(s, 1);
  REQUIRE(f.mininfo.has_value());
  CHECK(f.mininfo->Theta.cwiseAbs().maxCoeff() < 0.1);

  const auto back = var1_to_mininfo(f.classical);
  CHECK((back.Theta - f.mininfo->Theta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((back.B - f.mininfo->B).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("enumeration and the conditional law") {
  std::mt19937_64 rng(4);
  const TimeSeries s = test::gaussian_series(rng, 8, 1);
  const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
  CHECK(stats.H.rows() == 720);
  CHECK(stats.observed()[0] == total_statistic(ar_spec(1), s)[0]);

  CHECK(oracle::exact_conditional_likelihood(ar_spec(1), s, ThetaVector::Zero(1)) ==
        doctest::Approx(1.0 / 720.0).epsilon(1e-13));
  for (double th : {-3.0, 0.4, 2.0}) {
    const Vector p = oracle::conditional_probabilities(stats, ThetaVector::Constant(1, th));
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
  }

  const TimeSeries big = test::gaussian_series(rng, 12, 1);
  CHECK(error_kind([&] { oracle::enumerate_statistics(ar_spec(1), big); }) == ErrorKind::budget_exceeded);
}

TEST_CASE("two-point conditional law") {
  const TimeSeries s = series_of({0.5, -1.0, 2.0, 0.25});
  const Vector delta = delta_statistic_swap(ar_spec(1), s, Permutation(4, 1), 1, 2);
  for (double th : {-2.0, 0.0, 0.7}) {
    const ThetaVector theta = ThetaVector::Constant(1, th);
    CHECK(oracle::exact_conditional_likelihood(ar_spec(1), s, theta) ==
          doctest::Approx(1.0 / (1.0 + std::exp(theta.dot(delta)))).epsilon(1e-14));
  }
}

TEST_CASE("exact CLE") {
  int done = 0;
  for (std::uint64_t seed = 10; seed < 60 && done < 3; ++seed) {
    const TimeSeries s = simulate_ar(ar({0.5}, 0.5), 8, 0, seed);
    const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
    const auto r = oracle::exact_cle(stats);
    if (!r.finite || std::abs(r.theta[0]) > 9) continue;
    CHECK(std::abs(r.theta[0] - oracle::grid_search_cle(stats, -10, 10, 4001)) < 1e-3);
    const auto m = oracle::exact_moments(stats, r.theta);
    CHECK(std::abs(stats.observed()[0] - m.mean[0]) < 1e-8 * (1 + std::abs(m.mean[0])));
    ++done;
  }
  CHECK(done == 3);

  // the observed ordering is the unique maximizer of sum x_t x_{t-1}
  const TimeSeries mono = series_of({0, 1, 2, 3, 4, 5});
  const auto u = oracle::exact_cle(ar_spec(1), mono);
  CHECK_FALSE(u.finite);
  CHECK(u.divergence_direction[0] > 0);
}

TEST_CASE("Gauss-Hermite rule") {
  Vector x, w;
  oracle::gauss_hermite(20, x, w);
  CHECK(w.sum() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  // ∫ x^4 e^{-x^2} = 3 sqrt(pi) / 4
  CHECK(w.dot(x.array().pow(4).matrix()) == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("AR(1) log density") {
  const std::vector<double> x{0.3, -0.2, 0.9};
  const double phi = 0.5, s2 = 0.5, tau2 = s2 / (1 - phi * phi);
  double expect = -0.5 * std::log(2 * M_PI * tau2) - x[0] * x[0] / (2 * tau2);
  for (int t = 1; t < 3; ++t) {
    const double e = x[t] - phi * x[t - 1];
    expect += -0.5 * std::log(2 * M_PI * s2) - e * e / (2 * s2);
  }
  CHECK(oracle::ar1_log_density(x, phi, s2) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("numeric Fisher information at theta = 0") {
  for (double t2 : {0.25, 1.0, 4.0}) {
    const auto g = oracle::ar1_fisher_info_numeric(0.0, t2);
    CHECK(g(0, 0) == doctest::Approx(t2 * t2).epsilon(1e-6));
    CHECK(g(1, 1) == doctest::Approx(1 / (2 * t2 * t2)).epsilon(1e-6));
    CHECK(std::abs(g(0, 1)) < 1e-6);
  }
}

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "mimm/gaussian/kernel.hpp"
#include "mimm/gaussian/params.hpp"
#include "mimm/gaussian/simulate.hpp"
#include "mimm/gaussian/transforms.hpp"
#include "mimm/oracle/oracle.hpp"
#include "test_util.hpp"

using namespace mimm;
using mimm::test::error_kind;

namespace {

ClassicalARParams ar(std::initializer_list<double> phi, double sigma2) {
  ClassicalARParams p;
  p.phi = Vector(static_cast<Eigen::Index>(phi.size()));
  Eigen::Index i = 0;
  for (double v : phi) p.phi[i++] = v;
  p.sigma2 = sigma2;
  return p;
}

ClassicalVARParams table_var1() {
  ClassicalVARParams v;
  Matrix a(2, 2);
  a << 0.5, 0.1, 0.1, 0.5;
  v.A.push_back(a);
  v.Sigma = 0.5 * Matrix::Identity(2, 2);
  return v;
}

double sample_var(const Vector& x) {
  const double m = x.mean();
  return (x.array() - m).square().mean();
}

double lag1_corr(const Vector& x) {
  const double m = x.mean();
  const Eigen::Index n = x.size();
  const Vector c = x.array() - m;
  return c.head(n - 1).dot(c.tail(n - 1)) / c.squaredNorm();
}

}  // namespace

TEST_CASE("AR(1) transform") {
  const auto mi = ar1_to_mininfo(ar({0.5}, 0.5));
  CHECK(mi.theta[0] == 1.0);
  CHECK(mi.tau2 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  MinInfoARParams in;
  in.theta = Vector::Constant(1, 1.0);
  in.tau2 = 2.0 / 3.0;
  const auto back = mininfo_to_ar1(in);
  CHECK(back.phi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(back.sigma2 == doctest::Approx(0.5).epsilon(1e-15));

  const auto zero = ar1_to_mininfo(ar({0.0}, 1.7));
  CHECK(zero.theta[0] == 0.0);
  CHECK(zero.tau2 == 1.7);
  CHECK(error_kind([] { ar1_to_mininfo(ar({1.0}, 1.0)); }).has_value());
  CHECK(error_kind([] { ar1_to_mininfo(ar({0.5}, -1.0)); }) == ErrorKind::parameter_domain);
}

TEST_CASE("AR(2) transform and inverse") {
  const auto mi = ar2_to_mininfo(ar({0.5, 0.3}, 0.5));
  CHECK(mi.theta[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(mi.theta[1] == doctest::Approx(0.6).epsilon(1e-15));
  const double tau2 = (1 - 0.3) * 0.5 / ((1 + 0.3) * (1 - 0.5 - 0.3) * (1 + 0.5 - 0.3));
  CHECK(mi.tau2 == doctest::Approx(tau2).epsilon(1e-14));

  MinInfoARParams zero;
  zero.theta = Vector::Zero(2);
  zero.tau2 = 1.3;
  const auto z = mininfo_to_ar2(zero);
  CHECK(z.phi.isZero());
  CHECK(z.sigma2 == 1.3);

  CHECK(error_kind([] { ar2_to_mininfo(ar({0.5, 0.6}, 1.0)); }) == ErrorKind::stationarity);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const double phi2 = 0.95 * u(rng);
    const auto p = ar({0.95 * (1 - phi2) * u(rng), phi2}, 0.1 + std::abs(u(rng)));
    const auto back = mininfo_to_ar2(ar2_to_mininfo(p));
    CHECK((back.phi - p.phi).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(back.sigma2 / p.sigma2 - 1) < 1e-10);
  }
}

TEST_CASE("AR(2) inverse objective is decreasing on its bracket") {
  for (auto [t1, t2] : {std::pair{0.7, 0.6}, {1.5, -0.8}, {-2.0, 0.0}, {0.3, 2.0}}) {
    const double hi = ar2_inverse_bracket(t1, t2);
    const double top = std::isfinite(hi) ? hi : 10.0;
    double prev = ar2_inverse_objective(t1, t2, top * 1e-4);
    for (int i = 2; i < 100; ++i) {
      const double g = ar2_inverse_objective(t1, t2, top * i / 100.0 * 0.999);
      CHECK(g < prev);
      prev = g;
    }
  }
}

TEST_CASE("AR(d) transform") {
  const auto mi = ard_to_mininfo(ar({0.5, 0.3, 0.1}, 0.5));
  CHECK(mi.theta[0] == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(mi.theta[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mi.theta[2] == doctest::Approx(0.2).epsilon(1e-15));

  const auto one = ard_to_mininfo(ar({0.4}, 0.8));
  const auto one_ref = ar1_to_mininfo(ar({0.4}, 0.8));
  CHECK(one.theta[0] == doctest::Approx(one_ref.theta[0]).epsilon(1e-12));
  CHECK(one.tau2 == doctest::Approx(one_ref.tau2).epsilon(1e-12));

  const auto two = ard_to_mininfo(ar({0.5, 0.3}, 0.5));
  const auto two_ref = ar2_to_mininfo(ar({0.5, 0.3}, 0.5));
  CHECK((two.theta - two_ref.theta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(two.tau2 - two_ref.tau2) < 1e-12 * two_ref.tau2);

  const auto back = mininfo_to_ard(mi);
  CHECK((back.phi - Vector::LinSpaced(3, 0.5, 0.1)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(back.sigma2 == doctest::Approx(0.5).epsilon(1e-8));

  MinInfoARParams zero;
  zero.theta = Vector::Zero(3);
  zero.tau2 = 2.0;
  const auto z = mininfo_to_ard(zero);
  CHECK(z.phi.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(z.sigma2 == doctest::Approx(2.0));
}

TEST_CASE("VAR(1) transform and Riccati inverse") {
  const auto mi = var1_to_mininfo(table_var1());
  Matrix expect(2, 2);
  expect << 1.0, 0.2, 0.2, 1.0;
  CHECK((mi.Theta - expect).cwiseAbs().maxCoeff() < 1e-15);
  const Matrix lyap = lyapunov_covariance(table_var1().A[0], table_var1().Sigma);
  CHECK((mi.B - lyap).cwiseAbs().maxCoeff() < 1e-14);

  const auto back = mininfo_to_var1(mi);
  CHECK((back.A[0] - table_var1().A[0]).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((back.Sigma - table_var1().Sigma).cwiseAbs().maxCoeff() < 1e-10);

  MinInfoVARParams zero;
  zero.Theta = Matrix::Zero(2, 2);
  zero.B = mi.B;
  const auto z = mininfo_to_var1(zero);
  CHECK(z.A[0].isZero());
  CHECK((z.Sigma - mi.B).cwiseAbs().maxCoeff() < 1e-14);

  const auto report = solve_mininfo_riccati(mi.Theta, mi.B);
  CHECK(report.residual < 1e-12);
  CHECK((report.Sigma - report.Sigma.transpose()).norm() == 0.0);
}

TEST_CASE("Riccati non-convergence is reported") {
  Matrix theta(2, 2), b(2, 2);
  theta << 1.0, 0.2, 0.2, 1.0;
  b << 1.2, 0.1, 0.1, 1.2;
  RiccatiOptions opt;
  opt.max_fixed_point = 1;
  opt.max_newton = 0;
  opt.tol = 1e-15;
  CHECK(error_kind([&] { solve_mininfo_riccati(theta, b, opt); }) == ErrorKind::no_solution_found);
}

TEST_CASE("stationarity validation") {
  CHECK(spectral_radius(ar({0.5, 0.3}, 1)) < 1);
  CHECK(error_kind([] { validate_stationary(ar({1.2}, 1)); }) == ErrorKind::stationarity);
  ClassicalVARParams v = table_var1();
  v.A[0] *= 2.0;
  CHECK(error_kind([&] { validate_stationary(v); }) == ErrorKind::stationarity);
  v = table_var1();
  v.Sigma(0, 0) = -1.0;
  CHECK(error_kind([&] { validate_stationary(v); }).has_value());
}

TEST_CASE("simulation reproduces the stationary moments") {
  const auto iid = simulate_ar(ar({0.0}, 1.0), 100000, 0, 1).column(0);
  CHECK(std::abs(sample_var(iid) - 1.0) < 0.03);

  const auto x = simulate_ar(ar({0.5}, 0.5), 100000, 100, 2).column(0);
  CHECK(std::abs(sample_var(x) / (2.0 / 3.0) - 1.0) < 0.03);

  const auto y = simulate_ar(ar({0.5, 0.3}, 0.5), 100000, 100, 3).column(0);
  CHECK(std::abs(lag1_corr(y) / (5.0 / 7.0) - 1.0) < 0.03);

  const auto z = simulate_ar(ar({0.5, 0.3, 0.1}, 0.5), 50000, 0, 4).column(0);
  const Vector gamma = ar_autocovariance(ar({0.5, 0.3, 0.1}, 0.5));
  CHECK(std::abs(sample_var(z) / gamma[0] - 1.0) < 0.05);
}

TEST_CASE("VAR simulation matches the Lyapunov covariance") {
  const TimeSeries s = simulate_var(table_var1(), 100000, 100, 5);
  CHECK(s.dim() == 2);
  const Matrix c = s.data().rowwise() - s.data().colwise().mean();
  const Matrix cov = (c.transpose() * c) / static_cast<double>(s.length());
  const Matrix b = lyapunov_covariance(table_var1().A[0], table_var1().Sigma);
  CHECK(((cov - b).cwiseAbs().array() / b.cwiseAbs().maxCoeff()).maxCoeff() < 0.03);

  ClassicalVARParams diag;
  diag.A.push_back(0.5 * Matrix::Identity(2, 2));
  diag.Sigma = 0.5 * Matrix::Identity(2, 2);
  const TimeSeries d = simulate_var(diag, 100000, 100, 6);
  for (std::size_t j = 0; j < 2; ++j) {
    const Vector col = d.column(j);
    CHECK(std::abs(lag1_corr(col) / 0.5 - 1.0) < 0.03);
    CHECK(std::abs(sample_var(col) / (2.0 / 3.0) - 1.0) < 0.03);
  }
  const Vector a = d.column(0), b2 = d.column(1);
  CHECK(std::abs((a.array() - a.mean()).matrix().dot((b2.array() - b2.mean()).matrix())) /
            static_cast<double>(a.size()) <
        0.02);
}

TEST_CASE("simulation is deterministic per seed") {
  const auto a = simulate_ar(ar({0.5, 0.3}, 0.5), 500, 100, 9);
  const auto b = simulate_ar(ar({0.5, 0.3}, 0.5), 500, 100, 9);
  const auto c = simulate_ar(ar({0.5, 0.3}, 0.5), 500, 100, 10);
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
  CHECK(error_kind([] { simulate_ar(ar({1.01}, 0.5), 10, 0, 1); }) == ErrorKind::stationarity);
}

TEST_CASE("Fisher information") {
  for (double t2 : {0.25, 1.0, 4.0}) {
    const auto g = ar1_fisher_info(0.0, t2);
    CHECK(g(0, 0) == doctest::Approx(t2 * t2));
    CHECK(g(1, 1) == doctest::Approx(1.0 / (2 * t2 * t2)));
  }
  for (double th : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double t2 : {0.25, 2.0 / 3.0, 1.0, 4.0}) {
      const auto g = ar1_fisher_info(th, t2);
      const auto q = oracle::ar1_fisher_info_numeric(th, t2);
      CHECK(g(0, 1) == 0.0);
      CHECK(g(1, 0) == 0.0);
      CHECK(std::abs(g(0, 0) - q(0, 0)) / std::max(1.0, q(0, 0)) < 1e-6);
      CHECK(std::abs(g(1, 1) - q(1, 1)) / std::max(1.0, q(1, 1)) < 1e-6);
      CHECK(std::abs(q(0, 1)) < 1e-6);
    }
  }
}

TEST_CASE("E-family kernel construction") {
  const auto e0 = construct_e_kernel(0.0, 0.5);
  CHECK(e0.K == 0.0);
  CHECK((*e0.kernel.stationary_cov)(0, 0) == doctest::Approx(1.0));

  // 2 sqrt(D^2 - 1) = 3/2 gives stationary variance 2/3
  const double D = std::sqrt(1.0 + 9.0 / 16.0);
  const auto e = construct_e_kernel(1.0, D);
  const auto k = ar1_kernel(0.5, 0.5);
  CHECK(std::abs(e.kernel.F(0, 0) - k.F(0, 0)) < 1e-10);
  CHECK(std::abs(e.kernel.S(0, 0) - k.S(0, 0)) < 1e-10);
  CHECK(std::abs((*e.kernel.stationary_cov)(0, 0) - (*k.stationary_cov)(0, 0)) < 1e-10);

  // the density integrates to one in y
  Vector x, w;
  oracle::gauss_hermite(64, x, w);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2), gap(0.05, 2);
  for (int i = 0; i < 20; ++i) {
    const double th = u(rng);
    const auto ek = construct_e_kernel(th, std::abs(th) + gap(rng));
    const double xv = u(rng);
    const double sd = std::sqrt(ek.kernel.S(0, 0));
    const double mean = ek.kernel.F(0, 0) * xv;
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double y = mean + std::sqrt(2.0) * sd * x[j];
      // divide out the Gauss-Hermite weight e^{-x^2}
      total += w[j] * std::exp(ek.log_density(y, xv) + x[j] * x[j]) * std::sqrt(2.0) * sd;
    }
    CHECK(std::abs(total - 1.0) < 1e-8);
  }
  CHECK(error_kind([] { construct_e_kernel(1.0, 1.0); }) == ErrorKind::parameter_domain);
}

TEST_CASE("divergence rate") {
  const auto p = ar1_kernel(0.5, 0.5);
  CHECK(divergence_rate(p, p) == doctest::Approx(0.0));

  GaussianKernel q;
  q.F = Matrix::Zero(1, 1);
  q.S = Matrix::Identity(1, 1);
  q.stationary_cov = Matrix::Identity(1, 1);

  // Monte-Carlo estimate of E_{x~r_p} KL(p(.|x) || q(.|x))
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  const double b = 2.0 / 3.0;
  const int draws = 2000000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = std::sqrt(b) * z(rng);
    const double y = 0.5 * x + std::sqrt(0.5) * z(rng);
    const double lp = -0.5 * std::log(2 * M_PI * 0.5) - (y - 0.5 * x) * (y - 0.5 * x) / (2 * 0.5);
    const double lq = -0.5 * std::log(2 * M_PI) - y * y / 2;
    acc += lp - lq;
  }
  CHECK(std::abs(divergence_rate(p, q) - acc / draws) < 2e-3);
  CHECK(divergence_rate(p, q) != doctest::Approx(divergence_rate(q, p)));

  GaussianKernel bare = q;
  bare.stationary_cov.reset();
  CHECK(error_kind([&] { divergence_rate(bare, p); }) == ErrorKind::contract);
}

TEST_CASE("Pythagorean identity over random configurations") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const double theta = 4 * u(rng) - 2, tau2 = 0.2 + 3 * u(rng);
    const double phi_w = 1.9 * u(rng) - 0.95, D = std::abs(theta) + 0.05 + 3 * u(rng);
    MinInfoARParams mi;
    mi.theta = Vector::Constant(1, theta);
    mi.tau2 = tau2;
    const auto star = mininfo_to_ar1(mi);
    const auto ws = ar1_kernel(star.phi[0], star.sigma2);
    const auto w = ar1_kernel(phi_w, tau2 * (1 - phi_w * phi_w));
    const auto v = construct_e_kernel(theta, D).kernel;
    CHECK(std::abs(divergence_rate(w, ws) + divergence_rate(ws, v) - divergence_rate(w, v)) < 1e-8);
  }
}

TEST_CASE("parameter records round-trip") {
  const ParamRecord r = table_var1();
  const auto kv = to_key_values(r);
  const auto back = std::get<ClassicalVARParams>(parse_param_record(kv));
  CHECK(back.A[0] == table_var1().A[0]);
  CHECK(back.Sigma == table_var1().Sigma);

  const auto arp = std::get<ClassicalARParams>(parse_param_record({{"phi.1", "0.5"}, {"phi.2", "0.3"}, {"sigma2", "0.5"}}));
  CHECK(arp.phi.size() == 2);
  CHECK(arp.phi[1] == 0.3);
  const auto mip = std::get<MinInfoARParams>(parse_param_record({{"theta.1", "1"}, {"tau2", "0.25"}}));
  CHECK(mip.tau2 == 0.25);
}

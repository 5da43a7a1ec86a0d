#include "mimm/app/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "mimm/core/statistics.hpp"
#include "mimm/gaussian/kernel.hpp"
#include "mimm/gaussian/simulate.hpp"
#include "mimm/kernels/kernels.hpp"
#include "mimm/mcle/mcle.hpp"
#include "mimm/oracle/oracle.hpp"
#include "mimm/ple/ple.hpp"

namespace mimm::app {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_rel(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

TimeSeries random_series(Rng& rng, std::size_t n, std::size_t p) {
  RowMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::normal_distribution<double> z;
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = z(rng);
  return TimeSeries(std::move(data));
}

ClassicalARParams random_ar2(Rng& rng) {
  ClassicalARParams p;
  const double phi2 = uniform(rng, -0.95, 0.95);
  const double edge = 0.95 * (1.0 - phi2);
  p.phi = Vector(2);
  p.phi << uniform(rng, -edge, edge), phi2;
  p.sigma2 = uniform(rng, 0.1, 2.0);
  return p;
}

ClassicalVARParams random_var1(Rng& rng) {
  const int p = rng() % 2 == 0 ? 2 : 3;
  std::normal_distribution<double> z;
  Matrix a(p, p), l(p, p);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = z(rng);
    l.data()[i] = z(rng);
  }
  ClassicalVARParams v;
  v.A.push_back(a);
  v.Sigma = l * l.transpose() + 0.1 * Matrix::Identity(p, p);
  v.A[0] *= uniform(rng, 0.1, 0.9) / spectral_radius(v);
  return v;
}

DependenceSpec mixed_spec() {
  return parse_spec("order=2\ndim=2\n0:0^1*1:0^1\n0:0^1*2:1^1\n0:1^2*1:0^1*2:0^1\n0:1^1\n");
}

// Each check returns (measured, tolerance, detail).
struct Outcome {
  double measured;
  double tolerance;
  std::string detail;
};

using CheckFn = std::function<Outcome(Rng&, const VerifyOptions&)>;

struct Check {
  const char* name;
  CheckFn run;
};

Outcome swap_delta(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  const std::vector<std::pair<DependenceSpec, std::size_t>> cases{{ar_spec(1), 1}, {ar_spec(3), 1},
                                                                   {mixed_spec(), 2}};
  for (const auto& [spec, p] : cases) {
    const TimeSeries s = random_series(rng, 25, p);
    const StatisticEvaluator eval(spec, s);
    const std::size_t d = eval.order();
    Permutation perm(s.length(), d);
    std::uniform_int_distribution<std::size_t> pos(d, s.length() - d - 1);
    Vector delta(static_cast<Eigen::Index>(eval.size()));
    for (int i = 0; i < 200; ++i) {
      std::size_t a = pos(rng), b = pos(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const Vector before = eval.total(perm);
      eval.delta_swap(perm, a, b, delta.data());
      perm.swap_positions(a, b);
      const Vector after = eval.total(perm);
      worst = std::max(worst, (before + delta - after).cwiseAbs().maxCoeff() /
                                  (1.0 + after.cwiseAbs().maxCoeff()));
    }
  }
  return {worst, 1e-12, "H(order) + delta vs full recompute, 600 random swaps"};
}

Outcome multilinear(Rng& rng, const VerifyOptions&) {
  const DependenceSpec spec = mixed_spec();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    RowMatrix w(3, 2);
    for (Eigen::Index j = 0; j < w.size(); ++j) w.data()[j] = uniform(rng, -2, 2);
    const int lag = static_cast<int>(rng() % 3);
    const int comp = static_cast<int>(rng() % 2);
    const double c = uniform(rng, -3, 3);
    const Vector base = eval_h(spec, w);
    RowMatrix ws = w;
    ws(lag, comp) *= c;
    const Vector scaled = eval_h(spec, ws);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      int e = 0;
      for (const auto& f : spec.term(k).factors()) {
        if (f.lag == lag && f.component == comp) e = f.exponent;
      }
      const double expect = base[static_cast<Eigen::Index>(k)] * std::pow(c, e);
      worst = std::max(worst, rel(scaled[static_cast<Eigen::Index>(k)], expect));
    }
  }
  return {worst, 1e-12, "scaling one factor by c scales each term by c^exponent"};
}

Outcome reversal(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 200, 1);
  const double a = total_statistic(ar_spec(1), s)[0];
  const double b = total_statistic(ar_spec(1), s.reversed())[0];
  return {rel(b, a), 1e-12, "sum x_t x_{t-1} of the reversed series"};
}

Outcome remainder_invariance(Rng& rng, const VerifyOptions&) {
  ClassicalARParams p;
  p.phi = Vector::Constant(1, uniform(rng, -0.8, 0.8));
  p.sigma2 = uniform(rng, 0.2, 2.0);
  const TimeSeries s = simulate_ar(p, 8, 0, rng());
  const double theta = p.phi[0] / p.sigma2;
  const StatisticEvaluator eval(ar_spec(1), s);
  std::vector<std::size_t> order(8);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Permutation perm(8, 1);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  do {
    perm.assign(order);
    std::vector<double> x(8);
    for (std::size_t i = 0; i < 8; ++i) x[i] = s(order[i], 0);
    const double r = oracle::ar1_log_density(x, p.phi[0], p.sigma2) - theta * eval.total(perm)[0];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  } while (std::next_permutation(order.begin() + 1, order.end() - 1));
  return {hi - lo, 1e-8, "spread of log density - theta*H over all 720 interior orderings"};
}

Outcome round_trip_ar1(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ClassicalARParams p;
    p.phi = Vector::Constant(1, uniform(rng, -0.98, 0.98));
    p.sigma2 = uniform(rng, 0.05, 5.0);
    const auto back = mininfo_to_ar1(ar1_to_mininfo(p));
    worst = std::max({worst, rel(back.phi[0], p.phi[0]), std::abs(back.sigma2 / p.sigma2 - 1.0)});
  }
  return {worst, 1e-10, "100 random stationary draws"};
}

Outcome round_trip_ar2(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_ar2(rng);
    const auto back = mininfo_to_ar2(ar2_to_mininfo(p));
    worst = std::max({worst, max_rel(back.phi, p.phi), std::abs(back.sigma2 / p.sigma2 - 1.0)});
  }
  return {worst, 1e-10, "100 random draws inside the stationarity triangle"};
}

Outcome round_trip_var1(Rng& rng, const VerifyOptions& opt) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto v = random_var1(rng);
    const auto back = mininfo_to_var1(var1_to_mininfo(v), opt.riccati);
    worst = std::max({worst, max_rel(back.A[0], v.A[0]), max_rel(back.Sigma, v.Sigma)});
  }
  return {worst, 1e-10, "100 random stationary VAR(1), p in {2,3}"};
}

Outcome riccati_residual(Rng& rng, const VerifyOptions& opt) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto v = random_var1(rng);
    const auto mi = var1_to_mininfo(v);
    const auto back = mininfo_to_var1(mi, opt.riccati);
    const Matrix& a = back.A[0];
    const double r1 = (mi.B - a * mi.B * a.transpose() - back.Sigma).norm() / mi.B.norm();
    const Matrix theta = a.transpose() * back.Sigma.inverse();
    worst = std::max({worst, r1, (theta - mi.Theta).norm() / std::max(1.0, mi.Theta.norm())});
  }
  return {worst, 1e-8, "||B - A B A' - Sigma||_F / ||B||_F and Theta = A' Sigma^-1"};
}

Outcome round_trip_ard(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    ClassicalARParams p;
    p.phi = Vector(3);
    for (int j = 0; j < 3; ++j) p.phi[j] = uniform(rng, -0.6, 0.6);
    p.sigma2 = uniform(rng, 0.2, 2.0);
    if (spectral_radius(p) > 0.9) continue;
    const auto back = mininfo_to_ard(ard_to_mininfo(p));
    worst = std::max({worst, max_rel(back.phi, p.phi), std::abs(back.sigma2 / p.sigma2 - 1.0)});
    ++done;
  }
  return {worst, 1e-8, "50 random AR(3) draws, spectral radius <= 0.9"};
}

const double kThetaGrid[] = {-2, -1, 0, 1, 2};
const double kTau2Grid[] = {0.25, 2.0 / 3.0, 1.0, 4.0};

Outcome fisher_closed_form(Rng&, const VerifyOptions&) {
  double worst = 0.0;
  for (double th : kThetaGrid) {
    for (double t2 : kTau2Grid) {
      const auto a = ar1_fisher_info(th, t2);
      const auto b = oracle::ar1_fisher_info_numeric(th, t2);
      worst = std::max({worst, rel(a(0, 0), b(0, 0)), rel(a(1, 1), b(1, 1))});
    }
  }
  return {worst, 1e-6, "closed form vs 64-node quadrature, 5x4 grid"};
}

Outcome fisher_orthogonality(Rng&, const VerifyOptions&) {
  double worst = 0.0;
  for (double th : kThetaGrid) {
    for (double t2 : kTau2Grid) {
      worst = std::max({worst, std::abs(oracle::ar1_fisher_info_numeric(th, t2)(0, 1)),
                        std::abs(ar1_fisher_info(th, t2)(0, 1))});
    }
  }
  return {worst, 1e-6, "|g_theta,tau2| from quadrature and closed form"};
}

Outcome pythagorean(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double theta = uniform(rng, -2, 2);
    const double tau2 = uniform(rng, 0.2, 3.0);
    const double phi_w = uniform(rng, -0.95, 0.95);
    const double D = std::abs(theta) + uniform(rng, 0.05, 3.0);
    MinInfoARParams mi;
    mi.theta = Vector::Constant(1, theta);
    mi.tau2 = tau2;
    const auto star = mininfo_to_ar1(mi);
    const auto w_star = ar1_kernel(star.phi[0], star.sigma2);
    const auto w = ar1_kernel(phi_w, tau2 * (1 - phi_w * phi_w));
    const auto v = construct_e_kernel(theta, D).kernel;
    const double lhs = divergence_rate(w, w_star) + divergence_rate(w_star, v);
    worst = std::max(worst, std::abs(lhs - divergence_rate(w, v)));
  }
  return {worst, 1e-8, "D(w|w*) + D(w*|v) - D(w|v), 50 random configurations"};
}

Outcome divergence_nonnegative(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto p = ar1_kernel(uniform(rng, -0.9, 0.9), uniform(rng, 0.1, 2));
    const auto q = ar1_kernel(uniform(rng, -0.9, 0.9), uniform(rng, 0.1, 2));
    worst = std::max({worst, -divergence_rate(p, q), std::abs(divergence_rate(p, p))});
  }
  return {worst, 1e-12, "D(p|q) >= 0 and D(p|p) = 0 over 100 pairs"};
}

Outcome e_kernel_stationary(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double theta = uniform(rng, -3, 3);
    const auto e = construct_e_kernel(theta, std::abs(theta) + uniform(rng, 0.01, 3));
    const Matrix& f = e.kernel.F;
    const Matrix& b = *e.kernel.stationary_cov;
    worst = std::max(worst, max_rel(f * b * f.transpose() + e.kernel.S, b));
  }
  return {worst, 1e-12, "B = F B F' + S for the constructed kernels"};
}

Outcome detailed_balance(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 30, 2);
  const DependenceSpec spec = mixed_spec();
  const StatisticEvaluator eval(spec, s);
  Permutation perm(30, 2);
  Vector fwd(static_cast<Eigen::Index>(eval.size())), back(fwd.size());
  ThetaVector theta(fwd.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = uniform(rng, -1, 1);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t a = 2 + rng() % 26, b = 2 + rng() % 26;
    if (a == b) continue;
    eval.delta_swap(perm, std::min(a, b), std::max(a, b), fwd.data());
    perm.swap_positions(a, b);
    eval.delta_swap(perm, std::min(a, b), std::max(a, b), back.data());
    worst = std::max(worst, std::abs(log_ratio_swap(theta, fwd) + log_ratio_swap(theta, back)));
  }
  return {worst, 0.0, "log rho(forward) + log rho(reverse) over 200 swaps"};
}

Outcome zero_theta_acceptance(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 60, 1);
  ExchangeConfig cfg;
  cfg.n_samples = 2000;
  cfg.seed = rng();
  const auto r = exchange_sample(ar_spec(2), s, ThetaVector::Zero(2), cfg);
  return {std::abs(1.0 - r.acceptance_rate), 0.0, "acceptance rate at theta = 0"};
}

Outcome law_normalized(Rng& rng, const VerifyOptions&) {
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const TimeSeries s = random_series(rng, 6 + 2 * static_cast<std::size_t>(d), 1);
    const auto stats = oracle::enumerate_statistics(ar_spec(d), s);
    for (int i = 0; i < 5; ++i) {
      ThetaVector theta(d);
      for (int k = 0; k < d; ++k) theta[k] = uniform(rng, -3, 3);
      worst = std::max(worst, std::abs(oracle::conditional_probabilities(stats, theta).sum() - 1.0));
    }
  }
  return {worst, 1e-12, "sum over all interior orderings of f(pi|theta)"};
}

Outcome score_zero_mean(Rng& rng, const VerifyOptions&) {
  ClassicalARParams p;
  p.phi = Vector::Constant(1, 0.5);
  p.sigma2 = 0.5;
  const TimeSeries s = simulate_ar(p, 8, 0, rng());
  const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
  const ThetaVector theta = ThetaVector::Constant(1, 1.0);
  const Vector w = oracle::conditional_probabilities(stats, theta);
  const auto m = oracle::exact_moments(stats, theta);
  const Vector score_mean = stats.H.transpose() * w - m.mean;
  const double scale = stats.H.cwiseAbs().maxCoeff();
  return {score_mean.norm() / std::max(1.0, scale), 1e-12,
          "E[H(pi x) - mu(theta)] under f(.|theta) at theta = 1, n = 8"};
}

Outcome exact_scoring(Rng& rng, const VerifyOptions&) {
  ClassicalARParams p;
  p.phi = Vector::Constant(1, 0.5);
  p.sigma2 = 0.5;
  double worst = 0.0;
  int found = 0;
  std::string detail;
  for (int attempt = 0; attempt < 100 && found < 5; ++attempt) {
    const TimeSeries s = simulate_ar(p, 8, 0, rng());
    const auto stats = oracle::enumerate_statistics(ar_spec(1), s);
    const auto cle = oracle::exact_cle(stats);
    if (!cle.finite || std::abs(cle.theta[0]) > 9.0) continue;
    ScoringConfig sc;
    sc.max_iters = 100;
    sc.grad_tol = 1e-12;
    const auto fs = fisher_scoring(
        stats.observed(), ThetaVector::Zero(1),
        [&](const ThetaVector& t) { return oracle::exact_moments(stats, t); }, sc);
    const double grid = oracle::grid_search_cle(stats, -10, 10, 4001);
    worst = std::max({worst, std::abs(fs.theta_hat[0] - cle.theta[0]), std::abs(grid - cle.theta[0])});
    ++found;
  }
  if (found < 5) return {std::numeric_limits<double>::infinity(), 1e-3, "too few bounded datasets"};
  return {worst, 1e-3, "exact-moment scoring vs Newton oracle vs grid search, 5 datasets n=8"};
}

std::vector<PairStatistic> random_pairs(Rng& rng, const DependenceSpec& spec, const TimeSeries& s,
                                        int count) {
  const std::size_t d = static_cast<std::size_t>(spec.order());
  const std::size_t m = s.length() - 2 * d;
  std::vector<PairStatistic> pairs;
  while (static_cast<int>(pairs.size()) < count) {
    const std::size_t a = d + rng() % m, b = d + rng() % m;
    if (a != b) pairs.push_back(pair_statistic(spec, s, std::min(a, b), std::max(a, b)));
  }
  return pairs;
}

Outcome log_pl_zero(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 300, 1);
  const auto obj = all_pairs_objective(ar_spec(2), s);
  const double count = static_cast<double>(obj->pair_count());
  const double expect = count * std::log(0.5);
  const double got = obj->evaluate(ThetaVector::Zero(2), nullptr);
  const auto pairs = random_pairs(rng, ar_spec(2), s, 100);
  const double got_list = log_pl(ThetaVector::Zero(2), pairs);
  const double worst = std::max(std::abs(got / expect - 1.0), std::abs(got_list / (100 * std::log(0.5)) - 1.0));
  return {worst, 4 * std::numeric_limits<double>::epsilon(),
          "log_pl(0) / (n_pairs ln 1/2) - 1, all pairs and a pair list"};
}

Outcome gradient_fd(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 60, 2);
  const DependenceSpec spec = mixed_spec();
  const auto pairs = random_pairs(rng, spec, s, 200);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    ThetaVector theta(static_cast<Eigen::Index>(spec.size()));
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = uniform(rng, -0.5, 0.5);
    const Vector g = log_pl_gradient(theta, pairs);
    Vector fd(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(theta[k]));
      ThetaVector tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      fd[k] = (log_pl(tp, pairs) - log_pl(tm, pairs)) / (2 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, fd.norm()));
  }
  return {worst, 1e-6, "analytic gradient vs central differences, 10 random theta"};
}

Outcome pair_vs_delta(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 40, 2);
  const DependenceSpec spec = mixed_spec();
  const Permutation id(40, 2);
  double worst = 0.0;
  for (const auto& ps : random_pairs(rng, spec, s, 100)) {
    const Vector delta = delta_statistic_swap(spec, s, id, ps.s1, ps.s2);
    worst = std::max(worst, (ps.x + delta).cwiseAbs().maxCoeff());
  }
  return {worst, 0.0, "pair statistic + swap delta, 100 pairs"};
}

Outcome gd_monotone(Rng& rng, const VerifyOptions&) {
  ClassicalARParams p;
  p.phi = Vector::Constant(1, 0.5);
  p.sigma2 = 0.5;
  const TimeSeries s = simulate_ar(p, 400, 100, rng());
  GdConfig cfg;
  cfg.keep_trace = true;
  const auto r = fit_naive(ar_spec(2), s, cfg);
  double worst = 0.0;
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    worst = std::max(worst, r.objective_trace[i - 1] - r.objective_trace[i]);
  }
  return {worst, 0.0, "largest decrease of the mean objective between accepted epochs"};
}

Outcome streamed_vs_materialized(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 300, 2);
  const DependenceSpec spec = mixed_spec();
  GdConfig stream;
  stream.materialize_limit = 0;
  stream.threads = 3;
  const auto a = all_pairs_objective(spec, s);
  const auto b = all_pairs_objective(spec, s, stream);
  ThetaVector theta(static_cast<Eigen::Index>(spec.size()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = uniform(rng, -0.3, 0.3);
  Vector ga, gb;
  const double fa = a->evaluate(theta, &ga);
  const double fb = b->evaluate(theta, &gb);
  const double worst = std::max(rel(fb, fa), (ga - gb).norm() / std::max(1.0, ga.norm()));
  return {worst, 1e-12, "all-pairs objective, materialized vs streamed over 3 threads"};
}

Outcome two_point_form(Rng& rng, const VerifyOptions&) {
  const TimeSeries s = random_series(rng, 4, 1);
  double worst = 0.0;
  const Vector delta = delta_statistic_swap(ar_spec(1), s, Permutation(4, 1), 1, 2);
  for (int i = 0; i < 20; ++i) {
    const ThetaVector theta = ThetaVector::Constant(1, uniform(rng, -5, 5));
    const double f = oracle::exact_conditional_likelihood(ar_spec(1), s, theta);
    worst = std::max(worst, std::abs(f - 1.0 / (1.0 + std::exp(theta.dot(delta)))));
  }
  return {worst, 1e-14, "n - 2d = 2 against 1 / (1 + exp(theta' delta))"};
}

Outcome simd_equivalence(Rng& rng, const VerifyOptions&) {
  const auto* simd = kernels::avx2_kernels();
  if (!simd || !kernels::cpu_has_avx2()) return {0.0, 0.0, "AVX2 variant unavailable, skipped"};
  const auto& ref = kernels::scalar_kernels();
  const std::size_t count = 1037;
  std::vector<double> z(count), a(count), b(count);
  for (auto& v : z) v = uniform(rng, -60, 60);
  z[0] = 0.0;
  z[1] = 745.0;
  z[2] = -745.0;
  double worst = 0.0;
  ref.log_sigmoid(z.data(), count, a.data());
  simd->log_sigmoid(z.data(), count, b.data());
  for (std::size_t i = 0; i < count; ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (std::abs(a[i]) + 1e-300));
  ref.sigmoid_neg(z.data(), count, a.data());
  simd->sigmoid_neg(z.data(), count, b.data());
  for (std::size_t i = 0; i < count; ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (std::abs(a[i]) + 1e-300));

  const std::size_t k = 3;
  std::vector<double> x(k * count);
  for (auto& v : x) v = uniform(rng, -4, 4);
  const double theta[3] = {0.7, -0.2, 0.4};
  std::vector<double> ga(k, 0.0), gb(k, 0.0);
  kernels::LogisticSums sa{0.0, ga.data()}, sb{0.0, gb.data()};
  ref.logistic_accumulate(x.data(), count, k, count, theta, sa);
  simd->logistic_accumulate(x.data(), count, k, count, theta, sb);
  worst = std::max(worst, std::abs(sa.log_pl - sb.log_pl) / std::abs(sa.log_pl));
  for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(ga[i] - gb[i]) / (std::abs(ga[i]) + 1.0));
  return {worst, 1e-12, "scalar vs AVX2 log-sigmoid, sigmoid and logistic sums"};
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all{
      {"core.swap_delta_matches_recompute", swap_delta},
      {"core.eval_h_multilinear", multilinear},
      {"core.reversal_invariance_ar1", reversal},
      {"core.permutation_invariance_remainder", remainder_invariance},
      {"gaussian.round_trip_ar1", round_trip_ar1},
      {"gaussian.round_trip_ar2", round_trip_ar2},
      {"gaussian.round_trip_var1", round_trip_var1},
      {"gaussian.riccati_residual", riccati_residual},
      {"gaussian.round_trip_ard", round_trip_ard},
      {"gaussian.fisher_info_quadrature", fisher_closed_form},
      {"gaussian.fisher_orthogonality", fisher_orthogonality},
      {"gaussian.pythagorean_identity", pythagorean},
      {"gaussian.divergence_nonnegative", divergence_nonnegative},
      {"gaussian.e_kernel_stationary", e_kernel_stationary},
      {"mcle.detailed_balance", detailed_balance},
      {"mcle.zero_theta_acceptance", zero_theta_acceptance},
      {"mcle.conditional_law_normalized", law_normalized},
      {"mcle.score_zero_mean", score_zero_mean},
      {"mcle.exact_scoring_matches_oracle", exact_scoring},
      {"ple.log_pl_at_zero", log_pl_zero},
      {"ple.gradient_finite_difference", gradient_fd},
      {"ple.pair_statistic_negated_delta", pair_vs_delta},
      {"ple.gd_objective_monotone", gd_monotone},
      {"ple.streamed_matches_materialized", streamed_vs_materialized},
      {"oracle.two_point_conditional_law", two_point_form},
      {"kernels.simd_matches_scalar", simd_equivalence},
  };
  return all;
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& c : checks()) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  std::uint64_t i = 0;
  for (const auto& c : checks()) {
    Rng rng(options.seed + 7919 * i++);
    CheckResult r;
    r.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(rng, options);
      r.measured = o.measured;
      r.tolerance = o.tolerance;
      r.detail = o.detail;
      r.passed = o.measured <= o.tolerance;
    } catch (const std::exception& e) {
      r.passed = false;
      r.measured = std::numeric_limits<double>::infinity();
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mimm::app

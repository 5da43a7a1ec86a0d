#include "mimm/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "mimm/core/statistics.hpp"
#include "mimm/error.hpp"
#include "mimm/gaussian/transforms.hpp"

namespace mimm::oracle {
namespace {

// Design matrix rows t = d..n-1 holding (x_{t-1}, …, x_{t-d}) stacked.
void lagged_design(const TimeSeries& series, int d, Matrix& z, Matrix& y) {
  const auto n = static_cast<Eigen::Index>(series.length());
  const auto p = static_cast<Eigen::Index>(series.dim());
  const Eigen::Index rows = n - d;
  z.resize(rows, d * p);
  y.resize(rows, p);
  for (Eigen::Index t = d; t < n; ++t) {
    for (Eigen::Index c = 0; c < p; ++c) y(t - d, c) = series(t, c);
    for (Eigen::Index k = 1; k <= d; ++k) {
      for (Eigen::Index c = 0; c < p; ++c) z(t - d, (k - 1) * p + c) = series(t - k, c);
    }
  }
}

Matrix least_squares(const Matrix& z, const Matrix& y) {
  const Eigen::ColPivHouseholderQR<Matrix> qr(z);
  require(qr.rank() == z.cols(), ErrorKind::ill_conditioned,
          "least-squares design is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
              std::to_string(z.cols()) + ")");
  return qr.solve(y);
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

double log_cl(const EnumeratedStatistics& stats, const ThetaVector& theta) {
  return theta.dot(stats.observed()) - log_partition(stats, theta);
}

}  // namespace

OlsArResult mle_ols_ar(const TimeSeries& series, int d) {
  require(series.dim() == 1, ErrorKind::shape, "mle_ols_ar needs a univariate series");
  require(d >= 1, ErrorKind::validation, "order must be >= 1");
  require(series.length() >= 2 * static_cast<std::size_t>(d) + 2, ErrorKind::insufficient_data,
          "mle_ols_ar needs n >= 2d + 2");
  Matrix z, y;
  lagged_design(series, d, z, y);
  const Matrix coef = least_squares(z, y);
  const Vector resid = y - z * coef;
  OlsArResult out;
  out.classical.phi = coef.col(0);
  out.classical.sigma2 = resid.squaredNorm() / static_cast<double>(z.rows());
  out.mininfo = ard_to_mininfo(out.classical);
  return out;
}

OlsVarResult mle_ols_var(const TimeSeries& series, int d) {
  require(d >= 1, ErrorKind::validation, "order must be >= 1");
  const auto p = static_cast<Eigen::Index>(series.dim());
  require(series.length() >= static_cast<std::size_t>(d * p + d + 1), ErrorKind::insufficient_data,
          "mle_ols_var needs more observations than regressors");
  Matrix z, y;
  lagged_design(series, d, z, y);
  const Matrix coef = least_squares(z, y);  // (dp)×p, column c predicts component c
  const Matrix resid = y - z * coef;
  OlsVarResult out;
  for (int k = 0; k < d; ++k) out.classical.A.push_back(coef.middleRows(k * p, p).transpose());
  out.classical.Sigma = resid.transpose() * resid / static_cast<double>(z.rows());
  out.classical.Sigma = 0.5 * (out.classical.Sigma + out.classical.Sigma.transpose());
  if (d == 1 && spectral_radius(out.classical) < 1.0) out.mininfo = var1_to_mininfo(out.classical);
  return out;
}

EnumeratedStatistics enumerate_statistics(const DependenceSpec& spec, const TimeSeries& series,
                                          const EnumerationBudget& budget) {
  const std::size_t n = series.length();
  const auto d = static_cast<std::size_t>(spec.order());
  require(n >= 2 * d + 1, ErrorKind::insufficient_data, "series has no interior");
  const std::size_t m = n - 2 * d;
  require(m <= budget.max_interior, ErrorKind::budget_exceeded,
          "interior of " + std::to_string(m) + " positions exceeds the enumeration budget of " +
              std::to_string(budget.max_interior));
  const StatisticEvaluator eval(spec, series);
  std::size_t count = 1;
  for (std::size_t i = 2; i <= m; ++i) count *= i;

  EnumeratedStatistics out;
  out.H.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(eval.size()));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Permutation perm(n, d);
  std::size_t row = 0;
  do {
    perm.assign(order);
    out.H.row(static_cast<Eigen::Index>(row++)) = eval.total(perm).transpose();
    out.orders.push_back(order);
  } while (std::next_permutation(order.begin() + static_cast<std::ptrdiff_t>(d),
                                 order.end() - static_cast<std::ptrdiff_t>(d)));
  return out;
}

double log_partition(const EnumeratedStatistics& stats, const ThetaVector& theta) {
  return log_sum_exp(stats.H * theta);
}

Vector conditional_probabilities(const EnumeratedStatistics& stats, const ThetaVector& theta) {
  const Vector a = stats.H * theta;
  return (a.array() - log_sum_exp(a)).exp().matrix();
}

Moments exact_moments(const EnumeratedStatistics& stats, const ThetaVector& theta) {
  const Vector w = conditional_probabilities(stats, theta);
  Moments m;
  m.mean = stats.H.transpose() * w;
  const Matrix c = stats.H.rowwise() - m.mean.transpose();
  m.cov = c.transpose() * w.asDiagonal() * c;
  m.acceptance_rate = 1.0;
  return m;
}

double exact_conditional_likelihood(const DependenceSpec& spec, const TimeSeries& series,
                                    const ThetaVector& theta, const EnumerationBudget& budget) {
  const auto stats = enumerate_statistics(spec, series, budget);
  require(theta.size() == stats.H.cols(), ErrorKind::shape, "theta length differs from K");
  return std::exp(log_cl(stats, theta));
}

ExactCleResult exact_cle(const EnumeratedStatistics& stats) {
  const auto k = stats.H.cols();
  const Vector h = stats.observed();
  const double spread = (stats.H.rowwise() - h.transpose()).rowwise().norm().maxCoeff();
  ExactCleResult res;
  res.theta = ThetaVector::Zero(k);
  if (spread == 0.0) return res;

  // Scalar case: the identity sitting at an extreme of H means no maximizer.
  if (k == 1) {
    const double lo = stats.H.col(0).minCoeff();
    const double hi = stats.H.col(0).maxCoeff();
    if (h[0] >= hi || h[0] <= lo) {
      res.finite = false;
      res.divergence_direction = Vector::Constant(1, h[0] >= hi ? 1.0 : -1.0);
      return res;
    }
  }

  ThetaVector theta = ThetaVector::Zero(k);
  double f = log_cl(stats, theta);
  for (int it = 0; it < 500; ++it) {
    res.iterations = it + 1;
    const Moments m = exact_moments(stats, theta);
    const Vector g = h - m.mean;
    if (g.norm() < 1e-13 * (1.0 + h.norm())) break;
    const Matrix hess = m.cov + 1e-14 * std::max(m.cov.trace(), 1e-300) * Matrix::Identity(k, k);
    Vector step = hess.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) <= 0) step = g;
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      const ThetaVector cand = theta + alpha * step;
      const double fc = log_cl(stats, cand);
      if (fc >= f) {
        moved = fc > f || alpha == 1.0;
        theta = cand;
        f = fc;
        break;
      }
    }
    if (theta.norm() * spread > 700.0) {
      res.finite = false;
      res.divergence_direction = theta.normalized();
      return res;
    }
    if (!moved) break;
  }
  res.theta = theta;
  return res;
}

ExactCleResult exact_cle(const DependenceSpec& spec, const TimeSeries& series,
                         const EnumerationBudget& budget) {
  return exact_cle(enumerate_statistics(spec, series, budget));
}

double grid_search_cle(const EnumeratedStatistics& stats, double lo, double hi, std::size_t points) {
  require(stats.H.cols() == 1, ErrorKind::shape, "grid search is for a scalar theta");
  require(points >= 3 && hi > lo, ErrorKind::validation, "grid needs >= 3 points on a proper range");
  const double step = (hi - lo) / static_cast<double>(points - 1);
  const auto f = [&](double t) { return log_cl(stats, ThetaVector::Constant(1, t)); };
  std::size_t best = 0;
  double fbest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v > fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = lo + step * static_cast<double>(std::min(best + 1, points - 1));
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

void gauss_hermite(std::size_t nodes, Vector& x, Vector& w) {
  require(nodes >= 1, ErrorKind::validation, "quadrature needs at least one node");
  const auto n = static_cast<Eigen::Index>(nodes);
  Matrix j = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(i) / 2.0);
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  x = es.eigenvalues();
  w = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).array().square().transpose();
}

Eigen::Matrix2d ar1_fisher_info_numeric(double theta, double tau2) {
  require(tau2 > 0, ErrorKind::parameter_domain, "tau2 must be positive");
  Vector nodes, weights;
  gauss_hermite(64, nodes, weights);

  // δ through (θ, τ²) → (φ, σ²), written out here rather than shared.
  const auto delta_expect = [&](double th, double t2) {
    const double sigma2 = 2.0 * t2 / (1.0 + std::sqrt(1.0 + 4.0 * th * th * t2 * t2));
    const double phi = th * sigma2;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      const double x = std::sqrt(2.0 * tau2) * nodes[i];
      const double delta = (1.0 + phi * phi) * x * x / (2.0 * sigma2) +
                           0.5 * std::log(2.0 * std::numbers::pi * sigma2);
      acc += weights[i] * delta;
    }
    return acc / std::sqrt(std::numbers::pi);
  };

  const double p[2] = {theta, tau2};
  const double h[2] = {1e-4 * std::max(std::abs(theta), 1.0), 1e-4 * std::max(std::abs(tau2), 1.0)};
  const auto at = [&](double d0, double d1) { return delta_expect(p[0] + d0, p[1] + d1); };
  Eigen::Matrix2d g;
  const double f0 = at(0, 0);
  g(0, 0) = (at(h[0], 0) - 2.0 * f0 + at(-h[0], 0)) / (h[0] * h[0]);
  g(1, 1) = (at(0, h[1]) - 2.0 * f0 + at(0, -h[1])) / (h[1] * h[1]);
  g(0, 1) = g(1, 0) =
      (at(h[0], h[1]) - at(h[0], -h[1]) - at(-h[0], h[1]) + at(-h[0], -h[1])) / (4.0 * h[0] * h[1]);
  return g;
}

double ar1_log_density(std::span<const double> x, double phi, double sigma2) {
  require(!x.empty(), ErrorKind::validation, "empty series");
  require(std::abs(phi) < 1.0 && sigma2 > 0, ErrorKind::parameter_domain, "invalid AR(1) params");
  const double tau2 = sigma2 / (1.0 - phi * phi);
  const double l2pi = std::log(2.0 * std::numbers::pi);
  double out = -0.5 * (l2pi + std::log(tau2) + x[0] * x[0] / tau2);
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double e = x[t] - phi * x[t - 1];
    out -= 0.5 * (l2pi + std::log(sigma2) + e * e / sigma2);
  }
  return out;
}

}  // namespace mimm::oracle

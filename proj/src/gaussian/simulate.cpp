#include "mimm/gaussian/simulate.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Cholesky>

#include "mimm/error.hpp"

namespace mimm {

TimeSeries simulate_ar(const ClassicalARParams& params, std::size_t n, int burn_in,
                       std::uint64_t seed) {
  validate_stationary(params);
  require(n >= 1, ErrorKind::validation, "simulation length must be >= 1");
  require(burn_in >= 0, ErrorKind::validation, "burn-in must be >= 0");
  const auto d = static_cast<std::size_t>(params.phi.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // history[0..d) is the pre-sample state, oldest first.
  std::vector<double> history(d, 0.0);
  if (d <= 2) {
    const Vector gamma = ar_autocovariance(params);
    Matrix cov(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            gamma[static_cast<Eigen::Index>(i > j ? i - j : j - i)];
      }
    }
    const Matrix l = cov.llt().matrixL();
    Vector z(static_cast<Eigen::Index>(d));
    for (auto& v : z) v = normal(rng);
    const Vector x0 = l * z;
    for (std::size_t i = 0; i < d; ++i) history[i] = x0[static_cast<Eigen::Index>(i)];
  } else {
    burn_in = std::max(burn_in, kMinBurnInFromZero);
  }

  const double sd = std::sqrt(params.sigma2);
  const std::size_t total = static_cast<std::size_t>(burn_in) + n;
  std::vector<double> x(d + total);
  std::copy(history.begin(), history.end(), x.begin());
  for (std::size_t t = d; t < d + total; ++t) {
    double v = sd * normal(rng);
    for (std::size_t i = 1; i <= d; ++i) v += params.phi[static_cast<Eigen::Index>(i - 1)] * x[t - i];
    x[t] = v;
  }
  return TimeSeries::univariate(std::span<const double>(x).subspan(d + static_cast<std::size_t>(burn_in)));
}

TimeSeries simulate_var(const ClassicalVARParams& params, std::size_t n, int burn_in,
                        std::uint64_t seed) {
  validate_stationary(params);
  require(n >= 1, ErrorKind::validation, "simulation length must be >= 1");
  require(burn_in >= 0, ErrorKind::validation, "burn-in must be >= 0");
  const std::size_t d = params.A.size();
  const auto p = params.Sigma.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](const Matrix& chol) {
    Vector z(chol.rows());
    for (auto& v : z) v = normal(rng);
    return Vector(chol * z);
  };

  const Matrix noise_chol = params.Sigma.llt().matrixL();
  std::vector<Vector> x(d, Vector::Zero(p));
  if (d == 1) {
    const Matrix b = lyapunov_covariance(params.A[0], params.Sigma);
    x[0] = draw(b.llt().matrixL());
  } else {
    burn_in = std::max(burn_in, kMinBurnInFromZero);
  }

  const std::size_t total = static_cast<std::size_t>(burn_in) + n;
  x.reserve(d + total);
  for (std::size_t t = d; t < d + total; ++t) {
    Vector v = draw(noise_chol);
    for (std::size_t k = 1; k <= d; ++k) v += params.A[k - 1] * x[t - k];
    x.push_back(std::move(v));
  }
  RowMatrix out(static_cast<Eigen::Index>(n), p);
  const std::size_t first = d + static_cast<std::size_t>(burn_in);
  for (std::size_t t = 0; t < n; ++t) out.row(static_cast<Eigen::Index>(t)) = x[first + t].transpose();
  return TimeSeries(std::move(out));
}

}  // namespace mimm

#pragma once

#include <optional>

#include <Eigen/Core>

#include "mimm/core/time_series.hpp"

namespace mimm {

/// y | x ~ N(F x, S), optionally with the stationary covariance B = F B Fᵀ + S.
struct GaussianKernel {
  Matrix F;
  Matrix S;
  std::optional<Matrix> stationary_cov;
};

/// Scalar kernel p(y|x) = exp(θxy + Ky² − Kx² − Dy² − C).
struct EKernel {
  double theta = 0.0;
  double D = 0.0;
  double K = 0.0;
  double C = 0.0;
  GaussianKernel kernel;

  double log_density(double y, double x) const {
    return theta * x * y + K * y * y - K * x * x - D * y * y - C;
  }
};

/// Requires D > |θ|.  K = ½(D − √(D²−θ²)), slope θ/(2(D−K)), conditional
/// variance 1/(2(D−K)), stationary variance 1/(2√(D²−θ²)).
EKernel construct_e_kernel(double theta, double D);

/// Gaussian AR(1) kernel with its stationary variance.
GaussianKernel ar1_kernel(double phi, double sigma2);

/// ∫ r_p(x) KL(p(·|x) ‖ q(·|x)) dx in closed form for conditionally Gaussian
/// kernels; p must carry its stationary covariance.
double divergence_rate(const GaussianKernel& p, const GaussianKernel& q);

/// Closed-form Fisher information of (θ, τ²) for the Gaussian AR(1) model.
Eigen::Matrix2d ar1_fisher_info(double theta, double tau2);

}  // namespace mimm

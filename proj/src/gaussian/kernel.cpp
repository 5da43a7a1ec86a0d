#include "mimm/gaussian/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "mimm/error.hpp"

namespace mimm {

EKernel construct_e_kernel(double theta, double D) {
  require(std::isfinite(theta) && std::isfinite(D), ErrorKind::parameter_domain,
          "theta and D must be finite");
  require(D > std::abs(theta), ErrorKind::parameter_domain, "construct_e_kernel needs D > |theta|");
  EKernel e;
  e.theta = theta;
  e.D = D;
  const double r = std::sqrt(D * D - theta * theta);
  e.K = 0.5 * (D - r);
  // D − K = (D + r)/2, written this way to avoid cancellation.
  const double dk = 0.5 * (D + r);
  e.C = 0.5 * std::log(std::numbers::pi / dk);
  e.kernel.F = Matrix::Constant(1, 1, theta / (2.0 * dk));
  e.kernel.S = Matrix::Constant(1, 1, 1.0 / (2.0 * dk));
  e.kernel.stationary_cov = Matrix::Constant(1, 1, 1.0 / (2.0 * r));
  return e;
}

GaussianKernel ar1_kernel(double phi, double sigma2) {
  require(std::abs(phi) < 1.0 && sigma2 > 0, ErrorKind::parameter_domain,
          "ar1_kernel needs |phi| < 1 and sigma2 > 0");
  return {Matrix::Constant(1, 1, phi), Matrix::Constant(1, 1, sigma2),
          Matrix::Constant(1, 1, sigma2 / (1.0 - phi * phi))};
}

double divergence_rate(const GaussianKernel& p, const GaussianKernel& q) {
  require(p.stationary_cov.has_value(), ErrorKind::contract,
          "divergence_rate needs the stationary covariance of the first kernel");
  const auto dim = p.S.rows();
  require(p.F.rows() == dim && p.F.cols() == dim && q.F.rows() == dim && q.F.cols() == dim &&
              q.S.rows() == dim && p.stationary_cov->rows() == dim,
          ErrorKind::shape, "kernel dimensions do not match");
  const Eigen::LLT<Matrix> lp(p.S);
  const Eigen::LLT<Matrix> lq(q.S);
  require(lp.info() == Eigen::Success && lq.info() == Eigen::Success, ErrorKind::parameter_domain,
          "conditional covariances must be positive definite");
  const auto logdet = [](const Eigen::LLT<Matrix>& l) {
    return 2.0 * l.matrixLLT().diagonal().array().log().sum();
  };
  const Matrix df = p.F - q.F;
  const double tr_s = lq.solve(p.S).trace();
  const double tr_m = (*p.stationary_cov * df.transpose() * lq.solve(df)).trace();
  return 0.5 * (logdet(lq) - logdet(lp) - static_cast<double>(dim) + tr_s + tr_m);
}

Eigen::Matrix2d ar1_fisher_info(double theta, double tau2) {
  require(std::isfinite(theta) && std::isfinite(tau2) && tau2 > 0, ErrorKind::parameter_domain,
          "ar1_fisher_info needs finite theta and tau2 > 0");
  const double t4 = tau2 * tau2;
  const double s = std::sqrt(1.0 + 4.0 * theta * theta * t4);
  Eigen::Matrix2d g;
  g << 2.0 * t4 / (s * (1.0 + s)), 0.0, 0.0, 1.0 / (2.0 * t4 * s);
  return g;
}

}  // namespace mimm

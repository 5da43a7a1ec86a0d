#include "mimm/gaussian/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mimm/error.hpp"

namespace mimm {
namespace {

void require_order(const ClassicalARParams& params, Eigen::Index d, const char* what) {
  require(params.phi.size() == d, ErrorKind::shape,
          std::string(what) + " expects " + std::to_string(d) + " AR coefficients");
}

void require_tau2(double tau2) {
  require(std::isfinite(tau2) && tau2 > 0, ErrorKind::parameter_domain, "tau2 must be positive");
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix floor_eigenvalues(const Matrix& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() >= floor) return m;
  const Vector ev = es.eigenvalues().cwiseMax(floor);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

Matrix small_inverse(const Matrix& m) {
  if (m.rows() <= 4) return m.inverse();
  return m.ldlt().solve(Matrix::Identity(m.rows(), m.cols()));
}

// γ_0 of the AR(d) with unit noise; nullopt outside the stationary region.
std::optional<double> unit_noise_variance(const Vector& phi) {
  ClassicalARParams p{phi, 1.0};
  if (!phi.allFinite() || spectral_radius(p) >= 1.0) return std::nullopt;
  const double v = ar_autocovariance(p)[0];
  if (!(v > 0) || !std::isfinite(v)) return std::nullopt;
  return v;
}

Vector theta_numerator(const Vector& phi) {
  const auto d = phi.size();
  Vector out = phi;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) out[k - j - 1] -= phi[j] * phi[k];
  }
  return out;
}

}  // namespace

MinInfoARParams ar1_to_mininfo(const ClassicalARParams& params) {
  require_order(params, 1, "ar1_to_mininfo");
  validate_stationary(params);
  const double phi = params.phi[0];
  return {Vector::Constant(1, phi / params.sigma2), params.sigma2 / (1.0 - phi * phi)};
}

ClassicalARParams mininfo_to_ar1(const MinInfoARParams& params) {
  require(params.theta.size() == 1, ErrorKind::shape, "mininfo_to_ar1 expects one theta");
  require_tau2(params.tau2);
  const double theta = params.theta[0];
  const double tau2 = params.tau2;
  const double s = std::sqrt(1.0 + 4.0 * theta * theta * tau2 * tau2);
  const double sigma2 = 2.0 * tau2 / (1.0 + s);
  return {Vector::Constant(1, theta * sigma2), sigma2};
}

MinInfoARParams ar2_to_mininfo(const ClassicalARParams& params) {
  require_order(params, 2, "ar2_to_mininfo");
  validate_stationary(params);
  const double p1 = params.phi[0];
  const double p2 = params.phi[1];
  const double s2 = params.sigma2;
  Vector theta(2);
  theta << p1 * (1.0 - p2) / s2, p2 / s2;
  const double tau2 = (1.0 - p2) * s2 / ((1.0 + p2) * (1.0 - p1 - p2) * (1.0 + p1 - p2));
  return {theta, tau2};
}

double ar2_inverse_objective(double theta1, double theta2, double t) {
  const double a = 1.0 - theta2 * t;
  return (1.0 - theta2 * theta2 * t * t) / t - (1.0 + theta2 * t) * theta1 * theta1 * t / (a * a * a);
}

double ar2_inverse_bracket(double theta1, double theta2) {
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&best](double t) {
    if (t > 0 && std::isfinite(t)) best = std::min(best, t);
  };
  if (theta2 < 0) consider(-1.0 / theta2);
  if (theta2 > 0) consider(1.0 / theta2);
  // φ₁ + φ₂ = 1 and φ₂ − φ₁ = 1 in terms of t: θ₂²t² − (2θ₂ ± θ₁)t + 1 = 0.
  for (const double sign : {1.0, -1.0}) {
    const double a = theta2 * theta2;
    const double b = -(2.0 * theta2 + sign * theta1);
    if (a == 0.0) {
      if (b != 0.0) consider(-1.0 / b);
      continue;
    }
    const double disc = b * b - 4.0 * a;
    if (disc < 0) continue;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      consider(q / a);
      consider(1.0 / q);
    }
  }
  return best;
}

ClassicalARParams mininfo_to_ar2(const MinInfoARParams& params) {
  require(params.theta.size() == 2, ErrorKind::shape, "mininfo_to_ar2 expects two thetas");
  require(params.theta.allFinite(), ErrorKind::parameter_domain, "theta must be finite");
  require_tau2(params.tau2);
  const double th1 = params.theta[0];
  const double th2 = params.theta[1];
  if (th1 == 0.0 && th2 == 0.0) return {Vector::Zero(2), params.tau2};

  const double target = 1.0 / params.tau2;
  double lo = 0.0;
  double hi = ar2_inverse_bracket(th1, th2);
  require(std::isfinite(hi), ErrorKind::internal, "AR(2) inverse bracket is unbounded");
  for (int it = 0; it < 2000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = ar2_inverse_objective(th1, th2, mid);
    require(std::isfinite(g), ErrorKind::internal, "AR(2) inverse objective is not finite in the bracket");
    if (g > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  Vector phi(2);
  phi << th1 * t / (1.0 - th2 * t), th2 * t;
  return {phi, t};
}

MinInfoARParams ard_to_mininfo(const ClassicalARParams& params) {
  validate_stationary(params);
  const Vector theta = theta_numerator(params.phi) / params.sigma2;
  return {theta, ar_autocovariance(params)[0]};
}

ClassicalARParams mininfo_to_ard(const MinInfoARParams& params, const ArdInverseOptions& options) {
  const auto d = params.theta.size();
  require(d >= 1, ErrorKind::shape, "theta must be non-empty");
  require(params.theta.allFinite(), ErrorKind::parameter_domain, "theta must be finite");
  require_tau2(params.tau2);
  if (params.theta.isZero(0.0)) return {Vector::Zero(d), params.tau2};

  const Vector target = params.theta * params.tau2;
  // F(φ; λ) = num(φ) − λ θ τ² / γ₀(φ, 1); zero exactly at the inverse when λ = 1.
  const auto residual = [&](const Vector& phi, double lambda) -> std::optional<Vector> {
    const auto v = unit_noise_variance(phi);
    if (!v) return std::nullopt;
    return Vector(theta_numerator(phi) - lambda * target / *v);
  };
  const double scale = 1.0 + target.norm();

  Vector phi = Vector::Zero(d);
  double lambda = 0.0;
  double step = 0.1;
  int steps = 0;
  while (lambda < 1.0) {
    require(++steps <= options.max_steps, ErrorKind::no_solution_found,
            "AR(d) inverse continuation did not reach theta");
    const double next = std::min(1.0, lambda + step);
    Vector x = phi;
    bool ok = false;
    auto r = residual(x, next);
    for (int it = 0; r && it < options.max_newton; ++it) {
      if (r->norm() < 1e-13 * scale) {
        ok = true;
        break;
      }
      Matrix jac(d, d);
      bool jac_ok = true;
      for (Eigen::Index j = 0; j < d && jac_ok; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
        Vector xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const auto rp = residual(xp, next);
        const auto rm = residual(xm, next);
        jac_ok = rp && rm;
        if (jac_ok) jac.col(j) = (*rp - *rm) / (2.0 * h);
      }
      if (!jac_ok) break;
      const Vector dx = jac.fullPivLu().solve(-*r);
      if (!dx.allFinite()) break;
      double alpha = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        const Vector cand = x + alpha * dx;
        const auto rc = residual(cand, next);
        if (rc && rc->norm() < r->norm()) {
          x = cand;
          r = rc;
          improved = true;
          break;
        }
      }
      if (!improved) {
        ok = r->norm() < 1e-11 * scale;
        break;
      }
    }
    if (ok) {
      phi = x;
      lambda = next;
      step = std::min(0.5, step * 1.5);
    } else {
      step *= 0.5;
      require(step > 1e-10, ErrorKind::no_solution_found,
              "AR(d) inverse Newton iteration stalled at lambda=" + std::to_string(lambda));
    }
  }

  const double sigma2 = params.tau2 / *unit_noise_variance(phi);
  ClassicalARParams out{phi, sigma2};
  const auto back = ard_to_mininfo(out);
  const double err = std::max((back.theta - params.theta).norm() / (1.0 + params.theta.norm()),
                              std::abs(back.tau2 - params.tau2) / params.tau2);
  require(err < options.tol, ErrorKind::no_solution_found,
          "AR(d) inverse residual " + std::to_string(err) + " above tolerance");
  return out;
}

MinInfoVARParams var1_to_mininfo(const ClassicalVARParams& params) {
  require(params.A.size() == 1, ErrorKind::shape, "var1_to_mininfo expects one coefficient matrix");
  validate_stationary(params);
  const Matrix& a = params.A[0];
  return {a.transpose() * small_inverse(params.Sigma), lyapunov_covariance(a, params.Sigma)};
}

RiccatiReport solve_mininfo_riccati(const Matrix& Theta, const Matrix& B,
                                    const RiccatiOptions& options) {
  const auto p = B.rows();
  require(p >= 1 && B.cols() == p && Theta.rows() == p && Theta.cols() == p, ErrorKind::shape,
          "Theta and B must be square of the same size");
  require(Theta.allFinite() && B.allFinite(), ErrorKind::parameter_domain, "Theta and B must be finite");
  require((B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, B.cwiseAbs().maxCoeff()),
          ErrorKind::parameter_domain, "B must be symmetric");
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(B, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > 0, ErrorKind::parameter_domain, "B must be positive definite");
  }

  const Matrix r = symmetrize(Theta.transpose() * B * Theta);
  const double bnorm = B.norm();
  const auto residual_of = [&](const Matrix& s) { return (s + s * r * s - B).norm() / bnorm; };

  RiccatiReport rep;
  Matrix sigma = B;
  double res = residual_of(sigma);
  double gamma = 1.0;
  while (res >= options.tol && rep.fixed_point_iterations < options.max_fixed_point) {
    ++rep.fixed_point_iterations;
    Matrix cand = symmetrize((1.0 - gamma) * sigma + gamma * (B - sigma * r * sigma));
    cand = floor_eigenvalues(cand, options.eig_floor);
    const double rc = residual_of(cand);
    if (rc < res) {
      sigma = cand;
      res = rc;
      gamma = std::min(1.0, gamma * 1.25);
    } else {
      gamma *= 0.5;
      if (gamma < 1e-14) break;
    }
  }

  if (res >= options.tol) {
    rep.used_newton = true;
    const Matrix eye = Matrix::Identity(p, p);
    for (; rep.newton_iterations < options.max_newton && res >= options.tol; ++rep.newton_iterations) {
      const Matrix f = sigma + sigma * r * sigma - B;
      const Matrix rs = r * sigma;
      const Matrix sr = sigma * r;
      Matrix jac = Matrix::Identity(p * p, p * p);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
          jac.block(i * p, j * p, p, p) += rs(j, i) * eye + (i == j ? sr : Matrix::Zero(p, p));
        }
      }
      const Vector vf = Eigen::Map<const Vector>(f.data(), p * p);
      const Vector vd = jac.fullPivLu().solve(-vf);
      const Matrix step = Eigen::Map<const Matrix>(vd.data(), p, p);
      double alpha = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        const Matrix cand = floor_eigenvalues(symmetrize(sigma + alpha * step), options.eig_floor);
        const double rc = residual_of(cand);
        if (rc < res) {
          sigma = cand;
          res = rc;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
  }

  if (!(res < options.tol)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Riccati solve stopped at relative residual %.3e (tolerance %.3e)", res,
                  options.tol);
    fail(ErrorKind::no_solution_found, buf);
  }
  rep.Sigma = sigma;
  rep.residual = res;
  return rep;
}

ClassicalVARParams mininfo_to_var1(const MinInfoVARParams& params, const RiccatiOptions& options) {
  const auto rep = solve_mininfo_riccati(params.Theta, params.B, options);
  return {{rep.Sigma * params.Theta.transpose()}, rep.Sigma};
}

}  // namespace mimm

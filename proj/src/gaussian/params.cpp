#include "mimm/gaussian/params.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <map>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mimm/error.hpp"

namespace mimm {
namespace {

double max_abs_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
    fail(ErrorKind::validation, "parameter " + key + " has invalid value '" + s + "'");
  }
  return v;
}

// Splits "A.1.2.3" into prefix "A" and indices {1,2,3}.
bool split_key(const std::string& key, std::string& prefix, std::vector<int>& idx) {
  idx.clear();
  const auto dot = key.find('.');
  prefix = key.substr(0, dot);
  if (dot == std::string::npos) return true;
  std::size_t pos = dot + 1;
  while (pos <= key.size()) {
    const auto next = key.find('.', pos);
    const std::string part = key.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 1) return false;
    idx.push_back(v);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return true;
}

}  // namespace

double spectral_radius(const ClassicalARParams& params) {
  const auto d = params.phi.size();
  if (d == 0) return 0.0;
  Matrix c = Matrix::Zero(d, d);
  c.row(0) = params.phi.transpose();
  for (Eigen::Index i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  return max_abs_eigenvalue(c);
}

Matrix companion_matrix(const ClassicalVARParams& params) {
  const auto d = static_cast<Eigen::Index>(params.A.size());
  require(d >= 1, ErrorKind::validation, "VAR params need at least one coefficient matrix");
  const auto p = params.A.front().rows();
  Matrix c = Matrix::Zero(d * p, d * p);
  for (Eigen::Index k = 0; k < d; ++k) c.block(0, k * p, p, p) = params.A[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 1; k < d; ++k) c.block(k * p, (k - 1) * p, p, p).setIdentity();
  return c;
}

double spectral_radius(const ClassicalVARParams& params) {
  return max_abs_eigenvalue(companion_matrix(params));
}

void validate_stationary(const ClassicalARParams& params) {
  require(params.phi.size() >= 1, ErrorKind::validation, "AR params need at least one coefficient");
  require(params.phi.allFinite(), ErrorKind::parameter_domain, "AR coefficients must be finite");
  require(std::isfinite(params.sigma2) && params.sigma2 > 0, ErrorKind::parameter_domain,
          "sigma2 must be positive");
  const double rho = spectral_radius(params);
  require(rho < 1.0, ErrorKind::stationarity,
          "AR coefficients are not stationary (companion spectral radius " + fmt(rho) + " >= 1)");
}

void validate_stationary(const ClassicalVARParams& params) {
  require(!params.A.empty(), ErrorKind::validation, "VAR params need at least one coefficient matrix");
  const auto p = params.Sigma.rows();
  require(p >= 1 && params.Sigma.cols() == p, ErrorKind::shape, "Sigma must be square");
  for (const auto& a : params.A) {
    require(a.rows() == p && a.cols() == p, ErrorKind::shape, "every A_k must be p×p");
    require(a.allFinite(), ErrorKind::parameter_domain, "A must be finite");
  }
  require(params.Sigma.allFinite(), ErrorKind::parameter_domain, "Sigma must be finite");
  require((params.Sigma - params.Sigma.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, params.Sigma.cwiseAbs().maxCoeff()),
          ErrorKind::parameter_domain, "Sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(params.Sigma, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() > 0, ErrorKind::parameter_domain,
          "Sigma must be positive definite");
  const double rho = spectral_radius(params);
  require(rho < 1.0, ErrorKind::stationarity,
          "VAR coefficients are not stationary (companion spectral radius " + fmt(rho) + " >= 1)");
}

Vector ar_autocovariance(const ClassicalARParams& params) {
  validate_stationary(params);
  const auto d = params.phi.size();
  Matrix m = Matrix::Zero(d + 1, d + 1);
  Vector rhs = Vector::Zero(d + 1);
  rhs[0] = params.sigma2;
  for (Eigen::Index k = 0; k <= d; ++k) {
    m(k, k) += 1.0;
    for (Eigen::Index i = 1; i <= d; ++i) m(k, std::abs(k - i)) -= params.phi[i - 1];
  }
  return m.fullPivLu().solve(rhs);
}

Matrix lyapunov_covariance(const Matrix& A, const Matrix& Sigma) {
  const auto p = A.rows();
  Matrix b;
  if (p <= 8) {
    Eigen::MatrixXd kron(p * p, p * p);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) kron.block(i * p, j * p, p, p) = A(i, j) * A;
    }
    const Matrix lhs = Matrix::Identity(p * p, p * p) - kron;
    const Vector vs = Eigen::Map<const Vector>(Sigma.data(), p * p);
    const Vector vb = lhs.fullPivLu().solve(vs);
    b = Eigen::Map<const Matrix>(vb.data(), p, p);
  } else {
    b = Sigma;
    Matrix term = Sigma;
    for (int k = 0; k < 100000; ++k) {
      term = A * term * A.transpose();
      b += term;
      if (term.norm() <= 1e-17 * b.norm()) break;
    }
  }
  return 0.5 * (b + b.transpose());
}

Matrix var_stacked_covariance(const ClassicalVARParams& params) {
  const Matrix c = companion_matrix(params);
  const auto p = params.Sigma.rows();
  Matrix q = Matrix::Zero(c.rows(), c.cols());
  q.topLeftCorner(p, p) = params.Sigma;
  return lyapunov_covariance(c, q);
}

ParamRecord parse_param_record(const KeyValues& kv) {
  std::map<int, double> phi;
  std::map<int, double> theta;
  std::map<std::vector<int>, double> a, sigma, big_theta, b;
  std::optional<double> sigma2, tau2;
  for (const auto& [key, value] : kv) {
    std::string prefix;
    std::vector<int> idx;
    if (!split_key(key, prefix, idx)) fail(ErrorKind::validation, "malformed parameter key '" + key + "'");
    if (prefix == "n" || prefix == "seed" || prefix == "burn_in" || prefix == "kinds" ||
        prefix == "model") {
      continue;  // sidecar bookkeeping
    }
    const double v = to_double(key, value);
    if (prefix == "phi" && idx.size() == 1) {
      phi[idx[0]] = v;
    } else if (prefix == "theta" && idx.size() == 1) {
      theta[idx[0]] = v;
    } else if (prefix == "sigma2" && idx.empty()) {
      sigma2 = v;
    } else if (prefix == "tau2" && idx.empty()) {
      tau2 = v;
    } else if (prefix == "A" && idx.size() == 3) {
      a[idx] = v;
    } else if (prefix == "Sigma" && idx.size() == 2) {
      sigma[idx] = v;
    } else if (prefix == "Theta" && idx.size() == 2) {
      big_theta[idx] = v;
    } else if (prefix == "B" && idx.size() == 2) {
      b[idx] = v;
    } else {
      fail(ErrorKind::validation, "unknown parameter key '" + key + "'");
    }
  }

  const auto dense_vector = [](const std::map<int, double>& m, const char* name) {
    const int d = m.rbegin()->first;
    require(static_cast<int>(m.size()) == d, ErrorKind::validation,
            std::string(name) + " indices must run 1.." + std::to_string(d) + " without gaps");
    Vector v(d);
    for (const auto& [i, x] : m) v[i - 1] = x;
    return v;
  };
  const auto dense_matrix = [](const std::map<std::vector<int>, double>& m, int p, const char* name) {
    Matrix out = Matrix::Zero(p, p);
    for (const auto& [ij, x] : m) {
      require(ij[0] <= p && ij[1] <= p, ErrorKind::shape, std::string(name) + " index exceeds p");
      out(ij[0] - 1, ij[1] - 1) = x;
    }
    return out;
  };
  const auto dim_of = [](const std::map<std::vector<int>, double>& m) {
    int p = 0;
    for (const auto& [ij, x] : m) p = std::max({p, ij[ij.size() - 1], ij[ij.size() - 2]});
    return p;
  };

  const int kinds = !phi.empty() + !theta.empty() + !a.empty() + !big_theta.empty();
  require(kinds == 1, ErrorKind::validation,
          "parameter record must contain exactly one of phi.*, theta.*, A.*, Theta.*");
  if (!phi.empty()) {
    require(sigma2.has_value(), ErrorKind::validation, "AR record needs sigma2");
    return ClassicalARParams{dense_vector(phi, "phi"), *sigma2};
  }
  if (!theta.empty()) {
    require(tau2.has_value(), ErrorKind::validation, "min-info AR record needs tau2");
    return MinInfoARParams{dense_vector(theta, "theta"), *tau2};
  }
  if (!a.empty()) {
    require(!sigma.empty(), ErrorKind::validation, "VAR record needs Sigma.i.j entries");
    const int p = std::max(dim_of(a), dim_of(sigma));
    int d = 0;
    for (const auto& [kij, x] : a) d = std::max(d, kij[0]);
    ClassicalVARParams out;
    for (int k = 1; k <= d; ++k) {
      Matrix ak = Matrix::Zero(p, p);
      for (const auto& [kij, x] : a) {
        if (kij[0] == k) ak(kij[1] - 1, kij[2] - 1) = x;
      }
      out.A.push_back(ak);
    }
    out.Sigma = dense_matrix(sigma, p, "Sigma");
    return out;
  }
  require(!b.empty(), ErrorKind::validation, "min-info VAR record needs B.i.j entries");
  const int p = std::max(dim_of(big_theta), dim_of(b));
  return MinInfoVARParams{dense_matrix(big_theta, p, "Theta"), dense_matrix(b, p, "B")};
}

KeyValues to_key_values(const ParamRecord& record) {
  KeyValues kv;
  const auto put_matrix = [&kv](const std::string& prefix, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        kv[prefix + "." + std::to_string(i + 1) + "." + std::to_string(j + 1)] = fmt(m(i, j));
      }
    }
  };
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ClassicalARParams>) {
          for (Eigen::Index i = 0; i < r.phi.size(); ++i) kv["phi." + std::to_string(i + 1)] = fmt(r.phi[i]);
          kv["sigma2"] = fmt(r.sigma2);
        } else if constexpr (std::is_same_v<T, MinInfoARParams>) {
          for (Eigen::Index i = 0; i < r.theta.size(); ++i) {
            kv["theta." + std::to_string(i + 1)] = fmt(r.theta[i]);
          }
          kv["tau2"] = fmt(r.tau2);
        } else if constexpr (std::is_same_v<T, ClassicalVARParams>) {
          for (std::size_t k = 0; k < r.A.size(); ++k) put_matrix("A." + std::to_string(k + 1), r.A[k]);
          put_matrix("Sigma", r.Sigma);
        } else {
          put_matrix("Theta", r.Theta);
          put_matrix("B", r.B);
        }
      },
      record);
  return kv;
}

}  // namespace mimm

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mimm/core/io.hpp"
#include "mimm/core/time_series.hpp"

namespace mimm {

/// x_t = Σ φ_i x_{t-i} + ε_t, ε_t ~ N(0, σ²).
struct ClassicalARParams {
  Vector phi;
  double sigma2 = 1.0;
};

/// x_t = Σ A_k x_{t-k} + ε_t, ε_t ~ N(0, Σ).
struct ClassicalVARParams {
  std::vector<Matrix> A;
  Matrix Sigma;
};

/// Dependence parameter θ and stationary variance τ².
struct MinInfoARParams {
  Vector theta;
  double tau2 = 1.0;
};

/// Θ = AᵀΣ⁻¹ and the stationary covariance B.
struct MinInfoVARParams {
  Matrix Theta;
  Matrix B;
};

/// Companion-matrix spectral radius; stationary iff < 1.
double spectral_radius(const ClassicalARParams& params);
double spectral_radius(const ClassicalVARParams& params);
Matrix companion_matrix(const ClassicalVARParams& params);

/// Throw a stationarity / parameter-domain error on invalid input.
void validate_stationary(const ClassicalARParams& params);
void validate_stationary(const ClassicalVARParams& params);

/// Autocovariances γ_0..γ_d of a stationary AR(d) from the Yule–Walker system.
Vector ar_autocovariance(const ClassicalARParams& params);

/// vec(B) = (I − A⊗A)⁻¹ vec(Σ) for p <= 8, otherwise the truncated sum
/// Σ_k A^k Σ (Aᵀ)^k.
Matrix lyapunov_covariance(const Matrix& A, const Matrix& Sigma);

/// Stationary covariance of the stacked state (x_t, …, x_{t-d+1}), dp×dp.
Matrix var_stacked_covariance(const ClassicalVARParams& params);

using ParamRecord =
    std::variant<ClassicalARParams, ClassicalVARParams, MinInfoARParams, MinInfoVARParams>;

/// Flat key=value records, 1-based indices: phi.i, sigma2, A.k.i.j, Sigma.i.j,
/// theta.i, tau2, Theta.i.j, B.i.j.
ParamRecord parse_param_record(const KeyValues& kv);
KeyValues to_key_values(const ParamRecord& record);

}  // namespace mimm

#pragma once

#include "mimm/gaussian/params.hpp"

namespace mimm {

// AR(1): θ = φ/σ², τ² = σ²/(1−φ²).
MinInfoARParams ar1_to_mininfo(const ClassicalARParams& params);
ClassicalARParams mininfo_to_ar1(const MinInfoARParams& params);

// AR(2): θ₁ = φ₁(1−φ₂)/σ², θ₂ = φ₂/σ².  The inverse solves g(σ²) = 1/τ²
// by bisection below the first point where (φ₁, φ₂) reaches the boundary of
// the stationarity triangle.
MinInfoARParams ar2_to_mininfo(const ClassicalARParams& params);
ClassicalARParams mininfo_to_ar2(const MinInfoARParams& params);

/// The scalar function whose root in σ² gives the AR(2) inverse.
double ar2_inverse_objective(double theta1, double theta2, double t);
/// Upper end of the bisection bracket (+inf when θ = 0).
double ar2_inverse_bracket(double theta1, double theta2);

// AR(d): θ_i = (φ_i − Σ_{k−j=i} φ_j φ_k)/σ², τ² = γ_0.
MinInfoARParams ard_to_mininfo(const ClassicalARParams& params);

struct ArdInverseOptions {
  double tol = 1e-9;     // residual of the forward map, relative
  int max_newton = 60;   // per continuation step
  int max_steps = 4000;  // continuation steps in total
};

/// Best-effort numerical inverse for any d: Newton on φ with σ² = τ²/γ_0(φ, 1)
/// eliminated, continued along θ·λ for λ from 0 to 1.  Throws
/// no_solution_found when it cannot reach a stationary solution.
ClassicalARParams mininfo_to_ard(const MinInfoARParams& params,
                                 const ArdInverseOptions& options = {});

// VAR(1): Θ = AᵀΣ⁻¹, B the stationary covariance.
MinInfoVARParams var1_to_mininfo(const ClassicalVARParams& params);

struct RiccatiOptions {
  double tol = 1e-12;  // ‖Σ + ΣRΣ − B‖_F < tol·‖B‖_F, R = ΘᵀBΘ
  int max_fixed_point = 10000;
  int max_newton = 100;
  double eig_floor = 1e-12;
};

struct RiccatiReport {
  Matrix Sigma;
  double residual = 0.0;  // relative Frobenius residual
  int fixed_point_iterations = 0;
  int newton_iterations = 0;
  bool used_newton = false;
};

/// Solves B = ΣΘᵀBΘΣ + Σ for positive definite Σ.
RiccatiReport solve_mininfo_riccati(const Matrix& Theta, const Matrix& B,
                                    const RiccatiOptions& options = {});

/// Σ from the Riccati equation, then A = ΣΘᵀ.
ClassicalVARParams mininfo_to_var1(const MinInfoVARParams& params,
                                   const RiccatiOptions& options = {});

}  // namespace mimm

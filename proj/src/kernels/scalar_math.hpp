#pragma once

#include <algorithm>
#include <cmath>

namespace mimm::kernels::scalar {
// Internal linkage: this header is also compiled with -mavx2, and the two
// copies must not be merged by the linker.
namespace {

// log σ(z) = −softplus(−z), split so neither branch overflows.
inline double log_sigmoid(double z) {
  const double e = std::exp(-std::abs(z));
  return -(std::max(-z, 0.0) + std::log1p(e));
}

// σ(−z) = 1 − σ(z).
inline double sigmoid_neg(double z) {
  const double e = std::exp(-std::abs(z));
  return z >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
}

}  // namespace
}  // namespace mimm::kernels::scalar

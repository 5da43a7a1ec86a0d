#include <algorithm>
#include <cmath>

#include "mimm/core/summation.hpp"
#include "mimm/kernels/kernels.hpp"
#include "scalar_math.hpp"

namespace mimm::kernels {
namespace {

void pair_block_scalar(const FeatureTable& table, std::size_t s1, std::size_t s2_first,
                       std::size_t count, double* out, std::size_t ld) {
  const std::size_t n = table.n;
  for (std::size_t k = 0; k < table.terms; ++k) {
    double* row = out + k * ld;
    std::fill(row, row + count, 0.0);
    for (std::size_t f = table.term_begin[k]; f < table.term_begin[k + 1]; ++f) {
      const double* coef = table.coef.data() + f * n;
      const double* mono = table.mono.data() + f * n;
      const double c1 = coef[s1];
      const double m1 = mono[s1];
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t s2 = s2_first + j;
        row[j] += (c1 - coef[s2]) * (m1 - mono[s2]);
      }
    }
  }
}

void logistic_accumulate_scalar(const double* x, std::size_t ld, std::size_t k,
                                std::size_t count, const double* theta, LogisticSums& sums) {
  CompensatedSum log_pl;
  for (std::size_t j = 0; j < count; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += theta[i] * x[i * ld + j];
    log_pl.add(scalar::log_sigmoid(z));
    const double w = scalar::sigmoid_neg(z);
    for (std::size_t i = 0; i < k; ++i) sums.grad[i] += w * x[i * ld + j];
  }
  sums.log_pl += log_pl.value();
}

double log_sigmoid_sum_scalar(const double* x, std::size_t ld, std::size_t k, std::size_t count,
                              const double* theta) {
  CompensatedSum total;
  for (std::size_t j = 0; j < count; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += theta[i] * x[i * ld + j];
    total.add(scalar::log_sigmoid(z));
  }
  return total.value();
}

void log_sigmoid_scalar(const double* z, std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = scalar::log_sigmoid(z[j]);
}

void sigmoid_neg_scalar(const double* z, std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = scalar::sigmoid_neg(z[j]);
}

const KernelTable kScalar{"scalar",          pair_block_scalar,  logistic_accumulate_scalar,
                          log_sigmoid_sum_scalar, log_sigmoid_scalar, sigmoid_neg_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace mimm::kernels

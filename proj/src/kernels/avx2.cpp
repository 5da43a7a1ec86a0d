// Compiled with -mavx2 -mfma; only reached through the dispatch table after a
// CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mimm/core/summation.hpp"
#include "mimm/kernels/kernels.hpp"
#include "scalar_math.hpp"

namespace mimm::kernels {
namespace {

// Cephes exp: range-reduce by ln 2 in two parts, Padé on the remainder.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, c1, x);
  r = _mm256_fnmadd_pd(n, c2, r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));

  const __m256d ratio = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  __m256d e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ratio, _mm256_set1_pd(1.0));

  // 2^n through the exponent field; n >= -1022 after the clamp above.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(ni);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

// log1p(e) for e in [0, 1]: 2 atanh(u), u = e / (2 + e) <= 1/3.
inline __m256d log1p_unit_pd(__m256d e) {
  const __m256d u = _mm256_div_pd(e, _mm256_add_pd(_mm256_set1_pd(2.0), e));
  const __m256d w = _mm256_mul_pd(u, u);
  __m256d s = _mm256_set1_pd(1.0 / 33.0);
  for (int k = 15; k >= 0; --k) {
    s = _mm256_fmadd_pd(s, w, _mm256_set1_pd(1.0 / (2.0 * k + 1.0)));
  }
  return _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), u), s);
}

inline __m256d abs_pd(__m256d z) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), z);
}

// Returns log σ(z); writes σ(−z) to *sig when non-null.
inline __m256d logistic_pd(__m256d z, __m256d* sig) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d e = exp_pd(_mm256_sub_pd(zero, abs_pd(z)));
  const __m256d negz_pos = _mm256_max_pd(_mm256_sub_pd(zero, z), zero);
  const __m256d ls = _mm256_sub_pd(zero, _mm256_add_pd(negz_pos, log1p_unit_pd(e)));
  if (sig) {
    const __m256d denom = _mm256_add_pd(one, e);
    const __m256d nonneg = _mm256_cmp_pd(z, zero, _CMP_GE_OQ);
    *sig = _mm256_div_pd(_mm256_blendv_pd(one, e, nonneg), denom);
  }
  return ls;
}

// Per-lane Neumaier summation.
struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d t = _mm256_add_pd(sum, x);
    const __m256d big = _mm256_cmp_pd(abs_pd(sum), abs_pd(x), _CMP_GE_OQ);
    const __m256d a = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
    const __m256d b = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(b, a, big));
    sum = t;
  }
  void drain(CompensatedSum& out) const {
    alignas(32) double s[4], c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    for (int i = 0; i < 4; ++i) out.add(s[i]);
    for (int i = 0; i < 4; ++i) out.add(c[i]);
  }
};

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void pair_block_avx2(const FeatureTable& table, std::size_t s1, std::size_t s2_first,
                     std::size_t count, double* out, std::size_t ld) {
  const std::size_t n = table.n;
  const std::size_t vec_end = count & ~std::size_t{3};
  for (std::size_t k = 0; k < table.terms; ++k) {
    double* row = out + k * ld;
    const std::size_t f0 = table.term_begin[k];
    const std::size_t f1 = table.term_begin[k + 1];
    for (std::size_t j = 0; j < vec_end; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t f = f0; f < f1; ++f) {
        const double* coef = table.coef.data() + f * n;
        const double* mono = table.mono.data() + f * n;
        const __m256d dc = _mm256_sub_pd(_mm256_set1_pd(coef[s1]),
                                         _mm256_loadu_pd(coef + s2_first + j));
        const __m256d dm = _mm256_sub_pd(_mm256_set1_pd(mono[s1]),
                                         _mm256_loadu_pd(mono + s2_first + j));
        acc = _mm256_fmadd_pd(dc, dm, acc);
      }
      _mm256_storeu_pd(row + j, acc);
    }
    for (std::size_t j = vec_end; j < count; ++j) {
      double acc = 0.0;
      for (std::size_t f = f0; f < f1; ++f) {
        const double* coef = table.coef.data() + f * n;
        const double* mono = table.mono.data() + f * n;
        acc += (coef[s1] - coef[s2_first + j]) * (mono[s1] - mono[s2_first + j]);
      }
      row[j] = acc;
    }
  }
}

inline __m256d linear_pd(const double* x, std::size_t ld, std::size_t k, const double* theta,
                         std::size_t j) {
  __m256d z = _mm256_setzero_pd();
  for (std::size_t i = 0; i < k; ++i) {
    z = _mm256_fmadd_pd(_mm256_set1_pd(theta[i]), _mm256_loadu_pd(x + i * ld + j), z);
  }
  return z;
}

void logistic_accumulate_avx2(const double* x, std::size_t ld, std::size_t k,
                              std::size_t count, const double* theta, LogisticSums& sums) {
  thread_local std::vector<double> weights;
  weights.resize(count);
  const std::size_t vec_end = count & ~std::size_t{3};
  LaneSum lp;
  for (std::size_t j = 0; j < vec_end; j += 4) {
    __m256d sig;
    lp.add(logistic_pd(linear_pd(x, ld, k, theta, j), &sig));
    _mm256_storeu_pd(weights.data() + j, sig);
  }
  CompensatedSum log_pl;
  lp.drain(log_pl);
  for (std::size_t j = vec_end; j < count; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += theta[i] * x[i * ld + j];
    log_pl.add(scalar::log_sigmoid(z));
    weights[j] = scalar::sigmoid_neg(z);
  }
  sums.log_pl += log_pl.value();

  for (std::size_t i = 0; i < k; ++i) {
    const double* row = x + i * ld;
    __m256d g = _mm256_setzero_pd();
    for (std::size_t j = 0; j < vec_end; j += 4) {
      g = _mm256_fmadd_pd(_mm256_loadu_pd(weights.data() + j), _mm256_loadu_pd(row + j), g);
    }
    double gi = hsum(g);
    for (std::size_t j = vec_end; j < count; ++j) gi += weights[j] * row[j];
    sums.grad[i] += gi;
  }
}

double log_sigmoid_sum_avx2(const double* x, std::size_t ld, std::size_t k, std::size_t count,
                            const double* theta) {
  const std::size_t vec_end = count & ~std::size_t{3};
  LaneSum lp;
  for (std::size_t j = 0; j < vec_end; j += 4) {
    lp.add(logistic_pd(linear_pd(x, ld, k, theta, j), nullptr));
  }
  CompensatedSum total;
  lp.drain(total);
  for (std::size_t j = vec_end; j < count; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += theta[i] * x[i * ld + j];
    total.add(scalar::log_sigmoid(z));
  }
  return total.value();
}

void log_sigmoid_avx2(const double* z, std::size_t count, double* out) {
  const std::size_t vec_end = count & ~std::size_t{3};
  for (std::size_t j = 0; j < vec_end; j += 4) {
    _mm256_storeu_pd(out + j, logistic_pd(_mm256_loadu_pd(z + j), nullptr));
  }
  for (std::size_t j = vec_end; j < count; ++j) out[j] = scalar::log_sigmoid(z[j]);
}

void sigmoid_neg_avx2(const double* z, std::size_t count, double* out) {
  const std::size_t vec_end = count & ~std::size_t{3};
  for (std::size_t j = 0; j < vec_end; j += 4) {
    __m256d sig;
    logistic_pd(_mm256_loadu_pd(z + j), &sig);
    _mm256_storeu_pd(out + j, sig);
  }
  for (std::size_t j = vec_end; j < count; ++j) out[j] = scalar::sigmoid_neg(z[j]);
}

const KernelTable kAvx2{"avx2",          pair_block_avx2,  logistic_accumulate_avx2,
                        log_sigmoid_sum_avx2, log_sigmoid_avx2, sigmoid_neg_avx2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace mimm::kernels

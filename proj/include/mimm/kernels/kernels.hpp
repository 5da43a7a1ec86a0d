#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mimm {

class DependenceSpec;
class TimeSeries;

namespace kernels {

/// Pair statistics for positions more than d apart factor through per-position
/// tables.  Split every term k at each lag l it uses: mono_f[s] is the lag-l
/// part evaluated at x_s, coef_f[s] is the rest of the term in the window
/// t = s + l.  Then for s2 - s1 > d
///   x_k(s1, s2) = Σ_{f in k} (coef_f[s1] - coef_f[s2]) (mono_f[s1] - mono_f[s2]).
/// Tables are zero outside the interior.
struct FeatureTable {
  std::size_t n = 0;
  std::size_t order = 0;
  std::size_t terms = 0;     // K
  std::size_t features = 0;  // F
  std::vector<std::uint32_t> term_of;     // F entries, non-decreasing
  std::vector<std::uint32_t> term_begin;  // K+1 offsets into the features
  std::vector<double> coef;            // F×n, row f at f*n
  std::vector<double> mono;            // F×n
};

FeatureTable build_feature_table(const DependenceSpec& spec, const TimeSeries& series);

/// Running sums of log σ(θᵀx) and σ(−θᵀx)·x over a block of pairs.
struct LogisticSums {
  double log_pl = 0.0;
  double* grad = nullptr;  // K entries, accumulated into
};

struct KernelTable {
  const char* name;

  /// out[k*ld + j] = x_k(s1, s2_first + j) for j < count; requires
  /// s2_first > s1 + d and s2_first + count <= n - d.
  void (*pair_block)(const FeatureTable& table, std::size_t s1, std::size_t s2_first,
                     std::size_t count, double* out, std::size_t ld);

  /// z_j = Σ_k θ_k X[k*ld + j] for j < count; adds Σ_j log σ(z_j) and
  /// Σ_j σ(−z_j) X[k*ld + j] into sums.
  void (*logistic_accumulate)(const double* x, std::size_t ld, std::size_t k,
                              std::size_t count, const double* theta, LogisticSums& sums);

  /// Objective only (no gradient).
  double (*log_sigmoid_sum)(const double* x, std::size_t ld, std::size_t k, std::size_t count,
                            const double* theta);

  /// Elementwise helpers, exposed for equivalence tests.
  void (*log_sigmoid)(const double* z, std::size_t count, double* out);
  void (*sigmoid_neg)(const double* z, std::size_t count, double* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

/// The table used by the estimators: AVX2 when compiled and supported by the
/// CPU, unless MIMM_KERNELS=scalar is set in the environment.
const KernelTable& active_kernels();
/// Override for the rest of the process ("scalar", "avx2" or "auto").
void select_kernels(const std::string& name);

}  // namespace kernels
}  // namespace mimm

#pragma once

#include <cstddef>
#include <vector>

#include "mimm/core/dependence.hpp"
#include "mimm/core/permutation.hpp"
#include "mimm/core/time_series.hpp"

namespace mimm {

/// h(window) where window row 0 is x_t and row i is x_{t-i}; window is (d+1)×p.
Vector eval_h(const DependenceSpec& spec, const RowMatrix& window);

/// H = Σ_{t=d}^{n-1} h(x_{t:t-d}) over the identity ordering (0-based t).
SufficientStatistic total_statistic(const DependenceSpec& spec, const TimeSeries& series);
SufficientStatistic total_statistic(const DependenceSpec& spec, const TimeSeries& series,
                                    const Permutation& order);

/// H(order with positions s1, s2 exchanged) − H(order), touching only the
/// windows that contain s1 or s2.
Vector delta_statistic_swap(const DependenceSpec& spec, const TimeSeries& series,
                            const Permutation& order, std::size_t s1, std::size_t s2);

/// A dependence spec bound to one series, with the monomials flattened for
/// repeated evaluation.  Cheap to copy; holds a reference to the series.
class StatisticEvaluator {
 public:
  StatisticEvaluator(const DependenceSpec& spec, const TimeSeries& series);

  std::size_t size() const noexcept { return k_; }
  std::size_t order() const noexcept { return d_; }
  std::size_t length() const noexcept { return n_; }
  const TimeSeries& series() const noexcept { return *series_; }

  /// h for the window ending at position t, where position j reads the
  /// series row at(j).  Writes K values.
  template <class IndexMap>
  void window(std::size_t t, const IndexMap& at, double* out) const {
    for (std::size_t k = 0; k < k_; ++k) {
      double v = 1.0;
      for (std::size_t f = term_begin_[k]; f < term_begin_[k + 1]; ++f) {
        const double x = series_->row(at(t - lag_[f]))[comp_[f]];
        double xp = x;
        for (int e = 1; e < exp_[f]; ++e) xp *= x;
        v *= xp;
      }
      out[k] = v;
    }
  }

  SufficientStatistic total() const;
  SufficientStatistic total(const Permutation& order) const;

  void delta_swap(const Permutation& order, std::size_t s1, std::size_t s2, double* out) const;
  void delta_swap_identity(std::size_t s1, std::size_t s2, double* out) const;

  bool is_interior(std::size_t position) const noexcept {
    return position >= d_ && position + d_ < n_;
  }

 private:
  template <class IndexMap>
  void delta_impl(const IndexMap& at, std::size_t s1, std::size_t s2, double* out) const;
  void check_pair(std::size_t s1, std::size_t s2) const;

  const TimeSeries* series_;
  std::size_t n_;
  std::size_t d_;
  std::size_t k_;
  std::vector<std::size_t> term_begin_;
  std::vector<std::size_t> lag_;
  std::vector<std::size_t> comp_;
  std::vector<int> exp_;
};

}  // namespace mimm

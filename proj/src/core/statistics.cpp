#include "mimm/core/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimm/core/summation.hpp"
#include "mimm/error.hpp"

namespace mimm {

Vector eval_h(const DependenceSpec& spec, const RowMatrix& window) {
  const auto d = static_cast<Eigen::Index>(spec.order());
  require(window.rows() == d + 1 && window.cols() == spec.dim(), ErrorKind::shape,
          "window must be " + std::to_string(d + 1) + "x" + std::to_string(spec.dim()) + ", got " +
              std::to_string(window.rows()) + "x" + std::to_string(window.cols()));
  Vector out(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double v = 1.0;
    for (const auto& f : spec.term(k).factors()) {
      v *= std::pow(window(f.lag, f.component), f.exponent);
    }
    out[static_cast<Eigen::Index>(k)] = v;
  }
  return out;
}

StatisticEvaluator::StatisticEvaluator(const DependenceSpec& spec, const TimeSeries& series)
    : series_(&series),
      n_(series.length()),
      d_(static_cast<std::size_t>(spec.order())),
      k_(spec.size()) {
  require(series.dim() == static_cast<std::size_t>(spec.dim()), ErrorKind::shape,
          "series has " + std::to_string(series.dim()) + " columns but the spec expects " +
              std::to_string(spec.dim()));
  require(n_ > d_, ErrorKind::insufficient_data,
          "series of length " + std::to_string(n_) + " has no complete window of order " +
              std::to_string(d_));
  term_begin_.push_back(0);
  for (const auto& term : spec.terms()) {
    for (const auto& f : term.factors()) {
      lag_.push_back(static_cast<std::size_t>(f.lag));
      comp_.push_back(static_cast<std::size_t>(f.component));
      exp_.push_back(f.exponent);
    }
    term_begin_.push_back(lag_.size());
  }
}

SufficientStatistic StatisticEvaluator::total() const {
  CompensatedVectorSum acc(k_);
  std::vector<double> h(k_);
  const auto id = [](std::size_t j) { return j; };
  for (std::size_t t = d_; t < n_; ++t) {
    window(t, id, h.data());
    acc.add(h.data());
  }
  return acc.value();
}

SufficientStatistic StatisticEvaluator::total(const Permutation& order) const {
  require(order.size() == n_, ErrorKind::shape, "permutation length differs from the series");
  CompensatedVectorSum acc(k_);
  std::vector<double> h(k_);
  const auto at = [&order](std::size_t j) { return order[j]; };
  for (std::size_t t = d_; t < n_; ++t) {
    window(t, at, h.data());
    acc.add(h.data());
  }
  return acc.value();
}

void StatisticEvaluator::check_pair(std::size_t s1, std::size_t s2) const {
  if (!is_interior(s1) || !is_interior(s2)) {
    fail(ErrorKind::boundary_violation,
         "swap (" + std::to_string(s1) + ", " + std::to_string(s2) +
             ") is outside the swappable interior [" + std::to_string(d_) + ", " +
             std::to_string(n_ - d_) + ")");
  }
  require(s1 != s2, ErrorKind::validation, "swap positions must differ");
}

template <class IndexMap>
void StatisticEvaluator::delta_impl(const IndexMap& at, std::size_t s1, std::size_t s2,
                                    double* out) const {
  if (s1 > s2) std::swap(s1, s2);
  const auto swapped = [&](std::size_t j) { return at(j == s1 ? s2 : (j == s2 ? s1 : j)); };
  std::fill(out, out + k_, 0.0);
  double before[64];
  double after[64];
  std::vector<double> heap;
  double* hb = before;
  double* ha = after;
  if (k_ > 64) {
    heap.resize(2 * k_);
    hb = heap.data();
    ha = heap.data() + k_;
  }
  const auto visit = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t <= hi; ++t) {
      window(t, at, hb);
      window(t, swapped, ha);
      for (std::size_t k = 0; k < k_; ++k) out[k] += ha[k] - hb[k];
    }
  };
  if (s2 <= s1 + d_) {
    visit(s1, s2 + d_);
  } else {
    visit(s1, s1 + d_);
    visit(s2, s2 + d_);
  }
}

void StatisticEvaluator::delta_swap(const Permutation& order, std::size_t s1, std::size_t s2,
                                    double* out) const {
  check_pair(s1, s2);
  delta_impl([&order](std::size_t j) { return order[j]; }, s1, s2, out);
}

void StatisticEvaluator::delta_swap_identity(std::size_t s1, std::size_t s2, double* out) const {
  check_pair(s1, s2);
  delta_impl([](std::size_t j) { return j; }, s1, s2, out);
}

SufficientStatistic total_statistic(const DependenceSpec& spec, const TimeSeries& series) {
  return StatisticEvaluator(spec, series).total();
}

SufficientStatistic total_statistic(const DependenceSpec& spec, const TimeSeries& series,
                                    const Permutation& order) {
  return StatisticEvaluator(spec, series).total(order);
}

Vector delta_statistic_swap(const DependenceSpec& spec, const TimeSeries& series,
                            const Permutation& order, std::size_t s1, std::size_t s2) {
  const StatisticEvaluator eval(spec, series);
  require(order.size() == series.length(), ErrorKind::shape,
          "permutation length differs from the series");
  Vector out(static_cast<Eigen::Index>(eval.size()));
  eval.delta_swap(order, s1, s2, out.data());
  return out;
}

}  // namespace mimm

#pragma once

#include <optional>
#include <random>

#include "mimm/core/time_series.hpp"
#include "mimm/error.hpp"

namespace mimm::test {

/// The ErrorKind thrown by f, or nothing when it returns normally.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline TimeSeries series_of(std::initializer_list<double> values) {
  const std::vector<double> v(values);
  return TimeSeries::univariate(v);
}

inline TimeSeries gaussian_series(std::mt19937_64& rng, std::size_t n, std::size_t p) {
  RowMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::normal_distribution<double> z;
  for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = z(rng);
  return TimeSeries(std::move(data));
}

}  // namespace mimm::test

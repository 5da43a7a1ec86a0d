#include "mimm/core/time_series.hpp"

#include <cmath>
#include <string>

#include "mimm/core/summation.hpp"
#include "mimm/error.hpp"

namespace mimm {

TimeSeries::TimeSeries(RowMatrix data)
    : data_(std::move(data)), kinds_(static_cast<std::size_t>(data_.cols()), ColumnKind::real) {
  validate();
}

TimeSeries::TimeSeries(RowMatrix data, std::vector<ColumnKind> kinds)
    : data_(std::move(data)), kinds_(std::move(kinds)) {
  validate();
}

TimeSeries TimeSeries::univariate(std::span<const double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return TimeSeries(std::move(m));
}

void TimeSeries::validate() const {
  require(data_.rows() >= 1 && data_.cols() >= 1, ErrorKind::shape,
          "time series needs n >= 1 rows and p >= 1 columns");
  require(kinds_.size() == static_cast<std::size_t>(data_.cols()), ErrorKind::shape,
          "column kind count does not match the number of columns");
  for (Eigen::Index t = 0; t < data_.rows(); ++t) {
    for (Eigen::Index j = 0; j < data_.cols(); ++j) {
      const double v = data_(t, j);
      if (!std::isfinite(v)) {
        fail(ErrorKind::validation, "non-finite value at row " + std::to_string(t + 1) +
                                        ", column " + std::to_string(j + 1));
      }
      if (kinds_[static_cast<std::size_t>(j)] == ColumnKind::binary && v != 0.0 && v != 1.0) {
        fail(ErrorKind::validation, "binary column " + std::to_string(j + 1) +
                                        " holds a value other than 0 or 1 at row " +
                                        std::to_string(t + 1));
      }
    }
  }
}

Vector TimeSeries::column(std::size_t component) const {
  return data_.col(static_cast<Eigen::Index>(component));
}

TimeSeries TimeSeries::reversed() const {
  RowMatrix r = data_.colwise().reverse();
  return TimeSeries(std::move(r), kinds_);
}

TimeSeries standard_scale(const TimeSeries& series) {
  RowMatrix out = series.data();
  const auto n = static_cast<double>(series.length());
  for (std::size_t j = 0; j < series.dim(); ++j) {
    if (series.kind(j) == ColumnKind::binary) continue;
    const auto col = static_cast<Eigen::Index>(j);
    CompensatedSum mean_acc;
    for (Eigen::Index t = 0; t < out.rows(); ++t) mean_acc.add(out(t, col));
    const double mean = mean_acc.value() / n;
    CompensatedSum var_acc;
    for (Eigen::Index t = 0; t < out.rows(); ++t) {
      const double c = out(t, col) - mean;
      var_acc.add(c * c);
    }
    const double sd = std::sqrt(var_acc.value() / n);
    if (!(sd > 0.0)) {
      fail(ErrorKind::degenerate_scale,
           "real column " + std::to_string(j + 1) + " has zero standard deviation");
    }
    for (Eigen::Index t = 0; t < out.rows(); ++t) out(t, col) = (out(t, col) - mean) / sd;
  }
  return TimeSeries(std::move(out), series.kinds());
}

}  // namespace mimm

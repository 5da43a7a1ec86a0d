#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mimm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dependence parameter θ; its length is the K of the dependence spec.
using ThetaVector = Eigen::VectorXd;
/// Sufficient statistic H = Σ_t h(x_{t:t-d}).
using SufficientStatistic = Eigen::VectorXd;

enum class ColumnKind { real, binary };

/// An n×p series, row t holding observation x_t.  Immutable once built.
class TimeSeries {
 public:
  explicit TimeSeries(RowMatrix data);
  TimeSeries(RowMatrix data, std::vector<ColumnKind> kinds);

  static TimeSeries univariate(std::span<const double> values);

  std::size_t length() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.cols()); }

  double operator()(std::size_t t, std::size_t component) const noexcept {
    return data_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(component));
  }
  /// Pointer to the p values of x_t.
  const double* row(std::size_t t) const noexcept {
    return data_.data() + t * dim();
  }

  const RowMatrix& data() const noexcept { return data_; }
  const std::vector<ColumnKind>& kinds() const noexcept { return kinds_; }
  ColumnKind kind(std::size_t component) const { return kinds_.at(component); }

  /// Column `component` as a dense vector.
  Vector column(std::size_t component) const;
  TimeSeries reversed() const;

 private:
  void validate() const;

  RowMatrix data_;
  std::vector<ColumnKind> kinds_;
};

/// Real columns to zero mean and unit variance (population convention,
/// divide by n).  Binary columns pass through unchanged.
TimeSeries standard_scale(const TimeSeries& series);

}  // namespace mimm

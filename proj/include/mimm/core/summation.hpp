#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Core>

namespace mimm {

/// Neumaier (improved Kahan) summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Component-wise compensated accumulation of K-vectors.
class CompensatedVectorSum {
 public:
  explicit CompensatedVectorSum(std::size_t k) : sum_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))),
                                                 comp_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))) {}

  void add(const double* x) noexcept {
    for (Eigen::Index i = 0; i < sum_.size(); ++i) {
      const double s = sum_[i];
      const double t = s + x[i];
      if (std::abs(s) >= std::abs(x[i])) {
        comp_[i] += (s - t) + x[i];
      } else {
        comp_[i] += (x[i] - t) + s;
      }
      sum_[i] = t;
    }
  }
  void add(const Eigen::VectorXd& x) noexcept { add(x.data()); }

  Eigen::VectorXd value() const { return sum_ + comp_; }

 private:
  Eigen::VectorXd sum_;
  Eigen::VectorXd comp_;
};

}  // namespace mimm

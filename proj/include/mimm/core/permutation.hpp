#pragma once

#include <cstddef>
#include <vector>

namespace mimm {

/// An ordering of the n time indices that fixes the first d and last d
/// positions.  Positions are 0-based; position i holds series index order()[i].
/// The swappable interior is d <= i < n - d.
class Permutation {
 public:
  Permutation(std::size_t n, std::size_t frozen);

  static Permutation identity(std::size_t n, std::size_t frozen) { return {n, frozen}; }

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t frozen() const noexcept { return frozen_; }
  std::size_t interior_size() const noexcept { return order_.size() - 2 * frozen_; }
  bool is_interior(std::size_t position) const noexcept {
    return position >= frozen_ && position + frozen_ < order_.size();
  }

  std::size_t operator[](std::size_t position) const noexcept { return order_[position]; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }

  /// Exchanges the series indices held at two interior positions.
  void swap_positions(std::size_t a, std::size_t b);
  /// Replaces the whole ordering; validated as a bijection with the frozen ends.
  void assign(std::vector<std::size_t> order);

 private:
  std::size_t frozen_;
  std::vector<std::size_t> order_;
};

}  // namespace mimm

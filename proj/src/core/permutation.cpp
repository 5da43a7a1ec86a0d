#include "mimm/core/permutation.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "mimm/error.hpp"

namespace mimm {

Permutation::Permutation(std::size_t n, std::size_t frozen) : frozen_(frozen), order_(n) {
  require(2 * frozen <= n, ErrorKind::insufficient_data,
          "permutation of length " + std::to_string(n) + " cannot freeze " +
              std::to_string(frozen) + " positions at each end");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void Permutation::swap_positions(std::size_t a, std::size_t b) {
  if (!is_interior(a) || !is_interior(b)) {
    fail(ErrorKind::boundary_violation, "swap (" + std::to_string(a) + ", " + std::to_string(b) +
                                            ") leaves the swappable interior");
  }
  std::swap(order_[a], order_[b]);
}

void Permutation::assign(std::vector<std::size_t> order) {
  require(order.size() == order_.size(), ErrorKind::shape, "permutation length mismatch");
  std::vector<char> seen(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    require(order[i] < order.size() && !seen[order[i]], ErrorKind::validation,
            "ordering is not a bijection");
    seen[order[i]] = 1;
    if (!is_interior(i)) {
      require(order[i] == i, ErrorKind::boundary_violation, "ordering moves a frozen position");
    }
  }
  order_ = std::move(order);
}

}  // namespace mimm

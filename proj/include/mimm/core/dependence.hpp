#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mimm {

/// One factor (x_{t-lag, component})^exponent of a monomial.
struct Factor {
  int lag = 0;
  int component = 0;
  int exponent = 1;

  auto operator<=>(const Factor&) const = default;
};

/// A product of factors.  Factors are kept sorted by (lag, component) and
/// factors sharing a (lag, component) pair are merged by adding exponents.
class MonomialTerm {
 public:
  explicit MonomialTerm(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  int max_lag() const noexcept;
  int max_component() const noexcept;
  bool has_lag(int lag) const noexcept;

  /// `lag:component^exponent` factors joined by `*`.
  std::string to_string() const;
  static MonomialTerm parse(std::string_view text);

  bool operator==(const MonomialTerm&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// The dependence function h : (R^p)^{d+1} -> R^K as a list of K monomials.
class DependenceSpec {
 public:
  DependenceSpec(int order, int dim, std::vector<MonomialTerm> terms);

  int order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<MonomialTerm>& terms() const noexcept { return terms_; }
  const MonomialTerm& term(std::size_t k) const { return terms_.at(k); }

  /// Same terms evaluated with a larger window order (used when candidate
  /// specs of different orders must share one interior).
  DependenceSpec with_order(int order) const;

  std::size_t hash() const noexcept;
  bool operator==(const DependenceSpec&) const = default;

 private:
  int order_;
  int dim_;
  std::vector<MonomialTerm> terms_;
};

/// Line-oriented text format: optional `order=<d>` / `dim=<p>` directives,
/// `#` comments, then one term per line (e.g. `0:0^1*1:0^1`).  Order and dim
/// default to the largest lag and component used.
DependenceSpec parse_spec(std::string_view text);
std::string format_spec(const DependenceSpec& spec);
DependenceSpec load_spec(const std::filesystem::path& path);
void save_spec(const DependenceSpec& spec, const std::filesystem::path& path);

struct KronLag {
  int lag = 1;
  int exp_t = 1;
  int exp_lag = 1;
};

/// For each entry emits the p^2 monomials (x_{t,i})^{exp_t} (x_{t-lag,j})^{exp_lag},
/// i-major, matching x_t ⊗ x_{t-lag}.
DependenceSpec kron_spec(int dim, std::span<const KronLag> lags);

/// x_t x_{t-i} for i = 1..order (the AR(d) dependence).
DependenceSpec ar_spec(int order);

}  // namespace mimm

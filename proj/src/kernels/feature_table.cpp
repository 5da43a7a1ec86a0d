#include <cmath>
#include <set>

#include "mimm/core/dependence.hpp"
#include "mimm/core/time_series.hpp"
#include "mimm/error.hpp"
#include "mimm/kernels/kernels.hpp"

namespace mimm::kernels {

FeatureTable build_feature_table(const DependenceSpec& spec, const TimeSeries& series) {
  require(series.dim() == static_cast<std::size_t>(spec.dim()), ErrorKind::shape,
          "series dimension does not match the spec");
  const std::size_t n = series.length();
  const auto d = static_cast<std::size_t>(spec.order());
  require(n > 2 * d, ErrorKind::insufficient_data, "series has no swappable interior");

  FeatureTable table;
  table.n = n;
  table.order = d;
  table.terms = spec.size();
  table.term_begin.push_back(0);

  const auto ipow = [](double x, int e) {
    double r = x;
    for (int i = 1; i < e; ++i) r *= x;
    return r;
  };

  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto& factors = spec.term(k).factors();
    std::set<int> lags;
    for (const auto& f : factors) lags.insert(f.lag);
    for (const int lag : lags) {
      std::vector<double> coef(n, 0.0);
      std::vector<double> mono(n, 0.0);
      for (std::size_t s = d; s + d < n; ++s) {
        const std::size_t t = s + static_cast<std::size_t>(lag);
        double m = 1.0;
        double c = 1.0;
        for (const auto& f : factors) {
          const auto comp = static_cast<std::size_t>(f.component);
          if (f.lag == lag) {
            m *= ipow(series(s, comp), f.exponent);
          } else {
            c *= ipow(series(t - static_cast<std::size_t>(f.lag), comp), f.exponent);
          }
        }
        coef[s] = c;
        mono[s] = m;
      }
      table.coef.insert(table.coef.end(), coef.begin(), coef.end());
      table.mono.insert(table.mono.end(), mono.begin(), mono.end());
      table.term_of.push_back(static_cast<std::uint32_t>(k));
    }
    table.term_begin.push_back(static_cast<std::uint32_t>(table.term_of.size()));
  }
  table.features = table.term_of.size();
  return table;
}

}  // namespace mimm::kernels

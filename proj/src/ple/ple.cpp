#include "mimm/ple/ple.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "../kernels/scalar_math.hpp"
#include "mimm/core/statistics.hpp"
#include "mimm/core/summation.hpp"
#include "mimm/kernels/kernels.hpp"

namespace mimm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_interior(std::size_t n, std::size_t d) {
  require(n >= 2 * d + 2, ErrorKind::insufficient_data,
          "pseudo-likelihood needs at least two swappable positions (n - 2d >= 2), got n=" +
              std::to_string(n) + ", d=" + std::to_string(d));
}

// Runs body(shard) for every shard, spreading shards over up to `threads`
// workers.  Results land in per-shard slots, so reductions stay ordered.
template <class Body>
void for_each_shard(std::size_t shards, std::size_t threads, const Body& body) {
  threads = std::max<std::size_t>(1, std::min(threads, shards));
  if (threads == 1) {
    for (std::size_t s = 0; s < shards; ++s) body(s);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = w; s < shards; s += threads) body(s);
    });
  }
  for (auto& t : pool) t.join();
}

struct ShardResult {
  CompensatedSum log_pl;
  Vector grad;
};

double reduce(std::vector<ShardResult>& parts, std::size_t k, Vector* grad) {
  CompensatedSum total;
  CompensatedVectorSum g(k);
  for (auto& p : parts) {
    total.add(p.log_pl);
    if (grad) g.add(p.grad);
  }
  if (grad) *grad = g.value();
  return total.value();
}

double quarter_max_eigenvalue(const Matrix& second_moment) {
  if (second_moment.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(second_moment, Eigen::EigenvaluesOnly);
  return 0.25 * std::max(0.0, es.eigenvalues().maxCoeff());
}

// Pairs held as a K×P column block (row k at k*P).
class MaterializedPairs final : public PairObjective {
 public:
  MaterializedPairs(std::size_t k, std::vector<double> x, std::size_t count, std::size_t threads)
      : k_(k), count_(count), threads_(threads), x_(std::move(x)) {}

  std::size_t pair_count() const override { return count_; }
  std::size_t dim() const override { return k_; }

  double evaluate(const ThetaVector& theta, Vector* grad) const override {
    const auto& kt = kernels::active_kernels();
    constexpr std::size_t kBlock = 8192;
    const std::size_t blocks = (count_ + kBlock - 1) / kBlock;
    std::vector<ShardResult> parts(blocks);
    for_each_shard(blocks, threads_, [&](std::size_t b) {
      const std::size_t off = b * kBlock;
      const std::size_t cnt = std::min(kBlock, count_ - off);
      auto& part = parts[b];
      part.grad = Vector::Zero(static_cast<Eigen::Index>(k_));
      if (grad) {
        kernels::LogisticSums sums;
        sums.grad = part.grad.data();
        kt.logistic_accumulate(x_.data() + off, count_, k_, cnt, theta.data(), sums);
        part.log_pl.add(sums.log_pl);
      } else {
        part.log_pl.add(kt.log_sigmoid_sum(x_.data() + off, count_, k_, cnt, theta.data()));
      }
    });
    return reduce(parts, k_, grad);
  }

  double curvature_bound(std::size_t limit) const override {
    const std::size_t stride = std::max<std::size_t>(1, count_ / std::max<std::size_t>(limit, 1));
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(k_));
    Vector x(static_cast<Eigen::Index>(k_));
    std::size_t used = 0;
    for (std::size_t j = 0; j < count_; j += stride, ++used) {
      for (std::size_t i = 0; i < k_; ++i) x[static_cast<Eigen::Index>(i)] = x_[i * count_ + j];
      m.noalias() += x * x.transpose();
    }
    return used ? quarter_max_eigenvalue(m / static_cast<double>(used)) : 0.0;
  }

 private:
  std::size_t k_;
  std::size_t count_;
  std::size_t threads_;
  std::vector<double> x_;
};

// Writes the pair statistics for (s1, s2) with s2 in (s1, n−d) into columns
// [0, count) of a K×ld block; returns count.
std::size_t fill_row_pairs(const StatisticEvaluator& eval, const kernels::FeatureTable& table,
                           const kernels::KernelTable& kt, std::size_t s1, double* out,
                           std::size_t ld) {
  const std::size_t n = eval.length();
  const std::size_t d = eval.order();
  const std::size_t k = eval.size();
  const std::size_t end = n - d;  // exclusive
  std::size_t col = 0;
  double delta[64];
  std::vector<double> heap;
  double* dp = delta;
  if (k > 64) {
    heap.resize(k);
    dp = heap.data();
  }
  const std::size_t near_end = std::min(end, s1 + d + 1);
  for (std::size_t s2 = s1 + 1; s2 < near_end; ++s2, ++col) {
    eval.delta_swap_identity(s1, s2, dp);
    for (std::size_t i = 0; i < k; ++i) out[i * ld + col] = -dp[i];
  }
  if (near_end < end) {
    kt.pair_block(table, s1, near_end, end - near_end, out + col, ld);
    col += end - near_end;
  }
  return col;
}

class StreamedAllPairs final : public PairObjective {
 public:
  StreamedAllPairs(const DependenceSpec& spec, const TimeSeries& series, std::size_t threads)
      : eval_(spec, series),
        table_(kernels::build_feature_table(spec, series)),
        threads_(threads) {
    const std::size_t n = series.length();
    const std::size_t d = eval_.order();
    m_ = n - 2 * d;
    count_ = m_ * (m_ - 1) / 2;
    // Fixed shard boundaries with roughly equal pair counts.
    constexpr std::size_t kShards = 64;
    const std::size_t per = std::max<std::size_t>(1, count_ / kShards);
    bounds_.push_back(d);
    std::size_t acc = 0;
    for (std::size_t s1 = d; s1 + d < n; ++s1) {
      acc += n - d - s1 - 1;
      if (acc >= per && s1 + 1 + d < n) {
        bounds_.push_back(s1 + 1);
        acc = 0;
      }
    }
    bounds_.push_back(n - d);
  }

  std::size_t pair_count() const override { return count_; }
  std::size_t dim() const override { return eval_.size(); }

  double evaluate(const ThetaVector& theta, Vector* grad) const override {
    const auto& kt = kernels::active_kernels();
    const std::size_t k = eval_.size();
    const std::size_t shards = bounds_.size() - 1;
    std::vector<ShardResult> parts(shards);
    for_each_shard(shards, threads_, [&](std::size_t s) {
      std::vector<double> buf(k * m_);
      Vector g = Vector::Zero(static_cast<Eigen::Index>(k));
      auto& part = parts[s];
      CompensatedVectorSum gsum(k);
      for (std::size_t s1 = bounds_[s]; s1 < bounds_[s + 1]; ++s1) {
        const std::size_t cnt = fill_row_pairs(eval_, table_, kt, s1, buf.data(), m_);
        if (cnt == 0) continue;
        if (grad) {
          g.setZero();
          kernels::LogisticSums sums;
          sums.grad = g.data();
          kt.logistic_accumulate(buf.data(), m_, k, cnt, theta.data(), sums);
          part.log_pl.add(sums.log_pl);
          gsum.add(g);
        } else {
          part.log_pl.add(kt.log_sigmoid_sum(buf.data(), m_, k, cnt, theta.data()));
        }
      }
      part.grad = gsum.value();
    });
    return reduce(parts, k, grad);
  }

  double curvature_bound(std::size_t limit) const override {
    const std::size_t k = eval_.size();
    const std::size_t d = eval_.order();
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<std::size_t> first(0, m_ - 1);
    std::uniform_int_distribution<std::size_t> second(0, m_ - 2);
    const std::size_t draws = std::min(limit, count_);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    Vector x(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < draws; ++i) {
      const std::size_t a = first(rng);
      std::size_t b = second(rng);
      if (b >= a) ++b;
      eval_.delta_swap_identity(d + a, d + b, x.data());
      m.noalias() += x * x.transpose();
    }
    return draws ? quarter_max_eigenvalue(m / static_cast<double>(draws)) : 0.0;
  }

 private:
  StatisticEvaluator eval_;
  kernels::FeatureTable table_;
  std::size_t threads_;
  std::size_t m_ = 0;
  std::size_t count_ = 0;
  std::vector<std::size_t> bounds_;
};

}  // namespace

PairStatistic pair_statistic(const DependenceSpec& spec, const TimeSeries& series, std::size_t s1,
                             std::size_t s2) {
  const StatisticEvaluator eval(spec, series);
  require(s1 < s2, ErrorKind::validation, "pair_statistic needs s1 < s2");
  PairStatistic p{s1, s2, Vector(static_cast<Eigen::Index>(eval.size()))};
  eval.delta_swap_identity(s1, s2, p.x.data());
  p.x = -p.x;
  return p;
}

double log_pl(const ThetaVector& theta, std::span<const PairStatistic> pairs) {
  require(!pairs.empty(), ErrorKind::validation, "log_pl needs at least one pair");
  CompensatedSum acc;
  for (const auto& p : pairs) {
    require(p.x.size() == theta.size(), ErrorKind::shape, "pair statistic length differs from theta");
    acc.add(kernels::scalar::log_sigmoid(theta.dot(p.x)));
  }
  return acc.value();
}

Vector log_pl_gradient(const ThetaVector& theta, std::span<const PairStatistic> pairs) {
  CompensatedVectorSum acc(static_cast<std::size_t>(theta.size()));
  for (const auto& p : pairs) {
    acc.add(Vector(kernels::scalar::sigmoid_neg(theta.dot(p.x)) * p.x));
  }
  return acc.value();
}

std::unique_ptr<PairObjective> all_pairs_objective(const DependenceSpec& spec,
                                                   const TimeSeries& series,
                                                   const GdConfig& config) {
  const std::size_t n = series.length();
  const auto d = static_cast<std::size_t>(spec.order());
  require_interior(n, d);
  const std::size_t m = n - 2 * d;
  const std::size_t count = m * (m - 1) / 2;
  const std::size_t k = spec.size();
  if (count * k > config.materialize_limit) {
    return std::make_unique<StreamedAllPairs>(spec, series, config.threads);
  }
  const StatisticEvaluator eval(spec, series);
  const auto table = kernels::build_feature_table(spec, series);
  const auto& kt = kernels::active_kernels();
  std::vector<double> x(k * count);
  std::vector<double> row(k * m);
  std::size_t off = 0;
  for (std::size_t s1 = d; s1 + d < n; ++s1) {
    const std::size_t cnt = fill_row_pairs(eval, table, kt, s1, row.data(), m);
    for (std::size_t i = 0; i < k; ++i) {
      std::copy_n(row.data() + i * m, cnt, x.data() + i * count + off);
    }
    off += cnt;
  }
  return std::make_unique<MaterializedPairs>(k, std::move(x), count, config.threads);
}

std::unique_ptr<PairObjective> pair_list_objective(
    const DependenceSpec& spec, const TimeSeries& series,
    std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  require(!pairs.empty(), ErrorKind::validation, "pair list is empty");
  const StatisticEvaluator eval(spec, series);
  const std::size_t k = eval.size();
  const std::size_t count = pairs.size();
  std::vector<double> x(k * count);
  std::vector<double> delta(k);
  for (std::size_t j = 0; j < count; ++j) {
    eval.delta_swap_identity(pairs[j].first, pairs[j].second, delta.data());
    for (std::size_t i = 0; i < k; ++i) x[i * count + j] = -delta[i];
  }
  return std::make_unique<MaterializedPairs>(k, std::move(x), count, 1);
}

std::vector<std::pair<std::size_t, std::size_t>> bipartition_pairs(std::size_t n, std::size_t d,
                                                                   std::uint64_t seed) {
  require_interior(n, d);
  std::vector<std::size_t> idx(n - 2 * d);
  std::iota(idx.begin(), idx.end(), d);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(idx.size() / 2);
  for (std::size_t i = 0; i + 1 < idx.size(); i += 2) {
    out.emplace_back(std::min(idx[i], idx[i + 1]), std::max(idx[i], idx[i + 1]));
  }
  return out;
}

PleResult maximize_pseudo_likelihood(const PairObjective& objective, const GdConfig& config,
                                     const Deadline& deadline) {
  require(config.lr0 > 0, ErrorKind::validation, "lr0 must be positive");
  require(config.decay >= 0, ErrorKind::validation, "decay must be >= 0");
  require(config.max_epochs >= 0, ErrorKind::validation, "max_epochs must be >= 0");
  require(config.tol > 0, ErrorKind::validation, "tol must be positive");

  const auto k = static_cast<Eigen::Index>(objective.dim());
  const auto count = static_cast<double>(objective.pair_count());
  double lipschitz = objective.curvature_bound(100000);
  if (!(lipschitz > 0) || !std::isfinite(lipschitz)) lipschitz = 1.0;

  PleResult res;
  res.n_pairs_used = objective.pair_count();
  ThetaVector theta = ThetaVector::Zero(k);
  Vector grad;
  double f = objective.evaluate(theta, &grad) / count;
  grad /= count;
  if (config.keep_trace) res.objective_trace.push_back(f);

  double scale = 1.0;
  int accepted = 0;
  while (res.epochs < config.max_epochs) {
    if (grad.norm() < config.tol) {
      res.converged = true;
      break;
    }
    deadline.check("pseudo-likelihood gradient ascent");
    const double lr = config.lr0 * scale / (lipschitz * (1.0 + config.decay * accepted));
    const ThetaVector cand = theta + lr * grad;
    Vector gc;
    const double fc = objective.evaluate(cand, &gc) / count;
    ++res.epochs;
    if (!(fc >= f)) {
      // Never accept a step that lowers the objective.
      scale *= 0.5;
      if (scale < 1e-12) break;
      continue;
    }
    theta = cand;
    f = fc;
    grad = gc / count;
    ++accepted;
    scale = std::min(scale * 1.5, 64.0);
    if (config.keep_trace) res.objective_trace.push_back(f);
    if (theta.norm() > config.divergence_cap) {
      res.separation_warning = true;
      break;
    }
  }
  if (!res.converged && grad.norm() < config.tol) res.converged = true;
  // Far along the ray through theta the objective tends to zero only when
  // every pair margin is positive, i.e. the data are separated.
  if (!res.separation_warning && theta.norm() > 0) {
    const ThetaVector far = theta * (10.0 * config.divergence_cap / theta.norm());
    if (objective.evaluate(far, nullptr) / count > f) {
      res.separation_warning = true;
      res.converged = false;
    }
  }
  res.theta_hat = theta;
  res.log_pl = f * count;
  return res;
}

PleResult fit_naive(const DependenceSpec& spec, const TimeSeries& series, const GdConfig& config,
                    const Deadline& deadline) {
  const auto start = Clock::now();
  const auto objective = all_pairs_objective(spec, series, config);
  PleResult res = maximize_pseudo_likelihood(*objective, config, deadline);
  res.wall_time_s = seconds_since(start);
  return res;
}

PleResult fit_bipartition(const DependenceSpec& spec, const TimeSeries& series, std::uint64_t seed,
                          const GdConfig& config, const Deadline& deadline) {
  const auto start = Clock::now();
  const auto pairs = bipartition_pairs(series.length(), static_cast<std::size_t>(spec.order()), seed);
  const auto objective = pair_list_objective(spec, series, pairs);
  PleResult res = maximize_pseudo_likelihood(*objective, config, deadline);
  res.wall_time_s = seconds_since(start);
  return res;
}

PleResult fit_online_sgd(const DependenceSpec& spec, const TimeSeries& series,
                         const SgdConfig& config, const Deadline& deadline) {
  require(config.eta > 0, ErrorKind::validation, "eta must be positive");
  const auto start = Clock::now();
  const StatisticEvaluator eval(spec, series);
  const std::size_t n = series.length();
  const std::size_t d = eval.order();
  require_interior(n, d);
  const std::size_t m = n - 2 * d;
  const auto k = static_cast<Eigen::Index>(eval.size());

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> first(0, m - 1);
  std::uniform_int_distribution<std::size_t> second(0, m - 2);
  ThetaVector theta = ThetaVector::Zero(k);
  Vector x(k);
  for (std::size_t it = 0; it < config.n_iters; ++it) {
    if ((it & 0xffff) == 0) deadline.check("online SGD");
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    eval.delta_swap_identity(d + std::min(a, b), d + std::max(a, b), x.data());
    x = -x;
    theta += config.eta * kernels::scalar::sigmoid_neg(theta.dot(x)) * x;
  }
  PleResult res;
  res.theta_hat = theta;
  res.n_pairs_used = config.n_iters;
  res.epochs = 0;
  res.converged = theta.allFinite();
  res.wall_time_s = seconds_since(start);
  if (config.evaluate_log_pl) {
    res.log_pl = all_pairs_objective(spec, series)->evaluate(theta, nullptr);
  }
  return res;
}

InformationCriteria aic_pic(double log_pl_at_opt, int K, std::size_t n, int d) {
  require(K >= 1, ErrorKind::validation, "information criteria need K >= 1");
  require(d >= 1, ErrorKind::validation, "order d must be >= 1");
  require(n >= 2 * static_cast<std::size_t>(d) + 2, ErrorKind::insufficient_data,
          "information criteria need n - 2d >= 2");
  const double m = static_cast<double>(n - 2 * static_cast<std::size_t>(d));
  const double log_pairs = std::log(m) + std::log(m - 1.0) - std::log(2.0);
  return {-2.0 * log_pl_at_opt + 2.0 * K, -2.0 * log_pl_at_opt + K * log_pairs};
}

}  // namespace mimm

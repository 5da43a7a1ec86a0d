#include <cmath>
#include <random>

#include "doctest.h"
#include "mimm/core/dependence.hpp"
#include "mimm/kernels/kernels.hpp"
#include "mimm/ple/ple.hpp"
#include "test_util.hpp"

using namespace mimm;

namespace {

const kernels::KernelTable* simd() {
  const auto* k = kernels::avx2_kernels();
  return k && kernels::cpu_has_avx2() ? k : nullptr;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

DependenceSpec mixed_spec() {
  return parse_spec("order=2\ndim=2\n0:0^1*1:0^1\n0:0^1*2:1^1\n0:1^2*1:0^1*2:0^1\n0:1^1\n");
}

}  // namespace

TEST_CASE("feature table reproduces far pair statistics") {
  std::mt19937_64 rng(1);
  const TimeSeries s = test::gaussian_series(rng, 50, 2);
  const DependenceSpec spec = mixed_spec();
  const auto table = kernels::build_feature_table(spec, s);
  CHECK(table.terms == spec.size());
  const std::size_t d = 2, count = 20, s1 = 4;
  std::vector<double> out(spec.size() * count);
  kernels::scalar_kernels().pair_block(table, s1, s1 + d + 1, count, out.data(), count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto ps = pair_statistic(spec, s, s1, s1 + d + 1 + j);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      CHECK(rel(out[k * count + j], ps.x[static_cast<Eigen::Index>(k)]) < 1e-12);
    }
  }
}

TEST_CASE("scalar log-sigmoid is accurate in both tails") {
  const double z[] = {-800.0, -40.0, -1.0, 0.0, 1.0, 40.0, 800.0};
  double out[7];
  kernels::scalar_kernels().log_sigmoid(z, 7, out);
  CHECK(out[0] == doctest::Approx(-800.0));
  CHECK(out[1] == doctest::Approx(-40.0 - std::log1p(std::exp(-40.0))));
  CHECK(out[3] == doctest::Approx(std::log(0.5)));
  CHECK(out[5] == doctest::Approx(-std::exp(-40.0)).epsilon(1e-12));
  CHECK(out[6] == 0.0);
  kernels::scalar_kernels().sigmoid_neg(z, 7, out);
  CHECK(out[0] == 1.0);
  CHECK(out[3] == 0.5);
  CHECK(out[6] == doctest::Approx(0.0));
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const auto* v = simd();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this machine");
    return;
  }
  const auto& ref = kernels::scalar_kernels();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50, 50);

  for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    std::vector<double> z(count), a(count), b(count);
    for (auto& x : z) x = u(rng);
    ref.log_sigmoid(z.data(), count, a.data());
    v->log_sigmoid(z.data(), count, b.data());
    for (std::size_t i = 0; i < count; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::abs(a[i]) + 1e-300);
    ref.sigmoid_neg(z.data(), count, a.data());
    v->sigmoid_neg(z.data(), count, b.data());
    for (std::size_t i = 0; i < count; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::abs(a[i]) + 1e-300);
  }

  const std::size_t k = 4, count = 523, ld = 530;
  std::vector<double> x(k * ld);
  std::uniform_real_distribution<double> ux(-3, 3);
  for (auto& e : x) e = ux(rng);
  const double theta[4] = {0.4, -1.1, 0.05, 0.7};
  std::vector<double> ga(k, 0.0), gb(k, 0.0);
  kernels::LogisticSums sa{0.0, ga.data()}, sb{0.0, gb.data()};
  ref.logistic_accumulate(x.data(), ld, k, count, theta, sa);
  v->logistic_accumulate(x.data(), ld, k, count, theta, sb);
  CHECK(rel(sb.log_pl, sa.log_pl) < 1e-13);
  for (std::size_t i = 0; i < k; ++i) CHECK(rel(gb[i], ga[i]) < 1e-12);
  CHECK(rel(v->log_sigmoid_sum(x.data(), ld, k, count, theta), ref.log_sigmoid_sum(x.data(), ld, k, count, theta)) <
        1e-13);

  const TimeSeries s = test::gaussian_series(rng, 200, 2);
  const auto table = kernels::build_feature_table(mixed_spec(), s);
  const std::size_t kk = mixed_spec().size();
  for (std::size_t n2 : {1u, 6u, 101u}) {
    std::vector<double> pa(kk * n2), pb(kk * n2);
    ref.pair_block(table, 10, 13, n2, pa.data(), n2);
    v->pair_block(table, 10, 13, n2, pb.data(), n2);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(rel(pb[i], pa[i]) < 1e-13);
  }
}

TEST_CASE("log_pl at zero is exact with either kernel") {
  std::mt19937_64 rng(4);
  const TimeSeries s = test::gaussian_series(rng, 400, 1);
  for (const char* name : {"scalar", "avx2"}) {
    if (std::string(name) == "avx2" && !simd()) continue;
    kernels::select_kernels(name);
    const auto obj = all_pairs_objective(ar_spec(1), s);
    const double expect = static_cast<double>(obj->pair_count()) * std::log(0.5);
    CHECK(std::abs(obj->evaluate(ThetaVector::Zero(1), nullptr) / expect - 1.0) <= 4e-16);
  }
  kernels::select_kernels("auto");
}

TEST_CASE("naive fits agree across kernel variants") {
  if (!simd()) return;
  std::mt19937_64 rng(6);
  const TimeSeries s = test::gaussian_series(rng, 300, 2);
  kernels::select_kernels("scalar");
  const auto a = fit_naive(mixed_spec(), s);
  kernels::select_kernels("avx2");
  const auto b = fit_naive(mixed_spec(), s);
  kernels::select_kernels("auto");
  CHECK((a.theta_hat - b.theta_hat).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(rel(a.log_pl, b.log_pl) < 1e-12);
}

TEST_CASE("kernel selection") {
  kernels::select_kernels("scalar");
  CHECK(std::string(kernels::active_kernels().name) == kernels::scalar_kernels().name);
  kernels::select_kernels("auto");
  CHECK(test::error_kind([] { kernels::select_kernels("neon"); }).has_value());
}

#pragma once

#include <cstdint>

#include "mimm/core/time_series.hpp"
#include "mimm/gaussian/params.hpp"

namespace mimm {

/// Orders d <= 2 start from the exact stationary law; higher orders start at
/// zero and use at least this many burn-in steps.
inline constexpr int kMinBurnInFromZero = 500;

/// n values after discarding burn_in steps.  Identical (params, n, burn_in,
/// seed) give bit-identical output on one platform.
TimeSeries simulate_ar(const ClassicalARParams& params, std::size_t n, int burn_in,
                       std::uint64_t seed);
/// VAR(1) starts from N(0, B) with B from the Lyapunov solve; higher orders
/// start at zero as above.
TimeSeries simulate_var(const ClassicalVARParams& params, std::size_t n, int burn_in,
                        std::uint64_t seed);

}  // namespace mimm

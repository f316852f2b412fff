#pragma once

#include <cstdint>

namespace specphen {

// Counter-based generator: the output sequence is a pure function of
// (seed, stream), so per-unit / per-replicate streams can be evaluated
// in any order (or in parallel) and still reproduce bit-identically.
// Core step is the splitmix64 finalizer over an incrementing counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns an endpoint, so
  // it is safe to feed straight into the inverse normal CDF.
  double uniform01();

  // Standard normal deviate via the inverse-CDF transform (Wichura's
  // AS241 rational approximation). Chosen over Box-Muller/ziggurat so
  // results do not depend on platform libm or generator call pairing.
  double normal();

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

// AS241 inverse of the standard normal CDF; |relative error| < 1e-15
// over p in (0,1). Exposed for tests.
double inverse_normal_cdf(double p);

}  // namespace specphen

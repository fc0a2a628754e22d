#include "netident/rng.hpp"

#include <cmath>
#include <numbers>

namespace netident::rng {

double standard_normal(std::uint64_t k) noexcept {
  const double u1 = 1.0 - uniform01(key({k, 1}));  // (0, 1]
  const double u2 = uniform01(key({k, 2}));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace netident::rng

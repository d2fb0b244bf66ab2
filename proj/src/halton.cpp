#include "etaik/halton.hpp"

#include <string>

#include "etaik/collision.hpp"
#include "etaik/errors.hpp"

namespace etaik {

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  // Reverse the digits as an integer and divide once, so the result is the
  // correctly rounded value of the exact fraction.
  std::uint64_t reversed = 0;
  std::uint64_t denominator = 1;
  while (index > 0) {
    reversed = reversed * base + index % base;
    denominator *= base;
    index /= base;
  }
  return static_cast<double>(reversed) / static_cast<double>(denominator);
}

std::vector<std::uint32_t> first_primes(int count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t c = 2; static_cast<int>(primes.size()) < count; ++c) {
    bool prime = true;
    for (auto p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

HaltonSampler::HaltonSampler(int dimension, std::uint64_t start_index, std::uint64_t stride)
    : bases_(first_primes(dimension)), index_(start_index), stride_(stride) {
  require(dimension >= 1, "HaltonSampler: dimension must be >= 1");
  require(stride >= 1, "HaltonSampler: stride must be >= 1");
}

VecX HaltonSampler::next() {
  VecX x(dimension());
  for (int d = 0; d < dimension(); ++d) x[d] = radical_inverse(index_, bases_[d]);
  index_ += stride_;
  return x;
}

VecX sample_collision_free(const CollisionWorld& world, HaltonSampler& sampler, int max_tries) {
  require(max_tries >= 1, "sample_collision_free: max_tries must be >= 1");
  const auto& sys = world.system();
  require(sampler.dimension() == sys.dof(), "sample_collision_free: sampler dimension must equal system DoF");
  const VecX lo = sys.q_min();
  const VecX span = sys.q_max() - lo;
  for (int t = 0; t < max_tries; ++t) {
    const VecX q = lo + span.cwiseProduct(sampler.next());
    if (!world.in_collision(q)) return q;
  }
  throw NoFreeSample("no collision-free sample after " + std::to_string(max_tries) + " tries");
}

}  // namespace etaik

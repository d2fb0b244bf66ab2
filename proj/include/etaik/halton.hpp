#pragma once

#include <cstdint>
#include <vector>

#include "etaik/chain_model.hpp"

namespace etaik {

class CollisionWorld;

// Radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, std::uint32_t base);

// First `count` primes.
std::vector<std::uint32_t> first_primes(int count);

// Deterministic Halton sequence over [0,1)^dimension. Index 0 (the all-zero
// corner) is skipped by default. Parallel users should give each sampler a
// distinct start and a common stride.
class HaltonSampler {
 public:
  explicit HaltonSampler(int dimension, std::uint64_t start_index = 1, std::uint64_t stride = 1);

  int dimension() const { return static_cast<int>(bases_.size()); }
  std::uint64_t index() const { return index_; }
  const std::vector<std::uint32_t>& bases() const { return bases_; }

  VecX next();

 private:
  std::vector<std::uint32_t> bases_;
  std::uint64_t index_;
  std::uint64_t stride_;
};

// Maps Halton points onto the joint limits and returns the first one that is
// collision free. Throws NoFreeSample after `max_tries` rejections.
VecX sample_collision_free(const CollisionWorld& world, HaltonSampler& sampler, int max_tries);

}  // namespace etaik

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>

#include "bbbvote/group.hpp"

namespace bbbvote {

// Seeded source for keys and proof nonces. std::mt19937_64 has a fixed output
// sequence on every platform, which keeps transcripts byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Uniform in [0, bound) by rejection sampling.
  mpz_class below(const mpz_class& bound);
  // Uniform in [1, exponent_order - 1].
  Scalar nonzero_scalar(const GroupParams& params);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bbbvote

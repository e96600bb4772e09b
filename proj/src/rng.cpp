#include "bbbvote/rng.hpp"

#include "bbbvote/errors.hpp"

namespace bbbvote {

mpz_class Rng::below(const mpz_class& bound) {
  if (bound <= 0) throw Error(ErrorCode::kInvalidArgument, "empty sampling range");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  const std::size_t excess = words * 64 - bits;
  for (;;) {
    mpz_class v = 0;
    for (std::size_t i = 0; i < words; ++i) {
      std::uint64_t w = engine_();
      if (i == 0 && excess > 0) w >>= excess;
      mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), 64);
      mpz_class part;
      mpz_import(part.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
      v += part;
    }
    if (v < bound) return v;
  }
}

Scalar Rng::nonzero_scalar(const GroupParams& params) {
  return Scalar(below(params.exponent_order - 1) + 1);
}

}  // namespace bbbvote

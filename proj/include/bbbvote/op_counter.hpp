#pragma once

#include <cstdint>
#include <string>

namespace bbbvote {

// Operation counts standing in for on-chain execution cost. One counter per
// worker/context; aggregate with operator+=.
struct OpCounter {
  std::uint64_t group_mults = 0;  // group multiplications / point additions
  std::uint64_t exponentiations = 0;  // exponentiations / scalar multiplications
  std::uint64_t doublings = 0;  // point doublings (IA: squarings in joint ladders)
  std::uint64_t field_inversions = 0;
  std::uint64_t field_mults = 0;
  std::uint64_t hashes = 0;
  std::uint64_t affine_transforms = 0;

  OpCounter& operator+=(const OpCounter& o) {
    group_mults += o.group_mults;
    exponentiations += o.exponentiations;
    doublings += o.doublings;
    field_inversions += o.field_inversions;
    field_mults += o.field_mults;
    hashes += o.hashes;
    affine_transforms += o.affine_transforms;
    return *this;
  }

  friend OpCounter operator-(const OpCounter& a, const OpCounter& b) {
    OpCounter d;
    d.group_mults = a.group_mults - b.group_mults;
    d.exponentiations = a.exponentiations - b.exponentiations;
    d.doublings = a.doublings - b.doublings;
    d.field_inversions = a.field_inversions - b.field_inversions;
    d.field_mults = a.field_mults - b.field_mults;
    d.hashes = a.hashes - b.hashes;
    d.affine_transforms = a.affine_transforms - b.affine_transforms;
    return d;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

std::string to_string(const OpCounter& c);

}  // namespace bbbvote

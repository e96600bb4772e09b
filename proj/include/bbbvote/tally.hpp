#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bbbvote/group.hpp"
#include "bbbvote/protocol.hpp"

namespace bbbvote {

using Counts = std::vector<std::uint32_t>;

struct WorkerRange {
  std::uint64_t begin = 0;  // rank of first vector
  std::uint64_t end = 0;  // one past the last rank
  std::uint64_t checked = 0;  // vectors examined before stopping
};

struct TallyResult {
  Counts counts;  // ct_1..ct_k
  std::uint32_t voters = 0;  // n'
  std::uint64_t iterations = 0;
  double seconds = 0;
  unsigned workers = 1;
  std::vector<WorkerRange> ranges;
  OpCounter cost;
};

Element aggregate_product(Group& group, std::span<const Element> votes);
Element aggregate_product(Group& group, std::span<const BlindedVote> votes);

// C(n + k - 1, k - 1): number of count vectors of k non-negative entries
// summing to n. Throws kParameterOverflow past 64 bits.
std::uint64_t composition_count(std::uint64_t n, unsigned k);

// Count vectors are ordered lexicographically with the first entry
// descending: (3,0), (2,1), (1,2), (0,3).
Counts first_composition(std::uint32_t n, unsigned k);
// Advances in that order. Returns false after the last vector; otherwise
// *changed receives the index whose entry was decremented (k-2 means only
// the last two entries moved).
bool next_composition(Counts& counts, std::size_t* changed = nullptr);
Counts unrank_composition(std::uint64_t rank, std::uint32_t n, unsigned k);
std::uint64_t rank_composition(std::span<const std::uint32_t> counts);
std::vector<Counts> enumerate_counts(std::uint32_t n, unsigned k);

// prod f_i^{ct_i} == product. IA compares g^E with E = sum ct_i 2^{(i-1)m}.
bool check_tally(Group& group, std::span<const std::uint32_t> counts,
                 const Element& product);

struct SearchOptions {
  unsigned workers = 1;
  // Scan the whole space instead of stopping at the first hit, and fail
  // with kNonUniqueTally if more than one vector matches.
  bool exhaustive = false;
};

// Splits the enumeration into contiguous rank ranges, one per worker.
// Throws kTallyInfeasible when no vector matches.
TallyResult search_tally(const Group& group, const Element& product,
                         std::uint32_t voters, SearchOptions opts = {});

}  // namespace bbbvote

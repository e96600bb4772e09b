#include "bbbvote/tally.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "bbbvote/errors.hpp"

namespace bbbvote {

Element aggregate_product(Group& group, std::span<const Element> votes) {
  Element acc = group.identity();
  for (const auto& v : votes) acc = group.op(acc, v);
  return group.to_affine(acc);
}

Element aggregate_product(Group& group, std::span<const BlindedVote> votes) {
  Element acc = group.identity();
  for (const auto& v : votes) acc = group.op(acc, v.value);
  return group.to_affine(acc);
}

std::uint64_t composition_count(std::uint64_t n, unsigned k) {
  if (k == 0) return n == 0 ? 1 : 0;
  unsigned __int128 r = 1;
  for (unsigned i = 1; i < k; ++i) {
    r = r * (n + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw Error(ErrorCode::kParameterOverflow, "search space exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

Counts first_composition(std::uint32_t n, unsigned k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  Counts c(k, 0);
  c[0] = n;
  return c;
}

bool next_composition(Counts& c, std::size_t* changed) {
  const std::size_t k = c.size();
  if (k < 2) return false;
  std::size_t i = k - 1;
  while (i-- > 0) {
    if (c[i] > 0) break;
  }
  if (i == static_cast<std::size_t>(-1)) return false;
  std::uint32_t tail = 0;
  for (std::size_t j = i + 1; j < k; ++j) {
    tail += c[j];
    c[j] = 0;
  }
  c[i]--;
  c[i + 1] = tail + 1;
  if (changed != nullptr) *changed = i;
  return true;
}

Counts unrank_composition(std::uint64_t rank, std::uint32_t n, unsigned k) {
  if (rank >= composition_count(n, k)) {
    throw Error(ErrorCode::kInvalidArgument, "rank out of range");
  }
  Counts c(k, 0);
  std::uint32_t remaining = n;
  for (unsigned pos = 0; pos + 1 < k; ++pos) {
    for (std::uint32_t v = remaining;; --v) {
      const std::uint64_t block = composition_count(remaining - v, k - pos - 1);
      if (rank < block) {
        c[pos] = v;
        remaining -= v;
        break;
      }
      rank -= block;
    }
  }
  c[k - 1] = remaining;
  return c;
}

std::uint64_t rank_composition(std::span<const std::uint32_t> counts) {
  const unsigned k = static_cast<unsigned>(counts.size());
  std::uint32_t remaining = std::accumulate(counts.begin(), counts.end(), std::uint32_t{0});
  std::uint64_t rank = 0;
  for (unsigned pos = 0; pos + 1 < k; ++pos) {
    for (std::uint32_t v = remaining; v > counts[pos]; --v) {
      rank += composition_count(remaining - v, k - pos - 1);
    }
    remaining -= counts[pos];
  }
  return rank;
}

std::vector<Counts> enumerate_counts(std::uint32_t n, unsigned k) {
  std::vector<Counts> out;
  Counts c = first_composition(n, k);
  do {
    out.push_back(c);
  } while (next_composition(c));
  return out;
}

bool check_tally(Group& group, std::span<const std::uint32_t> counts,
                 const Element& product) {
  const GroupParams& params = group.params();
  if (counts.size() != params.k) return false;
  if (params.backend == BackendKind::kIA) {
    mpz_class e = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      mpz_class term = counts[i];
      mpz_mul_2exp(term.get_mpz_t(), term.get_mpz_t(), static_cast<mp_bitcnt_t>(i * params.m));
      e += term;
    }
    return group.equal(group.exp(group.generator(), params.scalar(e)), product);
  }
  Element acc = group.identity();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    acc = group.op(acc, group.exp(params.choice_generators[i], params.scalar(counts[i])));
  }
  return group.equal(acc, product);
}

namespace {

// table[i][v] = f_{i+1}^v, affine.
using PowerTable = std::vector<std::vector<Element>>;

Element compose(Group& group, const PowerTable& table, const Counts& c) {
  Element acc = table[0][c[0]];
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] != 0) acc = group.op(acc, table[i][c[i]]);
  }
  return acc;
}

}  // namespace

TallyResult search_tally(const Group& group_in, const Element& product,
                         std::uint32_t voters, SearchOptions opts) {
  const auto start = std::chrono::steady_clock::now();
  const GroupParams& params = group_in.params();
  const unsigned k = params.k;
  const std::uint64_t total = composition_count(voters, k);

  Group setup(group_in.shared_params(), group_in.coords());
  const Element target = setup.to_affine(product);

  PowerTable table(k);
  for (unsigned i = 0; i < k; ++i) {
    table[i].reserve(voters + 1);
    table[i].push_back(setup.identity());
    for (std::uint32_t v = 1; v <= voters; ++v) {
      table[i].push_back(setup.to_affine(setup.op(table[i].back(), params.choice_generators[i])));
    }
  }
  const Element step =
      setup.to_affine(setup.op(params.choice_generators[k - 1], params.choice_inverses[k - 2]));

  const unsigned workers = static_cast<unsigned>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(opts.workers, total)));
  std::vector<WorkerRange> ranges(workers);
  for (unsigned w = 0; w < workers; ++w) {
    ranges[w].begin = static_cast<std::uint64_t>((unsigned __int128)total * w / workers);
    ranges[w].end = static_cast<std::uint64_t>((unsigned __int128)total * (w + 1) / workers);
  }

  std::atomic<bool> found{false};
  std::mutex mu;
  std::vector<std::uint64_t> hits;
  std::vector<OpCounter> costs(workers);

  auto scan = [&](unsigned w) {
    Group g(group_in.shared_params(), group_in.coords());
    WorkerRange& range = ranges[w];
    Counts c = unrank_composition(range.begin, voters, k);
    Element cur = compose(g, table, c);
    for (std::uint64_t rank = range.begin; rank < range.end; ++rank) {
      if (!opts.exhaustive && found.load(std::memory_order_relaxed)) break;
      range.checked++;
      if (g.matches(cur, target)) {
        {
          std::lock_guard<std::mutex> lock(mu);
          hits.push_back(rank);
        }
        found.store(true, std::memory_order_relaxed);
        if (!opts.exhaustive) break;
      }
      if (rank + 1 == range.end) break;
      std::size_t changed = 0;
      next_composition(c, &changed);
      cur = changed + 2 == k ? g.op(cur, step) : compose(g, table, c);
    }
    costs[w] = g.counter_snapshot();
  };

  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(scan, w);
  }

  if (hits.empty()) {
    throw Error(ErrorCode::kTallyInfeasible,
                "no count vector matches the aggregate product (votes corrupted or unrepaired)");
  }
  if (opts.exhaustive && hits.size() > 1) {
    throw Error(ErrorCode::kNonUniqueTally,
                std::to_string(hits.size()) + " count vectors match the aggregate product");
  }

  TallyResult result;
  result.counts = unrank_composition(*std::min_element(hits.begin(), hits.end()), voters, k);
  result.voters = voters;
  result.workers = workers;
  result.ranges = ranges;
  result.cost = setup.counter_snapshot();
  for (const auto& r : ranges) result.iterations += r.checked;
  for (const auto& c : costs) result.cost += c;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace bbbvote

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbbvote/board.hpp"
#include "bbbvote/tally.hpp"

namespace bbbvote {

// Participants are P1..Pn. The file format is flat INI-style text:
//
//   [params]    backend, profile, coords, n, k, seed, deposit, min_deposit,
//               authority_deposit, mpc_caching, simultaneous, hints,
//               dummy_vote, workers
//   [choices]   P1 = 2
//   [stalls]    register = P4   voting = P3   repair.1 = P5, P6
//   [deadlines] registration = 5   voting = 5   repair = 5
//
// Lines starting with '#' or ';' are comments.
struct Scenario {
  std::string name;
  BackendKind backend = BackendKind::kEC;
  SecurityProfile profile = SecurityProfile::kProduction;
  Coords coords = Coords::kJacobi;
  bool mpc_caching = true;
  bool simultaneous = true;
  bool inverse_hints = true;
  unsigned n = 0;
  unsigned k = 0;
  std::uint64_t seed = 1;
  std::uint64_t deposit = 10;
  std::uint64_t min_deposit = 1;
  std::uint64_t authority_deposit = 0;
  bool dummy_vote = false;
  unsigned workers = 1;
  std::uint64_t registration_ticks = 5;
  std::uint64_t voting_ticks = 5;
  std::uint64_t repair_ticks = 5;

  std::map<unsigned, unsigned> choices;  // participant -> choice
  std::vector<unsigned> register_stalls;
  std::vector<unsigned> voting_stalls;
  std::map<unsigned, std::vector<unsigned>> repair_stalls;  // round -> participants

  // Derived at load time: some stage leaves fewer than three voters.
  bool expected_infeasible = false;
};

std::string participant_id(unsigned index);

// Throws Error(kParse) with "line N: ..." diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);
// Recomputes expected_infeasible and checks the cross-section invariants.
void validate_scenario(Scenario& s);

struct TxCost {
  std::size_t index = 0;
  std::string sender;
  std::string action;
  std::string phase;  // phase the transaction was submitted in
  bool accepted = false;
  std::string error;
  OpCounter cost;
};

struct RunReport {
  std::string scenario;
  std::string outcome;  // "closed" or "tally-infeasible"
  bool expected_infeasible = false;
  std::optional<Counts> tally;  // published, fairness dummy removed
  std::optional<Counts> raw_tally;
  std::uint32_t counted_votes = 0;
  std::vector<std::vector<std::string>> faulty_rounds;
  std::map<std::string, OpCounter> phase_costs;
  std::vector<TxCost> transactions;
  std::optional<Settlement> settlement;
  std::optional<TallyResult> search;
  double seconds_total = 0;
  double seconds_tally = 0;
  std::string state_digest;
  std::string transcript;  // full transcript text
  std::string transcript_path;
  std::string report_path;
};

// Runs the election end to end. With out_dir set, writes
// <name>.transcript.jsonl and <name>.report.json there.
RunReport run_scenario(const Scenario& s, const std::optional<std::string>& out_dir = {});
std::string report_json(const RunReport& r);

struct BenchOptions {
  std::vector<std::uint32_t> n_list{20, 30, 40};
  std::vector<unsigned> k_list{2, 4, 6};
  unsigned workers = 4;
  BackendKind backend = BackendKind::kEC;
  SecurityProfile profile = SecurityProfile::kProduction;
  std::uint64_t seed = 1;
};

struct BenchCell {
  std::uint32_t voters = 0;
  unsigned k = 0;
  Counts planted;
  std::uint64_t space = 0;  // C(n' + k - 1, k - 1)
  TallyResult single;  // one worker
  TallyResult parallel;  // opts.workers
  double speedup = 0;
  bool recovered = false;
};

// Upper-bound timing: every cell scans its full space.
std::vector<BenchCell> bench_tally(const BenchOptions& opts);
std::string bench_json(const BenchOptions& opts, const std::vector<BenchCell>& cells);

}  // namespace bbbvote

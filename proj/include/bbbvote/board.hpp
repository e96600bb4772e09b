#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbbvote/group.hpp"
#include "bbbvote/protocol.hpp"
#include "bbbvote/tally.hpp"

namespace bbbvote {

enum class Phase {
  kSetup,
  kRegistration,
  kPreVoting,
  kVoting,
  kFaultRepair,
  kTally,
  kClosed,
};

enum class Action : std::uint8_t {
  kEnroll,
  kRegister,
  kComputeMpcKeys,
  kSubmitVote,
  kRepairVote,
  kTick,
  kSubmitTally,
  kSettleDeposits,
};

const char* to_string(Phase phase);
const char* to_string(Action action);
Action parse_action(const std::string& s);

struct BoardConfig {
  BackendKind backend = BackendKind::kEC;
  SecurityProfile profile = SecurityProfile::kProduction;
  unsigned n = 3;  // participants the parameters are sized for
  unsigned k = 2;
  Coords coords = Coords::kJacobi;
  bool mpc_caching = true;
  bool simultaneous = true;  // verifier form, see VerifyOptions
  std::string authority = "VA";
  std::uint64_t min_deposit = 1;
  std::uint64_t authority_deposit = 0;  // refunded at settlement, never forfeited
  std::uint64_t registration_ticks = 10;
  std::uint64_t voting_ticks = 10;
  std::uint64_t repair_ticks = 10;
  // Fairness mode: this enrollee is the authority's dummy voter whose
  // pre-committed choice 1 is subtracted from the published result.
  std::string dummy_voter;
};

std::string config_document(const BoardConfig& config);  // compact JSON
BoardConfig parse_config_document(const std::string& doc);

struct Transaction {
  std::string sender;
  Action action = Action::kTick;
  Bytes payload;
};

struct Receipt {
  bool accepted = false;
  std::string error;
  OpCounter cost;
  std::uint64_t time = 0;
};

struct TranscriptRecord {
  std::uint64_t time = 0;
  std::string sender;
  Action action = Action::kTick;
  Bytes payload;
  bool accepted = false;
  std::string error;
  OpCounter cost;
};

struct VoterRecord {
  std::string id;
  std::size_t index = 0;  // 1-based position among registrants
  Element pubkey;
  std::uint64_t deposit = 0;
  Element mpc_key;
  std::optional<BlindedVote> vote;
  unsigned faulty_round = 0;  // 0: not faulty
  unsigned repaired_round = 0;  // last fault round this voter repaired
};

struct Settlement {
  std::vector<std::pair<std::string, std::uint64_t>> payouts;  // registration order
  std::uint64_t authority_refund = 0;
  std::uint64_t forfeited = 0;
  std::uint64_t remainder = 0;  // indivisible part kept by the board
};

// Payload encoders shared by the board's convenience methods and clients.
Bytes encode_enroll(std::span<const std::string> ids);
Bytes encode_register(Group& group, const Element& pubkey, std::uint64_t deposit);
Bytes encode_vote(Group& group, const Element& vote, const MembershipProof& proof);
Bytes encode_repair(Group& group, std::span<const RecoveryShare> shares);
Bytes encode_tick(std::uint64_t dt);
Bytes encode_tally(std::span<const std::uint32_t> counts);

// Emulated voting contract. Every mutation goes through apply(), one
// transaction at a time, and is appended to the transcript with its cost.
class BulletinBoard {
 public:
  explicit BulletinBoard(BoardConfig config);

  Receipt apply(const Transaction& tx);

  Receipt enroll_voters(const std::string& sender, std::span<const std::string> ids);
  Receipt register_voter(const std::string& sender, const Element& pubkey,
                         std::uint64_t deposit);
  Receipt compute_mpc_keys(const std::string& sender);
  Receipt submit_vote(const std::string& sender, const Element& vote,
                      const MembershipProof& proof);
  Receipt repair_vote(const std::string& sender, std::span<const RecoveryShare> shares);
  Receipt tick(std::uint64_t dt, const std::string& sender = "clock");
  Receipt submit_tally(const std::string& sender, std::span<const std::uint32_t> counts);
  Receipt settle_deposits(const std::string& sender);

  const BoardConfig& config() const { return config_; }
  const GroupParams& params() const { return group_.params(); }
  const std::shared_ptr<const GroupParams>& shared_params() const {
    return group_.shared_params();
  }
  Phase phase() const { return phase_; }
  unsigned round() const { return round_; }
  std::uint64_t clock() const { return clock_; }
  std::uint64_t deadline() const { return deadline_; }
  bool infeasible() const { return infeasible_; }

  const std::vector<std::string>& enrolled() const { return enrolled_; }
  const std::vector<VoterRecord>& voters() const { return voters_; }
  const VoterRecord* voter(const std::string& id) const;
  const std::vector<std::vector<std::size_t>>& faulty_rounds() const { return faulty_rounds_; }
  // Votes of voters never declared faulty, as repaired so far.
  std::vector<BlindedVote> surviving_votes() const;

  const std::optional<Counts>& result() const { return result_; }
  // result() minus the fairness dummy vote, if any.
  std::optional<Counts> published_result() const;
  const std::optional<Settlement>& settlement() const { return settlement_; }

  // Hash of the protocol state. Rejected transactions leave it unchanged.
  Bytes state_digest() const;
  // Running hash over every transcript record, accepted or not.
  const Bytes& transcript_head() const { return chain_; }
  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }

 private:
  void do_enroll(const Transaction& tx);
  void do_register(const Transaction& tx);
  void do_compute_mpc_keys(const Transaction& tx);
  void do_submit_vote(const Transaction& tx);
  void do_repair_vote(const Transaction& tx);
  void do_tick(const Transaction& tx);
  void do_submit_tally(const Transaction& tx);
  void do_settle(const Transaction& tx);

  void on_deadline();
  VoterRecord* find_voter(const std::string& id);

  BoardConfig config_;
  Group group_;
  Phase phase_ = Phase::kSetup;
  unsigned round_ = 0;
  std::uint64_t clock_ = 0;
  std::uint64_t deadline_ = 0;
  bool infeasible_ = false;

  std::vector<std::string> enrolled_;
  std::map<std::string, std::pair<Element, std::uint64_t>> registrations_;
  std::vector<VoterRecord> voters_;
  std::vector<std::vector<std::size_t>> faulty_rounds_;
  std::optional<Counts> result_;
  std::optional<Settlement> settlement_;
  std::vector<TranscriptRecord> transcript_;
  Bytes chain_;  // running hash over every transcript record
};

}  // namespace bbbvote

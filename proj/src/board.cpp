#include "bbbvote/board.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bbbvote/errors.hpp"

namespace bbbvote {

namespace {

// Raised by a handler to reject a transaction. Handlers validate before they
// mutate, so a rejection leaves the board untouched.
struct Reject {
  std::string reason;
};

[[noreturn]] void reject(std::string reason) { throw Reject{std::move(reason)}; }

std::size_t encoded_width(const GroupParams& params) {
  return params.backend == BackendKind::kIA ? params.element_width()
                                            : 2 * params.element_width();
}

void require(bool cond, const char* reason) {
  if (!cond) reject(reason);
}

constexpr std::pair<Action, const char*> kActionNames[] = {
    {Action::kEnroll, "enroll_voters"},
    {Action::kRegister, "register"},
    {Action::kComputeMpcKeys, "compute_mpc_keys"},
    {Action::kSubmitVote, "submit_vote"},
    {Action::kRepairVote, "repair_vote"},
    {Action::kTick, "tick"},
    {Action::kSubmitTally, "submit_tally"},
    {Action::kSettleDeposits, "settle_deposits"},
};

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kSetup: return "SETUP";
    case Phase::kRegistration: return "REGISTRATION";
    case Phase::kPreVoting: return "PRE_VOTING";
    case Phase::kVoting: return "VOTING";
    case Phase::kFaultRepair: return "FAULT_REPAIR";
    case Phase::kTally: return "TALLY";
    case Phase::kClosed: return "CLOSED";
  }
  return "?";
}

const char* to_string(Action action) {
  for (const auto& [a, name] : kActionNames) {
    if (a == action) return name;
  }
  return "?";
}

Action parse_action(const std::string& s) {
  for (const auto& [a, name] : kActionNames) {
    if (s == name) return a;
  }
  throw Error(ErrorCode::kParse, "unknown action '" + s + "'");
}

std::string config_document(const BoardConfig& c) {
  nlohmann::json j;
  j["backend"] = to_string(c.backend);
  j["profile"] = to_string(c.profile);
  j["n"] = c.n;
  j["k"] = c.k;
  j["coords"] = to_string(c.coords);
  j["mpc_caching"] = c.mpc_caching;
  j["simultaneous"] = c.simultaneous;
  j["authority"] = c.authority;
  j["min_deposit"] = c.min_deposit;
  j["authority_deposit"] = c.authority_deposit;
  j["registration_ticks"] = c.registration_ticks;
  j["voting_ticks"] = c.voting_ticks;
  j["repair_ticks"] = c.repair_ticks;
  j["dummy_voter"] = c.dummy_voter;
  return j.dump();
}

BoardConfig parse_config_document(const std::string& doc) {
  try {
    const auto j = nlohmann::json::parse(doc);
    BoardConfig c;
    c.backend = parse_backend(j.at("backend").get<std::string>());
    c.profile = parse_profile(j.at("profile").get<std::string>());
    c.n = j.at("n").get<unsigned>();
    c.k = j.at("k").get<unsigned>();
    c.coords = parse_coords(j.at("coords").get<std::string>());
    c.mpc_caching = j.at("mpc_caching").get<bool>();
    c.simultaneous = j.at("simultaneous").get<bool>();
    c.authority = j.at("authority").get<std::string>();
    c.min_deposit = j.at("min_deposit").get<std::uint64_t>();
    c.authority_deposit = j.at("authority_deposit").get<std::uint64_t>();
    c.registration_ticks = j.at("registration_ticks").get<std::uint64_t>();
    c.voting_ticks = j.at("voting_ticks").get<std::uint64_t>();
    c.repair_ticks = j.at("repair_ticks").get<std::uint64_t>();
    c.dummy_voter = j.at("dummy_voter").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad board config: ") + e.what());
  }
}

Bytes encode_enroll(std::span<const std::string> ids) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (const auto& id : ids) w.str(id);
  return std::move(w).bytes();
}

Bytes encode_register(Group& group, const Element& pubkey, std::uint64_t deposit) {
  ByteWriter w;
  w.raw(group.canonical_bytes(pubkey));
  w.u64(deposit);
  return std::move(w).bytes();
}

Bytes encode_vote(Group& group, const Element& vote, const MembershipProof& proof) {
  ByteWriter w;
  w.raw(group.canonical_bytes(vote));
  w.blob(encode_proof(group, proof));
  return std::move(w).bytes();
}

Bytes encode_repair(Group& group, std::span<const RecoveryShare> shares) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(shares.size()));
  for (const auto& s : shares) w.blob(encode_share(group, s));
  return std::move(w).bytes();
}

Bytes encode_tick(std::uint64_t dt) {
  ByteWriter w;
  w.u64(dt);
  return std::move(w).bytes();
}

Bytes encode_tally(std::span<const std::uint32_t> counts) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(counts.size()));
  for (auto c : counts) w.u32(c);
  return std::move(w).bytes();
}

BulletinBoard::BulletinBoard(BoardConfig config)
    : config_(std::move(config)),
      group_(derive_params(config_.backend, config_.profile, config_.n, config_.k),
             config_.coords) {
  if (config_.authority.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "authority id must not be empty");
  }
}

Receipt BulletinBoard::apply(const Transaction& tx) {
  Receipt receipt;
  receipt.time = clock_;
  group_.counter_reset();
  try {
    switch (tx.action) {
      case Action::kEnroll: do_enroll(tx); break;
      case Action::kRegister: do_register(tx); break;
      case Action::kComputeMpcKeys: do_compute_mpc_keys(tx); break;
      case Action::kSubmitVote: do_submit_vote(tx); break;
      case Action::kRepairVote: do_repair_vote(tx); break;
      case Action::kTick: do_tick(tx); break;
      case Action::kSubmitTally: do_submit_tally(tx); break;
      case Action::kSettleDeposits: do_settle(tx); break;
      default: reject("unknown action");
    }
    receipt.accepted = true;
  } catch (const Reject& r) {
    receipt.error = r.reason;
  } catch (const Error& e) {
    receipt.error = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  receipt.cost = group_.counter_snapshot();

  TranscriptRecord rec;
  rec.time = receipt.time;
  rec.sender = tx.sender;
  rec.action = tx.action;
  rec.payload = tx.payload;
  rec.accepted = receipt.accepted;
  rec.error = receipt.error;
  rec.cost = receipt.cost;
  ByteWriter w;
  w.raw(chain_);
  w.u64(rec.time);
  w.str(rec.sender);
  w.u8(static_cast<std::uint8_t>(rec.action));
  w.blob(rec.payload);
  w.u8(rec.accepted ? 1 : 0);
  w.str(rec.error);
  for (auto v : {rec.cost.group_mults, rec.cost.exponentiations, rec.cost.doublings,
                 rec.cost.field_inversions, rec.cost.field_mults, rec.cost.hashes,
                 rec.cost.affine_transforms}) {
    w.u64(v);
  }
  chain_ = sha256(w.bytes());
  transcript_.push_back(std::move(rec));
  return receipt;
}

Receipt BulletinBoard::enroll_voters(const std::string& sender,
                                     std::span<const std::string> ids) {
  return apply({sender, Action::kEnroll, encode_enroll(ids)});
}

Receipt BulletinBoard::register_voter(const std::string& sender, const Element& pubkey,
                                      std::uint64_t deposit) {
  return apply({sender, Action::kRegister, encode_register(group_, pubkey, deposit)});
}

Receipt BulletinBoard::compute_mpc_keys(const std::string& sender) {
  return apply({sender, Action::kComputeMpcKeys, {}});
}

Receipt BulletinBoard::submit_vote(const std::string& sender, const Element& vote,
                                   const MembershipProof& proof) {
  return apply({sender, Action::kSubmitVote, encode_vote(group_, vote, proof)});
}

Receipt BulletinBoard::repair_vote(const std::string& sender,
                                   std::span<const RecoveryShare> shares) {
  return apply({sender, Action::kRepairVote, encode_repair(group_, shares)});
}

Receipt BulletinBoard::tick(std::uint64_t dt, const std::string& sender) {
  return apply({sender, Action::kTick, encode_tick(dt)});
}

Receipt BulletinBoard::submit_tally(const std::string& sender,
                                    std::span<const std::uint32_t> counts) {
  return apply({sender, Action::kSubmitTally, encode_tally(counts)});
}

Receipt BulletinBoard::settle_deposits(const std::string& sender) {
  return apply({sender, Action::kSettleDeposits, {}});
}

const VoterRecord* BulletinBoard::voter(const std::string& id) const {
  for (const auto& v : voters_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

VoterRecord* BulletinBoard::find_voter(const std::string& id) {
  for (auto& v : voters_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

std::vector<BlindedVote> BulletinBoard::surviving_votes() const {
  std::vector<BlindedVote> out;
  for (const auto& v : voters_) {
    if (v.faulty_round == 0 && v.vote) out.push_back(*v.vote);
  }
  return out;
}

std::optional<Counts> BulletinBoard::published_result() const {
  if (!result_) return std::nullopt;
  Counts c = *result_;
  if (!config_.dummy_voter.empty()) {
    const VoterRecord* d = voter(config_.dummy_voter);
    if (d != nullptr && d->faulty_round == 0 && d->vote && c[0] > 0) c[0]--;
  }
  return c;
}

void BulletinBoard::do_enroll(const Transaction& tx) {
  require(phase_ == Phase::kSetup, "enrollment is closed");
  require(tx.sender == config_.authority, "only the authority may enroll voters");
  ByteReader r(tx.payload);
  const std::uint32_t count = r.u32();
  std::vector<std::string> ids;
  for (std::uint32_t i = 0; i < count; ++i) ids.push_back(r.str());
  r.expect_done();

  std::set<std::string> seen;
  for (const auto& id : ids) {
    require(!id.empty(), "empty voter id");
    require(id != config_.authority && id != "clock", "reserved voter id");
    require(seen.insert(id).second, "duplicate voter id");
  }
  require(ids.size() >= 3, "at least three voters are required");
  require(ids.size() <= params().n, "more voters than the parameters allow");
  if (!config_.dummy_voter.empty()) {
    require(seen.count(config_.dummy_voter) == 1, "dummy voter must be enrolled");
  }

  enrolled_ = std::move(ids);
  phase_ = Phase::kRegistration;
  deadline_ = clock_ + config_.registration_ticks;
}

void BulletinBoard::do_register(const Transaction& tx) {
  require(phase_ == Phase::kRegistration, "registration is closed");
  require(clock_ <= deadline_, "registration deadline passed");
  require(std::find(enrolled_.begin(), enrolled_.end(), tx.sender) != enrolled_.end(),
          "sender is not enrolled");
  require(registrations_.count(tx.sender) == 0, "sender already registered");

  ByteReader r(tx.payload);
  const Element pub = group_.decode_element(r.raw(encoded_width(params())));
  const std::uint64_t deposit = r.u64();
  r.expect_done();
  require(!group_.is_identity(pub), "ephemeral key is the identity");
  require(deposit >= config_.min_deposit, "deposit below the minimum");

  registrations_.emplace(tx.sender, std::make_pair(pub, deposit));
}

void BulletinBoard::do_compute_mpc_keys(const Transaction& tx) {
  require(tx.sender == config_.authority, "only the authority may compute MPC keys");
  require(tx.payload.empty(), "unexpected payload");
  const bool all_in = registrations_.size() == enrolled_.size();
  require(phase_ == Phase::kPreVoting || (phase_ == Phase::kRegistration && all_in),
          "MPC keys cannot be computed in this phase");
  require(registrations_.size() >= 3, "fewer than three registered voters");

  std::vector<VoterRecord> voters;
  std::vector<Element> pubkeys;
  for (const auto& id : enrolled_) {
    auto it = registrations_.find(id);
    if (it == registrations_.end()) continue;
    VoterRecord v;
    v.id = id;
    v.index = voters.size() + 1;
    v.pubkey = it->second.first;
    v.deposit = it->second.second;
    pubkeys.push_back(v.pubkey);
    voters.push_back(std::move(v));
  }
  const auto keys = config_.mpc_caching ? mpc_keys_cached(group_, pubkeys)
                                        : mpc_keys_naive(group_, pubkeys);
  for (std::size_t i = 0; i < voters.size(); ++i) {
    voters[i].mpc_key = group_.to_affine(keys[i].key);
  }

  voters_ = std::move(voters);
  phase_ = Phase::kVoting;
  deadline_ = clock_ + config_.voting_ticks;
}

void BulletinBoard::do_submit_vote(const Transaction& tx) {
  require(phase_ == Phase::kVoting, "voting is closed");
  require(clock_ <= deadline_, "voting deadline passed");
  VoterRecord* v = find_voter(tx.sender);
  require(v != nullptr, "sender is not a registered voter");
  require(!v->vote, "sender already voted");

  ByteReader r(tx.payload);
  const Element value = group_.decode_element(r.raw(encoded_width(params())));
  const MembershipProof proof = decode_proof(group_, r.blob());
  r.expect_done();

  const Verdict verdict = verify_membership(group_, proof, v->pubkey, v->mpc_key, value,
                                            {.simultaneous = config_.simultaneous});
  if (!verdict) reject("invalid membership proof: " + verdict.reason);

  v->vote = BlindedVote{v->index, value, {}};
}

void BulletinBoard::do_repair_vote(const Transaction& tx) {
  require(phase_ == Phase::kFaultRepair, "no fault repair round is open");
  require(clock_ <= deadline_, "repair deadline passed");
  VoterRecord* v = find_voter(tx.sender);
  require(v != nullptr, "sender is not a registered voter");
  require(v->faulty_round == 0 && v->vote, "sender is not an active voter");
  require(v->repaired_round < round_, "sender already repaired this round");

  ByteReader r(tx.payload);
  const std::uint32_t count = r.u32();
  std::vector<RecoveryShare> shares;
  for (std::uint32_t i = 0; i < count; ++i) shares.push_back(decode_share(group_, r.blob()));
  r.expect_done();

  for (const auto& s : shares) {
    require(s.honest == v->index, "share does not belong to the sender");
    require(s.faulty >= 1 && s.faulty <= voters_.size(), "share names an unknown voter");
    const VoterRecord& f = voters_[s.faulty - 1];
    const Verdict verdict = verify_pairwise_key(group_, s, v->pubkey, f.pubkey,
                                                {.simultaneous = config_.simultaneous});
    if (!verdict) {
      reject("invalid recovery share for voter " + std::to_string(s.faulty) + ": " +
             verdict.reason);
    }
  }
  BlindedVote repaired = repair_blinded_vote(group_, *v->vote, shares, faulty_rounds_[round_ - 1]);

  v->vote = std::move(repaired);
  v->repaired_round = round_;
}

void BulletinBoard::do_tick(const Transaction& tx) {
  ByteReader r(tx.payload);
  const std::uint64_t dt = r.u64();
  r.expect_done();
  require(dt > 0, "tick must advance the clock");
  require(clock_ + dt > clock_, "clock overflow");

  clock_ += dt;
  if (clock_ <= deadline_) return;
  switch (phase_) {
    case Phase::kRegistration:
      if (registrations_.size() >= 3) {
        phase_ = Phase::kPreVoting;
      } else {
        phase_ = Phase::kClosed;
        infeasible_ = true;
      }
      break;
    case Phase::kVoting:
    case Phase::kFaultRepair:
      on_deadline();
      break;
    default:
      break;
  }
}

void BulletinBoard::on_deadline() {
  std::vector<std::size_t> missing;
  std::size_t active = 0;
  for (const auto& v : voters_) {
    if (v.faulty_round != 0) continue;
    active++;
    const bool done = phase_ == Phase::kVoting ? v.vote.has_value() : v.repaired_round >= round_;
    if (!done) missing.push_back(v.index);
  }
  if (missing.empty()) {
    phase_ = Phase::kTally;
    return;
  }
  round_++;
  for (auto idx : missing) voters_[idx - 1].faulty_round = round_;
  faulty_rounds_.push_back(missing);
  if (active - missing.size() < 3) {
    phase_ = Phase::kClosed;
    infeasible_ = true;
    return;
  }
  phase_ = Phase::kFaultRepair;
  deadline_ = clock_ + config_.repair_ticks;
}

void BulletinBoard::do_submit_tally(const Transaction& tx) {
  require(phase_ == Phase::kTally, "tally is not open");
  ByteReader r(tx.payload);
  const std::uint16_t k = r.u16();
  Counts counts;
  for (std::uint16_t i = 0; i < k; ++i) counts.push_back(r.u32());
  r.expect_done();
  require(counts.size() == params().k, "wrong number of counts");

  const auto votes = surviving_votes();
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  require(sum == votes.size(), "counts do not sum to the number of counted votes");
  const Element product = aggregate_product(group_, votes);
  require(check_tally(group_, counts, product), "counts do not match the aggregate vote");

  result_ = std::move(counts);
  phase_ = Phase::kClosed;
}

void BulletinBoard::do_settle(const Transaction& tx) {
  require(phase_ == Phase::kClosed, "election is not closed");
  require(!settlement_, "deposits already settled");
  require(tx.payload.empty(), "unexpected payload");

  Settlement s;
  s.authority_refund = config_.authority_deposit;
  std::vector<std::pair<std::string, std::uint64_t>> honest;
  if (voters_.empty()) {
    // Closed during registration: nobody misbehaved.
    for (const auto& id : enrolled_) {
      auto it = registrations_.find(id);
      if (it != registrations_.end()) honest.emplace_back(id, it->second.second);
    }
  } else {
    for (const auto& v : voters_) {
      if (v.faulty_round == 0) {
        honest.emplace_back(v.id, v.deposit);
      } else {
        s.forfeited += v.deposit;
      }
    }
  }
  const std::uint64_t share = honest.empty() ? 0 : s.forfeited / honest.size();
  s.remainder = s.forfeited - share * honest.size();
  for (auto& [id, dep] : honest) dep += share;

  std::map<std::string, std::uint64_t> payout(honest.begin(), honest.end());
  for (const auto& id : enrolled_) {
    if (registrations_.count(id) == 0) continue;
    auto it = payout.find(id);
    s.payouts.emplace_back(id, it == payout.end() ? 0 : it->second);
  }
  settlement_ = std::move(s);
}

Bytes BulletinBoard::state_digest() const {
  Group g(group_.shared_params(), config_.coords);
  ByteWriter w;
  w.str(config_document(config_));
  w.u8(static_cast<std::uint8_t>(phase_));
  w.u32(round_);
  w.u64(clock_);
  w.u64(deadline_);
  w.u8(infeasible_ ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(enrolled_.size()));
  for (const auto& id : enrolled_) w.str(id);
  w.u32(static_cast<std::uint32_t>(registrations_.size()));
  for (const auto& [id, reg] : registrations_) {
    w.str(id);
    w.raw(g.canonical_bytes(reg.first));
    w.u64(reg.second);
  }
  w.u32(static_cast<std::uint32_t>(voters_.size()));
  for (const auto& v : voters_) {
    w.str(v.id);
    w.u32(static_cast<std::uint32_t>(v.index));
    w.raw(g.canonical_bytes(v.mpc_key));
    w.u32(v.faulty_round);
    w.u32(v.repaired_round);
    w.u8(v.vote ? 1 : 0);
    if (v.vote) {
      w.raw(g.canonical_bytes(v.vote->value));
      w.u32(static_cast<std::uint32_t>(v.vote->repairs.size()));
      for (const auto& e : v.vote->repairs) {
        w.u32(static_cast<std::uint32_t>(e.faulty));
        w.u8(static_cast<std::uint8_t>(e.sign));
      }
    }
  }
  w.u8(result_ ? 1 : 0);
  if (result_) {
    for (auto c : *result_) w.u32(c);
  }
  w.u8(settlement_ ? 1 : 0);
  if (settlement_) {
    for (const auto& [id, amount] : settlement_->payouts) {
      w.str(id);
      w.u64(amount);
    }
    w.u64(settlement_->authority_refund);
    w.u64(settlement_->forfeited);
    w.u64(settlement_->remainder);
  }
  return sha256(w.bytes());
}

}  // namespace bbbvote

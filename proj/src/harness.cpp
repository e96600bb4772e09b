#include "bbbvote/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bbbvote/errors.hpp"
#include "bbbvote/rng.hpp"
#include "bbbvote/transcript.hpp"

namespace bbbvote {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::string kAuthority = "VA";
const std::string kDummy = "VA.dummy";

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& v, std::size_t line) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    parse_fail(line, "expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    parse_fail(line, "integer out of range '" + v + "'");
  }
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  parse_fail(line, "expected true or false, got '" + v + "'");
}

// "P3" or "3".
unsigned parse_participant(const std::string& v, std::size_t line) {
  std::string digits = v;
  if (!digits.empty() && (digits[0] == 'P' || digits[0] == 'p')) digits.erase(0, 1);
  const auto idx = parse_uint(digits, line);
  if (idx == 0) parse_fail(line, "participants are numbered from 1");
  return static_cast<unsigned>(idx);
}

std::vector<unsigned> parse_participant_list(const std::string& v, std::size_t line) {
  std::vector<unsigned> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_participant(item, line));
  }
  return out;
}

json ops_json(const OpCounter& c) {
  return {{"affine_transforms", c.affine_transforms},
          {"doublings", c.doublings},
          {"exponentiations", c.exponentiations},
          {"field_inversions", c.field_inversions},
          {"field_mults", c.field_mults},
          {"group_mults", c.group_mults},
          {"hashes", c.hashes}};
}

json ranges_json(const std::vector<WorkerRange>& ranges) {
  json out = json::array();
  for (const auto& r : ranges) {
    out.push_back({{"begin", r.begin}, {"end", r.end}, {"checked", r.checked}});
  }
  return out;
}

}  // namespace

std::string participant_id(unsigned index) { return "P" + std::to_string(index); }

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Scenario s;
  s.name = name;
  std::string section;
  std::set<std::string> seen_keys;
  std::map<unsigned, std::size_t> choice_lines;
  std::map<unsigned, std::size_t> stall_lines;  // round (0 = voting) -> line
  std::size_t register_line = 0;
  bool have_n = false;
  bool have_k = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string l = trim(raw);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') parse_fail(line, "unterminated section header");
      section = trim(std::string_view(l).substr(1, l.size() - 2));
      if (section != "params" && section != "choices" && section != "stalls" &&
          section != "deadlines") {
        parse_fail(line, "unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    const std::string key = trim(std::string_view(l).substr(0, eq));
    const std::string value = trim(std::string_view(l).substr(eq + 1));
    if (section.empty()) parse_fail(line, "key outside of a section");
    if (key.empty()) parse_fail(line, "empty key");
    if (!seen_keys.insert(section + "." + key).second) {
      parse_fail(line, "duplicate key '" + key + "'");
    }

    try {
      if (section == "params") {
        if (key == "backend") {
          s.backend = parse_backend(value);
        } else if (key == "profile") {
          s.profile = parse_profile(value);
        } else if (key == "coords") {
          s.coords = parse_coords(value);
        } else if (key == "n") {
          s.n = static_cast<unsigned>(parse_uint(value, line));
          have_n = true;
        } else if (key == "k") {
          s.k = static_cast<unsigned>(parse_uint(value, line));
          have_k = true;
        } else if (key == "seed") {
          s.seed = parse_uint(value, line);
        } else if (key == "deposit") {
          s.deposit = parse_uint(value, line);
        } else if (key == "min_deposit") {
          s.min_deposit = parse_uint(value, line);
        } else if (key == "authority_deposit") {
          s.authority_deposit = parse_uint(value, line);
        } else if (key == "mpc_caching") {
          s.mpc_caching = parse_bool(value, line);
        } else if (key == "simultaneous") {
          s.simultaneous = parse_bool(value, line);
        } else if (key == "hints") {
          s.inverse_hints = parse_bool(value, line);
        } else if (key == "dummy_vote") {
          s.dummy_vote = parse_bool(value, line);
        } else if (key == "workers") {
          s.workers = static_cast<unsigned>(parse_uint(value, line));
          if (s.workers == 0) parse_fail(line, "workers must be positive");
        } else {
          parse_fail(line, "unknown parameter '" + key + "'");
        }
      } else if (section == "choices") {
        const unsigned p = parse_participant(key, line);
        const auto c = parse_uint(value, line);
        if (c == 0) parse_fail(line, "choices are numbered from 1");
        s.choices[p] = static_cast<unsigned>(c);
        choice_lines[p] = line;
      } else if (section == "stalls") {
        const auto who = parse_participant_list(value, line);
        if (key == "register") {
          s.register_stalls = who;
          register_line = line;
        } else if (key == "voting") {
          s.voting_stalls = who;
          stall_lines[0] = line;
        } else if (key.rfind("repair.", 0) == 0) {
          const auto round = parse_uint(key.substr(7), line);
          if (round == 0) parse_fail(line, "repair rounds are numbered from 1");
          s.repair_stalls[static_cast<unsigned>(round)] = who;
          stall_lines[static_cast<unsigned>(round)] = line;
        } else {
          parse_fail(line, "unknown stall key '" + key + "'");
        }
      } else if (section == "deadlines") {
        const auto ticks = parse_uint(value, line);
        if (key == "registration") {
          s.registration_ticks = ticks;
        } else if (key == "voting") {
          s.voting_ticks = ticks;
        } else if (key == "repair") {
          s.repair_ticks = ticks;
        } else {
          parse_fail(line, "unknown deadline '" + key + "'");
        }
      }
    } catch (const Error& e) {
      if (std::string_view(e.what()).rfind("line ", 0) == 0) throw;
      parse_fail(line, e.what());
    }
  }

  if (!have_n) parse_fail(line, "missing params.n");
  if (!have_k) parse_fail(line, "missing params.k");

  // Line-level checks that need the whole file.
  for (const auto& [p, c] : s.choices) {
    if (p > s.n) parse_fail(choice_lines[p], "participant P" + std::to_string(p) + " exceeds n");
    if (c > s.k) parse_fail(choice_lines[p], "choice out of range 1.." + std::to_string(s.k));
  }
  for (auto p : s.register_stalls) {
    if (p > s.n) parse_fail(register_line, "participant P" + std::to_string(p) + " exceeds n");
    if (s.choices.count(p)) {
      parse_fail(register_line, "P" + std::to_string(p) + " stalls in registration but has a choice");
    }
  }
  for (auto p : s.voting_stalls) {
    if (p > s.n) parse_fail(stall_lines[0], "participant P" + std::to_string(p) + " exceeds n");
    if (s.choices.count(p)) {
      parse_fail(stall_lines[0], "P" + std::to_string(p) + " stalls in voting but has a choice");
    }
  }
  for (const auto& [round, who] : s.repair_stalls) {
    for (auto p : who) {
      if (p > s.n) parse_fail(stall_lines[round], "participant P" + std::to_string(p) + " exceeds n");
      if (!s.choices.count(p)) {
        parse_fail(stall_lines[round],
                   "P" + std::to_string(p) + " stalls in repair but never votes");
      }
    }
  }
  for (unsigned p = 1; p <= s.n; ++p) {
    const bool silent = std::count(s.register_stalls.begin(), s.register_stalls.end(), p) ||
                        std::count(s.voting_stalls.begin(), s.voting_stalls.end(), p);
    if (!silent && !s.choices.count(p)) {
      parse_fail(line, "P" + std::to_string(p) + " has no choice and does not stall");
    }
  }
  try {
    validate_scenario(s);
  } catch (const Error& e) {
    parse_fail(line, e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kParse, "cannot read scenario " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).stem().string());
}

void validate_scenario(Scenario& s) {
  if (s.n < 3) throw Error(ErrorCode::kPrivacyPrecondition, "at least three participants required");
  if (s.k < 2) throw Error(ErrorCode::kInvalidArgument, "at least two choices required");
  if (s.deposit < s.min_deposit) {
    throw Error(ErrorCode::kInvalidArgument, "deposit below min_deposit");
  }

  std::set<unsigned> gone;
  auto add_unique = [&](const std::vector<unsigned>& who, const std::string& stage) {
    for (auto p : who) {
      if (!gone.insert(p).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "P" + std::to_string(p) + " stalls twice (" + stage + ")");
      }
    }
  };
  const unsigned extra = s.dummy_vote ? 1 : 0;
  add_unique(s.register_stalls, "registration");
  const std::size_t registered = s.n + extra - gone.size();
  add_unique(s.voting_stalls, "voting");
  std::size_t survivors = s.n + extra - gone.size();
  bool infeasible = registered < 3 || survivors < 3;

  bool round_open = !s.voting_stalls.empty();
  unsigned expected_round = 1;
  for (const auto& [round, who] : s.repair_stalls) {
    if (round != expected_round || !round_open || infeasible) {
      throw Error(ErrorCode::kInvalidArgument,
                  "repair round " + std::to_string(round) + " never opens");
    }
    add_unique(who, "repair round " + std::to_string(round));
    survivors = s.n + extra - gone.size();
    if (survivors < 3) infeasible = true;
    round_open = !who.empty();
    expected_round++;
  }
  s.expected_infeasible = infeasible;
}

RunReport run_scenario(const Scenario& s, const std::optional<std::string>& out_dir) {
  const auto t0 = Clock::now();
  const unsigned extra = s.dummy_vote ? 1 : 0;

  BoardConfig cfg;
  cfg.backend = s.backend;
  cfg.profile = s.profile;
  cfg.n = s.n + extra;
  cfg.k = s.k;
  cfg.coords = s.coords;
  cfg.mpc_caching = s.mpc_caching;
  cfg.simultaneous = s.simultaneous;
  cfg.authority = kAuthority;
  cfg.min_deposit = s.min_deposit;
  cfg.authority_deposit = s.authority_deposit;
  cfg.registration_ticks = s.registration_ticks;
  cfg.voting_ticks = s.voting_ticks;
  cfg.repair_ticks = s.repair_ticks;
  if (s.dummy_vote) cfg.dummy_voter = kDummy;

  BulletinBoard board(cfg);
  Group group(board.shared_params(), s.coords);
  const ProveOptions prove{.inverse_hints = s.inverse_hints && s.simultaneous &&
                                            group.uses_jacobi()};

  struct Participant {
    std::string id;
    Rng rng;
    EphemeralKeypair keys;
    unsigned choice = 0;
  };
  std::vector<Participant> people;
  for (unsigned i = 1; i <= s.n; ++i) {
    Participant p{participant_id(i), Rng(s.seed, i), {}, 0};
    p.keys = gen_keypair(group, p.rng);
    auto it = s.choices.find(i);
    if (it != s.choices.end()) p.choice = it->second;
    people.push_back(std::move(p));
  }
  if (s.dummy_vote) {
    Participant d{kDummy, Rng(s.seed, 0), {}, 1};
    d.keys = gen_keypair(group, d.rng);
    people.push_back(std::move(d));
  }
  auto by_id = [&](const std::string& id) -> Participant& {
    for (auto& p : people) {
      if (p.id == id) return p;
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown participant " + id);
  };
  auto stalls_in = [](const std::vector<unsigned>& who, const std::string& id) {
    for (auto p : who) {
      if (participant_id(p) == id) return true;
    }
    return false;
  };

  RunReport report;
  report.scenario = s.name;
  report.expected_infeasible = s.expected_infeasible;

  auto record = [&](Phase before, const Receipt& r) {
    const auto& tr = board.transcript().back();
    TxCost c;
    c.index = board.transcript().size() - 1;
    c.sender = tr.sender;
    c.action = to_string(tr.action);
    c.phase = to_string(before);
    c.accepted = r.accepted;
    c.error = r.error;
    c.cost = r.cost;
    report.phase_costs[c.phase] += r.cost;
    report.transactions.push_back(std::move(c));
    return r;
  };
  auto must = [&](const Receipt& r, const std::string& what) {
    if (!r.accepted) {
      throw Error(ErrorCode::kInvalidArgument, what + " rejected by the board: " + r.error);
    }
  };

  std::vector<std::string> ids;
  for (const auto& p : people) ids.push_back(p.id);
  must(record(board.phase(), board.enroll_voters(kAuthority, ids)), "enrollment");

  for (auto& p : people) {
    if (p.id != kDummy && stalls_in(s.register_stalls, p.id)) continue;
    must(record(board.phase(), board.register_voter(p.id, p.keys.pub, s.deposit)),
         "registration of " + p.id);
  }
  if (!s.register_stalls.empty()) {
    record(board.phase(), board.tick(s.registration_ticks + 1));
  }
  if (board.phase() != Phase::kClosed) {
    must(record(board.phase(), board.compute_mpc_keys(kAuthority)), "MPC key computation");

    // The dummy vote goes in last so nobody sees a partial product first.
    std::vector<Participant*> order;
    for (auto& p : people) {
      if (p.id != kDummy) order.push_back(&p);
    }
    if (s.dummy_vote) order.push_back(&by_id(kDummy));
    for (Participant* p : order) {
      const VoterRecord* v = board.voter(p->id);
      if (v == nullptr || stalls_in(s.voting_stalls, p->id)) continue;
      const BlindedVote bv = blind_vote(group, v->index, p->keys.secret, v->mpc_key, p->choice);
      const MembershipProof proof =
          prove_membership(group, p->keys.secret, v->mpc_key, bv.value, p->choice, p->rng, prove);
      must(record(board.phase(), board.submit_vote(p->id, bv.value, proof)), "vote of " + p->id);
    }
    record(board.phase(), board.tick(s.voting_ticks + 1));

    while (board.phase() == Phase::kFaultRepair) {
      const unsigned round = board.round();
      const auto& faulty = board.faulty_rounds()[round - 1];
      auto st = s.repair_stalls.find(round);
      for (const auto& v : board.voters()) {
        if (v.faulty_round != 0) continue;
        if (st != s.repair_stalls.end() && stalls_in(st->second, v.id)) continue;
        Participant& p = by_id(v.id);
        std::vector<RecoveryShare> shares;
        for (auto j : faulty) {
          const VoterRecord& f = board.voters()[j - 1];
          shares.push_back(prove_pairwise_key(group, v.index, p.keys.secret, v.pubkey, j,
                                              f.pubkey, p.rng, prove));
        }
        must(record(board.phase(), board.repair_vote(v.id, shares)), "repair by " + v.id);
      }
      record(board.phase(), board.tick(s.repair_ticks + 1));
    }

    if (board.phase() == Phase::kTally) {
      const auto t1 = Clock::now();
      const auto votes = board.surviving_votes();
      const Element product = aggregate_product(group, votes);
      SearchOptions opts;
      opts.workers = s.workers;
      opts.exhaustive = !board.params().unique_decoding;
      report.search = search_tally(group, product, static_cast<std::uint32_t>(votes.size()), opts);
      report.seconds_tally = std::chrono::duration<double>(Clock::now() - t1).count();
      must(record(board.phase(), board.submit_tally(kAuthority, report.search->counts)),
           "tally");
      report.counted_votes = static_cast<std::uint32_t>(votes.size());
    }
  }
  must(record(board.phase(), board.settle_deposits(kAuthority)), "settlement");

  report.outcome = board.result() ? "closed" : "tally-infeasible";
  if (s.expected_infeasible && board.result()) {
    throw Error(ErrorCode::kTallyInfeasible, "scenario expected to be infeasible produced a tally");
  }
  report.raw_tally = board.result();
  report.tally = board.published_result();
  for (const auto& round : board.faulty_rounds()) {
    std::vector<std::string> names;
    for (auto j : round) names.push_back(board.voters()[j - 1].id);
    report.faulty_rounds.push_back(std::move(names));
  }
  report.settlement = board.settlement();
  report.state_digest = to_hex(board.state_digest());
  report.transcript = transcript_text(board);
  report.seconds_total = std::chrono::duration<double>(Clock::now() - t0).count();

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const auto base = std::filesystem::path(*out_dir) / s.name;
    report.transcript_path = base.string() + ".transcript.jsonl";
    report.report_path = base.string() + ".report.json";
    std::ofstream(report.transcript_path, std::ios::binary) << report.transcript;
    std::ofstream(report.report_path) << report_json(report) << "\n";
  }
  return report;
}

std::string report_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["outcome"] = r.outcome;
  j["expected_infeasible"] = r.expected_infeasible;
  j["tally"] = r.tally ? json(*r.tally) : json(nullptr);
  j["raw_tally"] = r.raw_tally ? json(*r.raw_tally) : json(nullptr);
  j["counted_votes"] = r.counted_votes;
  j["faulty_rounds"] = r.faulty_rounds;
  json phases = json::object();
  for (const auto& [phase, c] : r.phase_costs) phases[phase] = ops_json(c);
  j["phase_costs"] = phases;
  json txs = json::array();
  for (const auto& t : r.transactions) {
    txs.push_back({{"index", t.index},
                   {"sender", t.sender},
                   {"action", t.action},
                   {"phase", t.phase},
                   {"accepted", t.accepted},
                   {"error", t.error},
                   {"ops", ops_json(t.cost)}});
  }
  j["transactions"] = txs;
  if (r.settlement) {
    json payouts = json::object();
    for (const auto& [id, amount] : r.settlement->payouts) payouts[id] = amount;
    j["settlement"] = {{"payouts", payouts},
                       {"authority_refund", r.settlement->authority_refund},
                       {"forfeited", r.settlement->forfeited},
                       {"remainder", r.settlement->remainder}};
  } else {
    j["settlement"] = nullptr;
  }
  if (r.search) {
    j["tally_search"] = {{"iterations", r.search->iterations},
                         {"workers", r.search->workers},
                         {"seconds", r.search->seconds},
                         {"ranges", ranges_json(r.search->ranges)},
                         {"ops", ops_json(r.search->cost)}};
  }
  j["timings"] = {{"total_seconds", r.seconds_total}, {"tally_seconds", r.seconds_tally}};
  j["state_digest"] = r.state_digest;
  j["transcript_path"] = r.transcript_path;
  return j.dump(2);
}

std::vector<BenchCell> bench_tally(const BenchOptions& opts) {
  if (opts.n_list.empty() || opts.k_list.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark grid is empty");
  }
  std::vector<BenchCell> cells;
  Rng rng(opts.seed);
  for (auto voters : opts.n_list) {
    for (auto k : opts.k_list) {
      BenchCell cell;
      cell.voters = voters;
      cell.k = k;
      cell.space = composition_count(voters, k);
      const auto params = derive_params(opts.backend, opts.profile, std::max(voters, 3u), k);
      Group group(params);
      cell.planted =
          unrank_composition(rng.below(mpz_class(std::to_string(cell.space))).get_ui(), voters, k);
      Element product = group.identity();
      for (unsigned i = 0; i < k; ++i) {
        product = group.op(product, group.exp(params->choice_generators[i],
                                               params->scalar(cell.planted[i])));
      }
      product = group.to_affine(product);

      cell.single = search_tally(group, product, voters, {.workers = 1, .exhaustive = true});
      cell.parallel =
          search_tally(group, product, voters, {.workers = opts.workers, .exhaustive = true});
      cell.speedup = cell.parallel.seconds > 0 ? cell.single.seconds / cell.parallel.seconds : 0;
      cell.recovered = cell.single.counts == cell.planted && cell.parallel.counts == cell.planted;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string bench_json(const BenchOptions& opts, const std::vector<BenchCell>& cells) {
  json j;
  j["backend"] = to_string(opts.backend);
  j["profile"] = to_string(opts.profile);
  j["workers"] = opts.workers;
  j["hardware_threads"] = std::thread::hardware_concurrency();
  json rows = json::array();
  for (const auto& c : cells) {
    rows.push_back({{"voters", c.voters},
                    {"k", c.k},
                    {"space", c.space},
                    {"planted", c.planted},
                    {"recovered", c.recovered},
                    {"iterations_1", c.single.iterations},
                    {"seconds_1", c.single.seconds},
                    {"iterations_w", c.parallel.iterations},
                    {"seconds_w", c.parallel.seconds},
                    {"speedup", c.speedup},
                    {"ranges_w", ranges_json(c.parallel.ranges)}});
  }
  j["cells"] = rows;
  return j.dump(2);
}

}  // namespace bbbvote

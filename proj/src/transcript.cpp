#include "bbbvote/transcript.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bbbvote/errors.hpp"

namespace bbbvote {

namespace {

using nlohmann::json;

json ops_json(const OpCounter& c) {
  return {{"affine_transforms", c.affine_transforms},
          {"doublings", c.doublings},
          {"exponentiations", c.exponentiations},
          {"field_inversions", c.field_inversions},
          {"field_mults", c.field_mults},
          {"group_mults", c.group_mults},
          {"hashes", c.hashes}};
}

OpCounter ops_from_json(const json& j) {
  OpCounter c;
  c.affine_transforms = j.at("affine_transforms").get<std::uint64_t>();
  c.doublings = j.at("doublings").get<std::uint64_t>();
  c.exponentiations = j.at("exponentiations").get<std::uint64_t>();
  c.field_inversions = j.at("field_inversions").get<std::uint64_t>();
  c.field_mults = j.at("field_mults").get<std::uint64_t>();
  c.group_mults = j.at("group_mults").get<std::uint64_t>();
  c.hashes = j.at("hashes").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string transcript_text(const BulletinBoard& board) {
  std::string out;
  json genesis = {{"type", "genesis"}, {"config", json::parse(config_document(board.config()))}};
  out += genesis.dump() + "\n";
  for (const auto& r : board.transcript()) {
    json rec = {{"type", "tx"},
                {"t", r.time},
                {"sender", r.sender},
                {"action", to_string(r.action)},
                {"payload", to_hex(r.payload)},
                {"digest", to_hex(sha256(r.payload))},
                {"accept", r.accepted},
                {"error", r.error},
                {"ops", ops_json(r.cost)}};
    out += rec.dump() + "\n";
  }
  json fin = {{"type", "final"},
              {"records", board.transcript().size()},
              {"phase", to_string(board.phase())},
              {"state_digest", to_hex(board.state_digest())},
              {"transcript_head", to_hex(board.transcript_head())}};
  out += fin.dump() + "\n";
  return out;
}

void write_transcript(const BulletinBoard& board, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  f << transcript_text(board);
}

TranscriptCheck verify_transcript_text(const std::string& text) {
  TranscriptCheck check;
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  if (text.empty() || text.back() != '\n') {
    check.bad_record = lines.empty() ? 0 : lines.size() - 1;
    check.reason = "transcript must end with a newline";
    return check;
  }
  if (lines.size() < 2) {
    check.bad_record = 0;
    check.reason = "transcript needs a genesis and a final record";
    return check;
  }

  auto fail = [&](std::size_t idx, std::string reason) {
    check.accepted = false;
    check.bad_record = idx;
    check.reason = std::move(reason);
    return check;
  };

  std::vector<json> recs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      return fail(i, std::string("unparsable record: ") + e.what());
    }
    if (!j.is_object() || j.dump() != lines[i]) return fail(i, "record is not in canonical form");
    recs.push_back(std::move(j));
  }

  std::optional<BulletinBoard> board;
  try {
    if (recs[0].value("type", "") != "genesis") return fail(0, "first record is not genesis");
    board.emplace(parse_config_document(recs[0].at("config").dump()));
  } catch (const std::exception& e) {
    return fail(0, std::string("bad genesis: ") + e.what());
  }

  const std::size_t last = recs.size() - 1;
  for (std::size_t i = 1; i < last; ++i) {
    const json& r = recs[i];
    try {
      if (r.at("type").get<std::string>() != "tx") return fail(i, "expected a transaction record");
      if (r.size() != 9) return fail(i, "unexpected fields in transaction record");
      Transaction tx;
      tx.sender = r.at("sender").get<std::string>();
      tx.action = parse_action(r.at("action").get<std::string>());
      tx.payload = from_hex(r.at("payload").get<std::string>());
      if (to_hex(sha256(tx.payload)) != r.at("digest").get<std::string>()) {
        return fail(i, "payload digest mismatch");
      }
      if (r.at("t").get<std::uint64_t>() != board->clock()) {
        return fail(i, "logical time does not match replay");
      }
      const Receipt receipt = board->apply(tx);
      if (receipt.accepted != r.at("accept").get<bool>()) {
        return fail(i, receipt.accepted ? "recorded rejection but replay accepts"
                                        : "recorded acceptance but replay rejects: " +
                                              receipt.error);
      }
      if (receipt.error != r.at("error").get<std::string>()) {
        return fail(i, "recorded error does not match replay");
      }
      if (receipt.cost != ops_from_json(r.at("ops"))) {
        return fail(i, "recorded operation counts do not match replay");
      }
    } catch (const std::exception& e) {
      return fail(i, std::string("bad transaction record: ") + e.what());
    }
  }

  try {
    const json& f = recs[last];
    if (f.at("type").get<std::string>() != "final") return fail(last, "last record is not final");
    if (f.size() != 5) return fail(last, "unexpected fields in final record");
    if (f.at("records").get<std::size_t>() != last - 1) return fail(last, "record count mismatch");
    if (f.at("phase").get<std::string>() != to_string(board->phase())) {
      return fail(last, "final phase mismatch");
    }
    if (f.at("state_digest").get<std::string>() != to_hex(board->state_digest())) {
      return fail(last, "state digest mismatch");
    }
    if (f.at("transcript_head").get<std::string>() != to_hex(board->transcript_head())) {
      return fail(last, "transcript hash chain mismatch");
    }
  } catch (const std::exception& e) {
    return fail(last, std::string("bad final record: ") + e.what());
  }

  check.accepted = true;
  check.records = last - 1;
  check.final_phase = board->phase();
  check.result = board->result();
  return check;
}

TranscriptCheck verify_transcript(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return verify_transcript_text(ss.str());
}

}  // namespace bbbvote

#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "bbbvote/board.hpp"

namespace bbbvote {

// One compact JSON object per line with sorted keys: a genesis record holding
// the board configuration, one record per transaction, and a final record
// with the state digest. Byte-identical for identical runs.
std::string transcript_text(const BulletinBoard& board);
void write_transcript(const BulletinBoard& board, const std::string& path);

struct TranscriptCheck {
  bool accepted = false;
  std::optional<std::size_t> bad_record;  // 0-based line index
  std::string reason;
  std::size_t records = 0;
  Phase final_phase = Phase::kSetup;
  std::optional<Counts> result;
};

// Replays every transaction through a fresh board, re-verifying all proofs,
// shares and the tally, and compares receipts and the final state digest.
TranscriptCheck verify_transcript_text(const std::string& text);
TranscriptCheck verify_transcript(const std::string& path);

}  // namespace bbbvote

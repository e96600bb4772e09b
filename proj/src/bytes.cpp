#include "bbbvote/bytes.hpp"

#include <openssl/evp.h>

#include "bbbvote/errors.hpp"

namespace bbbvote {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrivacyPrecondition: return "privacy-precondition";
    case ErrorCode::kParameterOverflow: return "parameter-overflow";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kChoiceOutOfRange: return "choice-out-of-range";
    case ErrorCode::kSelfShare: return "self-share";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kDuplicateShare: return "duplicate-share";
    case ErrorCode::kUnexpectedShare: return "unexpected-share";
    case ErrorCode::kTallyInfeasible: return "tally-infeasible";
    case ErrorCode::kNonUniqueTally: return "non-unique-tally";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kMalformed, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kMalformed, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Bytes sha256(std::span<const std::uint8_t> data) {
  Bytes out(32);
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != 32) {
    throw std::runtime_error("EVP_Digest(sha256) failed");
  }
  return out;
}

void ByteWriter::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v >> 8));
  u8(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  u16(static_cast<std::uint16_t>(v >> 16));
  u16(static_cast<std::uint16_t>(v));
}

void ByteWriter::u64(std::uint64_t v) {
  u32(static_cast<std::uint32_t>(v >> 32));
  u32(static_cast<std::uint32_t>(v));
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::str(std::string_view s) {
  if (s.size() > 0xffff) throw Error(ErrorCode::kInvalidArgument, "string too long");
  u16(static_cast<std::uint16_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

void ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (remaining() < n) {
    throw Error(ErrorCode::kMalformed, "unexpected end of input");
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32() {
  std::uint32_t hi = u16();
  return (hi << 16) | u16();
}

std::uint64_t ByteReader::u64() {
  std::uint64_t hi = u32();
  return (hi << 32) | u32();
}

std::string ByteReader::str() {
  auto b = raw(u16());
  return std::string(b.begin(), b.end());
}

std::span<const std::uint8_t> ByteReader::blob() { return raw(u32()); }

void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorCode::kMalformed, "trailing bytes");
}

}  // namespace bbbvote

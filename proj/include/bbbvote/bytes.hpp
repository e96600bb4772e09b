#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bbbvote {

using Bytes = std::vector<std::uint8_t>;

// Lowercase hex; decoding rejects uppercase so that every encoding is unique.
std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

Bytes sha256(std::span<const std::uint8_t> data);

// Big-endian length-checked writer/reader used by every wire format in the
// library (proofs, shares, transaction payloads, state digests).
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(std::span<const std::uint8_t> data);
  void str(std::string_view s);  // u16 length prefix
  void blob(std::span<const std::uint8_t> data);  // u32 length prefix

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> raw(std::size_t n);
  std::string str();
  std::span<const std::uint8_t> blob();

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  // Throws kMalformed when trailing bytes remain.
  void expect_done() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace bbbvote

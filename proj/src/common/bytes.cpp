#include "ced/common/bytes.hpp"

#include <cstdio>

#include "ced/common/error.hpp"

namespace ced {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfOrderTimestamp: return "OutOfOrderTimestamp";
    case ErrorCode::kEmptyMemtable: return "EmptyMemtable";
    case ErrorCode::kStorageIo: return "StorageIoError";
    case ErrorCode::kCorruptChunk: return "CorruptChunk";
    case ErrorCode::kUnknownSeries: return "UnknownSeries";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kPlanError: return "PlanError";
    case ErrorCode::kIntraChunkOffset: return "IntraChunkOffset";
    case ErrorCode::kIndexKindMismatch: return "IndexKindMismatch";
    case ErrorCode::kGuardViolation: return "GuardViolation";
    case ErrorCode::kUnknownPath: return "UnknownPath";
    case ErrorCode::kSequenceGap: return "SequenceGap";
    case ErrorCode::kTransportDown: return "TransportDown";
    case ErrorCode::kLinkClosed: return "LinkClosed";
    case ErrorCode::kHandshakeTimeout: return "HandshakeTimeout";
    case ErrorCode::kChannelBroken: return "ChannelBroken";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kDecodeError: return "DecodeError";
  }
  return "Unknown";
}

void ByteWriter::str16(std::string_view s) {
  u16(static_cast<std::uint16_t>(s.size()));
  raw(s);
}

void ByteWriter::str32(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void ByteWriter::bytes32(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  raw(b);
}

void ByteWriter::patch_u32(std::size_t pos, std::uint32_t v) {
  for (std::size_t i = 0; i < 4; ++i) buf_[pos + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw CedError(ErrorCode::kDecodeError,
                   "need " + std::to_string(n) + " bytes at " + std::to_string(pos_) + ", have " +
                       std::to_string(data_.size() - pos_));
  }
}

std::string ByteReader::str16() {
  auto n = u16();
  auto s = raw(n);
  return {s.begin(), s.end()};
}

std::string ByteReader::str32() {
  auto n = u32();
  auto s = raw(n);
  return {s.begin(), s.end()};
}

Bytes ByteReader::bytes32() {
  auto n = u32();
  auto s = raw(n);
  return {s.begin(), s.end()};
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  need(n);
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

}  // namespace ced

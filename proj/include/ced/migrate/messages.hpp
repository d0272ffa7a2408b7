#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "ced/common/bytes.hpp"
#include "ced/netsim/link.hpp"
#include "ced/scanops/logical_index.hpp"
#include "ced/tsstore/tsblock.hpp"

namespace ced::migrate {

/// <address, port, FragmentID, SourceID, QueryID>
struct ChannelId {
  std::string address;
  std::uint16_t port = 0;
  std::int32_t fragment_id = 0;
  std::int32_t source_id = 0;
  std::uint64_t query_id = 0;

  std::string label() const;
  auto operator<=>(const ChannelId&) const = default;
  bool operator==(const ChannelId&) const = default;
};

enum class MsgType : std::uint8_t {
  kRequest = 1,     // edge -> cloud, step 1
  kConfirm = 2,     // cloud -> edge, step 2
  kReject = 3,      // cloud -> edge
  kDeltaState = 4,  // either way, step 3 / remigration
  kProbe = 5,       // edge -> cloud, header-only TsBlock
  kAck = 6,         // cloud -> edge
  kCredit = 7,      // edge -> cloud, flow control
  kData = 8,        // cloud -> edge, step 5
  kTerminate = 9,   // either way, step 6
  kStop = 10,       // edge -> cloud, asks for remigration
  kSnapshot = 11,   // edge -> cloud, cache sync payload
};

std::string_view msg_type_name(MsgType t);

enum class RequestKind : std::uint8_t { kFragment = 0, kFullQuery = 1 };
enum class TransmissionMode : std::uint8_t { kBlockStreaming = 0, kPredicatePushdown = 1 };
enum class TerminateReason : std::uint8_t { kCloudCompleted = 0, kRemigration = 1, kAbort = 2 };
enum class DeltaDirection : std::uint8_t { kEdgeToCloud = 0, kCloudToEdge = 1 };

std::string_view mode_name(TransmissionMode m);
std::string_view terminate_name(TerminateReason r);

struct Message {
  MsgType type = MsgType::kRequest;
  ChannelId channel;
  Bytes payload;
};

// Wire form: type:u8 | address_len:u16 | address | port:u16 | fragment:u32 |
//            source:u32 | query:u64 | payload_len:u32 | payload
Bytes encode_message(const Message& m);
Message decode_message(std::span<const std::uint8_t> bytes);
std::size_t header_size(const ChannelId& c);

/// Best-effort messages are exposed to loss injection; the rest model a reliable stream.
bool is_best_effort(MsgType t);

struct MigrationRequest {
  std::string sql;
  RequestKind kind = RequestKind::kFragment;
  TransmissionMode mode = TransmissionMode::kBlockStreaming;

  bool operator==(const MigrationRequest&) const = default;
};

/// Echo of the request identifiers; address and port are implied.
struct Confirmation {
  std::int32_t fragment_id = 0;
  std::int32_t source_id = 0;
  std::uint64_t query_id = 0;

  bool operator==(const Confirmation&) const = default;
};

struct DeltaState {
  DeltaDirection direction = DeltaDirection::kEdgeToCloud;
  std::string sql;
  scanops::LogicalIndex index;

  bool operator==(const DeltaState&) const = default;
};

struct DataPayload {
  tsstore::TsBlock block;
  scanops::LogicalIndex index_after;
};

// Payload codecs (each payload is the message body after the header).
Bytes encode(const MigrationRequest& r);
Bytes encode(const Confirmation& c);
Bytes encode_reject(const std::string& reason);
Bytes encode(const DeltaState& d);
Bytes encode_probe(const std::string& series);
Bytes encode(const DataPayload& d);
Bytes encode_credit(std::uint32_t n);
Bytes encode(TerminateReason r);

MigrationRequest decode_request(std::span<const std::uint8_t> p);
Confirmation decode_confirm(std::span<const std::uint8_t> p);
std::string decode_reject(std::span<const std::uint8_t> p);
DeltaState decode_delta(std::span<const std::uint8_t> p);
tsstore::TsBlock decode_probe(std::span<const std::uint8_t> p);
DataPayload decode_data(std::span<const std::uint8_t> p);
std::uint32_t decode_credit(std::span<const std::uint8_t> p);
TerminateReason decode_terminate(std::span<const std::uint8_t> p);

}  // namespace ced::migrate

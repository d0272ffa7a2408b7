#include "ced/migrate/messages.hpp"

#include "ced/common/error.hpp"

namespace ced::migrate {

std::string ChannelId::label() const {
  return address + ":" + std::to_string(port) + "/q" + std::to_string(query_id) + "/f" + std::to_string(fragment_id) +
         "/s" + std::to_string(source_id);
}

std::string_view msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::kRequest: return "request";
    case MsgType::kConfirm: return "confirm";
    case MsgType::kReject: return "reject";
    case MsgType::kDeltaState: return "delta";
    case MsgType::kProbe: return "probe";
    case MsgType::kAck: return "ack";
    case MsgType::kCredit: return "credit";
    case MsgType::kData: return "data";
    case MsgType::kTerminate: return "terminate";
    case MsgType::kStop: return "stop";
    case MsgType::kSnapshot: return "snapshot";
  }
  return "?";
}

std::string_view mode_name(TransmissionMode m) {
  return m == TransmissionMode::kPredicatePushdown ? "pushdown" : "streaming";
}

std::string_view terminate_name(TerminateReason r) {
  switch (r) {
    case TerminateReason::kCloudCompleted: return "completed";
    case TerminateReason::kRemigration: return "remigration";
    case TerminateReason::kAbort: return "abort";
  }
  return "?";
}

bool is_best_effort(MsgType t) { return t == MsgType::kProbe || t == MsgType::kAck; }

namespace {

void encode_channel(ByteWriter& w, const ChannelId& c) {
  w.str16(c.address);
  w.u16(c.port);
  w.u32(static_cast<std::uint32_t>(c.fragment_id));
  w.u32(static_cast<std::uint32_t>(c.source_id));
  w.u64(c.query_id);
}

ChannelId decode_channel(ByteReader& r) {
  ChannelId c;
  c.address = r.str16();
  c.port = r.u16();
  c.fragment_id = static_cast<std::int32_t>(r.u32());
  c.source_id = static_cast<std::int32_t>(r.u32());
  c.query_id = r.u64();
  return c;
}

template <typename F>
auto decode_whole(std::span<const std::uint8_t> p, F f) {
  ByteReader r(p);
  auto v = f(r);
  if (!r.done()) throw CedError(ErrorCode::kDecodeError, "trailing bytes in payload");
  return v;
}

}  // namespace

std::size_t header_size(const ChannelId& c) { return 1 + 2 + c.address.size() + 2 + 4 + 4 + 8 + 4; }

Bytes encode_message(const Message& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m.type));
  encode_channel(w, m.channel);
  w.bytes32(m.payload);
  return std::move(w).take();
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  return decode_whole(bytes, [](ByteReader& r) {
    Message m;
    auto t = r.u8();
    if (t < 1 || t > 11) throw CedError(ErrorCode::kDecodeError, "unknown message type " + std::to_string(t));
    m.type = static_cast<MsgType>(t);
    m.channel = decode_channel(r);
    m.payload = r.bytes32();
    return m;
  });
}

Bytes encode(const MigrationRequest& q) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(q.kind));
  w.u8(static_cast<std::uint8_t>(q.mode));
  w.str32(q.sql);
  return std::move(w).take();
}

MigrationRequest decode_request(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) {
    MigrationRequest q;
    auto kind = r.u8();
    auto mode = r.u8();
    if (kind > 1 || mode > 1) throw CedError(ErrorCode::kDecodeError, "bad request flags");
    q.kind = static_cast<RequestKind>(kind);
    q.mode = static_cast<TransmissionMode>(mode);
    q.sql = r.str32();
    return q;
  });
}

Bytes encode(const Confirmation& c) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(c.fragment_id));
  w.u32(static_cast<std::uint32_t>(c.source_id));
  w.u64(c.query_id);
  return std::move(w).take();
}

Confirmation decode_confirm(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) {
    Confirmation c;
    c.fragment_id = static_cast<std::int32_t>(r.u32());
    c.source_id = static_cast<std::int32_t>(r.u32());
    c.query_id = r.u64();
    return c;
  });
}

Bytes encode_reject(const std::string& reason) {
  ByteWriter w;
  w.str16(reason.substr(0, 0xffff));
  return std::move(w).take();
}

std::string decode_reject(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) { return r.str16(); });
}

Bytes encode(const DeltaState& d) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(d.direction));
  w.str32(d.sql);
  scanops::encode_index(w, d.index);
  return std::move(w).take();
}

DeltaState decode_delta(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) {
    DeltaState d;
    auto dir = r.u8();
    if (dir > 1) throw CedError(ErrorCode::kDecodeError, "bad delta direction");
    d.direction = static_cast<DeltaDirection>(dir);
    d.sql = r.str32();
    d.index = scanops::decode_index(r);
    return d;
  });
}

Bytes encode_probe(const std::string& series) {
  ByteWriter w;
  tsstore::encode_block(w, tsstore::TsBlock::header(series));
  return std::move(w).take();
}

tsstore::TsBlock decode_probe(std::span<const std::uint8_t> p) {
  auto b = decode_whole(p, [](ByteReader& r) { return tsstore::decode_block(r); });
  if (!b.header_only || b.row_count() != 0) throw CedError(ErrorCode::kProtocolViolation, "probe carries rows");
  return b;
}

Bytes encode(const DataPayload& d) {
  ByteWriter w;
  scanops::encode_index(w, d.index_after);
  tsstore::encode_block(w, d.block);
  return std::move(w).take();
}

DataPayload decode_data(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) {
    DataPayload d;
    d.index_after = scanops::decode_index(r);
    d.block = tsstore::decode_block(r);
    return d;
  });
}

Bytes encode_credit(std::uint32_t n) {
  ByteWriter w;
  w.u32(n);
  return std::move(w).take();
}

std::uint32_t decode_credit(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) { return r.u32(); });
}

Bytes encode(TerminateReason reason) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(reason));
  return std::move(w).take();
}

TerminateReason decode_terminate(std::span<const std::uint8_t> p) {
  return decode_whole(p, [](ByteReader& r) {
    auto v = r.u8();
    if (v > 2) throw CedError(ErrorCode::kDecodeError, "bad terminate reason");
    return static_cast<TerminateReason>(v);
  });
}

}  // namespace ced::migrate

#include "ced/migrate/channel.hpp"

#include "ced/common/error.hpp"

namespace ced::migrate {

void ProtocolConfig::validate() const {
  if (probe_retries < 0) throw CedError(ErrorCode::kInvalidConfig, "probe_retries must be >= 0");
  if (probe_timeout_factor <= 0) throw CedError(ErrorCode::kInvalidConfig, "probe_timeout_factor must be > 0");
  if (credit_depth == 0) throw CedError(ErrorCode::kInvalidConfig, "credit_depth must be > 0");
}

namespace {
bool has_filter(const queryplan::OperatorNode& n) {
  if (n.kind == queryplan::OpKind::kFilter) return true;
  for (const auto& c : n.children)
    if (has_filter(c)) return true;
  return false;
}
}  // namespace

TransmissionMode select_transmission_mode(const queryplan::OperatorNode& plan) {
  return has_filter(plan) ? TransmissionMode::kPredicatePushdown : TransmissionMode::kBlockStreaming;
}

std::string_view phase_name(ChannelPhase p) {
  switch (p) {
    case ChannelPhase::kRequested: return "requested";
    case ChannelPhase::kConfirmed: return "confirmed";
    case ChannelPhase::kProbing: return "probing";
    case ChannelPhase::kStreaming: return "streaming";
    case ChannelPhase::kClosed: return "closed";
  }
  return "?";
}

EdgeChannel::EdgeChannel(ChannelId id, std::string series, scanops::LogicalIndex::Kind kind)
    : id_(std::move(id)), series_(std::move(series)), resume_{kind, 0} {
  switch_index = {kind, 0};
}

bool EdgeChannel::accept(DataPayload&& d) {
  if (!series_.empty() && d.block.series != series_) return false;
  queue_.push_back(std::move(d));
  return true;
}

void EdgeChannel::resume_at(scanops::LogicalIndex idx) {
  resume_ = idx;
  end_ = End::kResume;
}

void EdgeChannel::fail() {
  auto idx = switch_index;
  // Blocks already queued will still be consumed; the last one bounds the restart.
  if (!queue_.empty()) {
    if (queue_.back().index_after.value > idx.value) idx = queue_.back().index_after;
  } else if (last_after_ && last_after_->value > idx.value) {
    idx = *last_after_;
  }
  resume_at(idx);
}

scanops::RemoteBlockSource::Pull EdgeChannel::pull() {
  if (!queue_.empty()) {
    auto d = std::move(queue_.front());
    queue_.pop_front();
    last_after_ = d.index_after;
    ++consumed_;
    if (on_consume_) on_consume_();
    return {Pull::Kind::kBlock, std::move(d.block), d.index_after};
  }
  switch (end_) {
    case End::kNone:
      return {Pull::Kind::kPending, {}, {}};
    case End::kFinished:
      finished_ = true;
      phase = ChannelPhase::kClosed;
      return {Pull::Kind::kFinished, {}, {}};
    case End::kResume:
      finished_ = true;
      phase = ChannelPhase::kClosed;
      return {Pull::Kind::kResumeLocal, {}, resume_};
  }
  return {};
}

}  // namespace ced::migrate

#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "ced/migrate/messages.hpp"
#include "ced/queryplan/plan.hpp"
#include "ced/scanops/operator.hpp"

namespace ced::migrate {

inline constexpr std::int32_t kFullQuerySource = 0;

struct ProtocolConfig {
  int probe_retries = 3;
  double probe_timeout_factor = 2.0;  // x (RTT + queued serialization)
  std::uint32_t credit_depth = 4;

  void validate() const;
};

/// Pushdown when some Filter sits above the scans; plain block streaming otherwise.
TransmissionMode select_transmission_mode(const queryplan::OperatorNode& plan);

enum class ChannelPhase : std::uint8_t { kRequested, kConfirmed, kProbing, kStreaming, kClosed };
std::string_view phase_name(ChannelPhase p);

/// Edge end of a migration channel. The paused scan pulls from it; the node
/// feeds it with protocol events.
class EdgeChannel final : public scanops::RemoteBlockSource {
 public:
  EdgeChannel(ChannelId id, std::string series, scanops::LogicalIndex::Kind kind);

  Pull pull() override;
  bool finished() const override { return finished_; }

  /// Called after every block handed to the scan.
  void set_on_consume(std::function<void()> f) { on_consume_ = std::move(f); }

  /// Returns false for a block addressed to another series (it is dropped).
  bool accept(DataPayload&& d);
  /// The cloud finished its part; anything queued is still delivered first.
  void complete() { end_ = End::kFinished; }
  /// Return to local reading at `idx` after the queue drains.
  void resume_at(scanops::LogicalIndex idx);
  /// Link failure or handshake failure: resume after the last block consumed.
  void fail();

  const ChannelId& id() const { return id_; }
  const std::string& series() const { return series_; }
  ChannelPhase phase = ChannelPhase::kRequested;
  scanops::LogicalIndex switch_index;
  int probe_attempt = 0;
  bool cancel_on_confirm = false;
  bool stop_sent = false;
  std::size_t queued() const { return queue_.size(); }
  std::uint64_t blocks_consumed() const { return consumed_; }

 private:
  enum class End : std::uint8_t { kNone, kFinished, kResume };

  ChannelId id_;
  std::string series_;
  std::deque<DataPayload> queue_;
  std::function<void()> on_consume_;
  std::optional<scanops::LogicalIndex> last_after_;
  scanops::LogicalIndex resume_;
  End end_ = End::kNone;
  bool finished_ = false;
  std::uint64_t consumed_ = 0;
};

}  // namespace ced::migrate

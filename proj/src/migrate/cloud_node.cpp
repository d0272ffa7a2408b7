#include "ced/migrate/cloud_node.hpp"

#include <deque>

#include "ced/common/error.hpp"

namespace ced::migrate {

using scanops::LogicalIndex;

namespace {

/// Installed on a cloud scan being handed back: ends it at the pause boundary.
class EndOfStream final : public scanops::RemoteBlockSource {
 public:
  Pull pull() override { return {Pull::Kind::kFinished, {}, {}}; }
  bool finished() const override { return true; }
};

}  // namespace

struct CloudNode::Session {
  enum class State : std::uint8_t { kPlanning, kConfirmed, kReady, kStreaming, kDone };

  ChannelId id;
  MigrationRequest req;
  State state = State::kPlanning;
  queryplan::OperatorNode plan;
  scanops::OperatorPtr root;
  scanops::CollaborativeScan* scan = nullptr;
  LogicalIndex resume;
  std::unique_ptr<Task> task;
  std::uint32_t credits = 0;
  std::deque<tsstore::TsBlock> held;
  bool stopping = false;
  std::optional<LogicalIndex> stop_index;
};

CloudNode::CloudNode(netsim::EventLoop& loop, netsim::Link& link, coherence::CloudCache& cache,
                     const queryplan::Catalog& catalog, SeqSource published_seq, CloudConfig config)
    : loop_(loop),
      link_(link),
      cache_(cache),
      catalog_(catalog),
      published_seq_(std::move(published_seq)),
      config_(std::move(config)),
      disk_(loop, config_.cache_read_mb_s),
      cpu_(loop, config_.cores) {
  link_.on_close([this] {
    for (auto& [id, s] : sessions_) {
      if (s->state == Session::State::kDone) continue;
      if (s->task) s->task->cancel();
      s->state = Session::State::kDone;
      ++stats_.aborted;
    }
  });
}

CloudNode::~CloudNode() = default;

bool CloudNode::send(MsgType t, const ChannelId& id, Bytes payload) {
  if (!link_.is_open()) return false;
  netsim::Envelope env;
  env.channel = id.label();
  env.dir = netsim::Direction::kCloudToEdge;
  env.best_effort = is_best_effort(t);
  env.payload = encode_message({t, id, std::move(payload)});
  try {
    link_.send(std::move(env));
  } catch (const CedError& e) {
    if (e.code() == ErrorCode::kLinkClosed) return false;
    throw;
  }
  return true;
}

std::size_t CloudNode::active_sessions() const {
  std::size_t n = 0;
  for (const auto& [id, s] : sessions_)
    if (s->state != Session::State::kDone) ++n;
  return n;
}

void CloudNode::on_message(Message&& m) {
  auto it = sessions_.find(m.channel);
  Session* s = it == sessions_.end() ? nullptr : it->second.get();

  if (m.type == MsgType::kRequest) {
    auto req = decode_request(m.payload);
    if (s && s->state != Session::State::kDone) {
      if (s->state == Session::State::kConfirmed) {
        send(MsgType::kConfirm, s->id, encode(Confirmation{s->id.fragment_id, s->id.source_id, s->id.query_id}));
      }
      return;
    }
    if (s) retired_.push_back(std::move(it->second));
    auto fresh = std::make_unique<Session>();
    fresh->id = m.channel;
    fresh->req = req;
    sessions_[m.channel] = std::move(fresh);
    ++stats_.sessions;
    loop_.after(netsim::from_ms(config_.planning_ms), [this, id = m.channel, req] { plan_request(id, req); });
    return;
  }
  if (!s || s->state == Session::State::kDone) {
    // Late traffic for a finished session (credits, duplicate probes).
    if (m.type != MsgType::kCredit && m.type != MsgType::kProbe && m.type != MsgType::kTerminate &&
        m.type != MsgType::kStop) {
      ++stats_.protocol_errors;
    }
    return;
  }

  switch (m.type) {
    case MsgType::kDeltaState: {
      auto d = decode_delta(m.payload);
      if (s->state != Session::State::kConfirmed || d.direction != DeltaDirection::kEdgeToCloud) {
        ++stats_.protocol_errors;
        return;
      }
      start_fragment(*s, d);
      return;
    }
    case MsgType::kProbe:
      if (s->state == Session::State::kReady || s->state == Session::State::kStreaming) {
        send(MsgType::kAck, s->id, {});
      }
      return;
    case MsgType::kCredit:
      if (s->state != Session::State::kReady && s->state != Session::State::kStreaming) return;
      s->credits += decode_credit(m.payload);
      if (s->state == Session::State::kReady) {
        s->state = Session::State::kStreaming;
        s->task->start();
      }
      flush_held(*s);
      return;
    case MsgType::kStop:
      if (s->state == Session::State::kReady) {
        // Nothing read yet: hand back the switch position unchanged.
        s->stop_index = s->resume;
        finish(*s);
      } else if (s->state == Session::State::kStreaming) {
        begin_stop(*s);
      }
      return;
    case MsgType::kTerminate:
      if (s->task) s->task->cancel();
      s->held.clear();
      s->state = Session::State::kDone;
      ++stats_.aborted;
      return;
    default:
      ++stats_.protocol_errors;
      return;
  }
}

void CloudNode::plan_request(const ChannelId& id, MigrationRequest req) {
  auto it = sessions_.find(id);
  if (it == sessions_.end() || it->second->state != Session::State::kPlanning) return;
  auto& s = *it->second;
  auto reject = [&](const std::string& why) {
    s.state = Session::State::kDone;
    ++stats_.rejects;
    send(MsgType::kReject, id, encode_reject(why));
  };
  try {
    s.plan = queryplan::plan(queryplan::parse(req.sql), catalog_);
  } catch (const CedError& e) {
    reject(e.what());
    return;
  }
  std::vector<const queryplan::OperatorNode*> leaves;
  if (req.kind == RequestKind::kFragment) {
    const auto* leaf = queryplan::find_source(s.plan, id.source_id);
    if (!leaf || !leaf->is_scan()) {
      reject("no scan with source " + std::to_string(id.source_id));
      return;
    }
    leaves.push_back(leaf);
  } else {
    leaves = queryplan::scan_leaves(s.plan);
  }
  for (const auto* leaf : leaves) {
    auto path = tsstore::SeriesPath::parse(leaf->series);
    if (!cache_.lookup(path, published_seq_(path))) {
      reject("cache miss for " + leaf->series);
      return;
    }
  }
  s.state = Session::State::kConfirmed;
  ++stats_.confirms;
  channel_map_[ChannelId{config_.address, config_.port, id.fragment_id, id.source_id, id.query_id}] = id;
  send(MsgType::kConfirm, id, encode(Confirmation{id.fragment_id, id.source_id, id.query_id}));
}

void CloudNode::start_fragment(Session& s, const DeltaState& d) {
  s.resume = d.index;
  try {
    if (s.req.kind == RequestKind::kFragment) {
      auto frag = scanops::build_fragment(s.plan, s.id.source_id, cache_.store(), d.index,
                                          s.req.mode == TransmissionMode::kPredicatePushdown);
      s.root = std::move(frag.root);
      s.scan = frag.scan;
    } else {
      auto built = scanops::build(s.plan, cache_.store());
      s.root = std::move(built.root);
    }
  } catch (const CedError&) {
    s.state = Session::State::kDone;
    ++stats_.aborted;
    send(MsgType::kTerminate, s.id, encode(TerminateReason::kAbort));
    return;
  }
  s.task = std::make_unique<Task>(
      loop_, disk_, cpu_, config_.cost, *s.root, [this, &s](tsstore::TsBlock&& b) { return emit(s, std::move(b)); },
      [this, &s] { finish(s); });
  s.task->set_serialize_output(true);
  s.state = Session::State::kReady;
  if (forced_rows_ && s.scan) arm_forced_stop(s);
}

void CloudNode::begin_stop(Session& s) {
  if (s.stopping || !s.scan) return;
  s.stopping = true;
  s.scan->request_pause([&s](const LogicalIndex& idx) {
    s.stop_index = idx;
    return std::make_shared<EndOfStream>();
  });
  if (s.held.empty()) s.task->wake();
}

void CloudNode::arm_forced_stop(Session& s) {
  s.scan->request_pause([this, &s](const LogicalIndex& idx) -> std::shared_ptr<scanops::RemoteBlockSource> {
    if (s.scan->progress_rows() < *forced_rows_) {
      arm_forced_stop(s);
      return nullptr;
    }
    s.stopping = true;
    s.stop_index = idx;
    return std::make_shared<EndOfStream>();
  });
}

Task::Verdict CloudNode::emit(Session& s, tsstore::TsBlock&& b) {
  s.held.push_back(std::move(b));
  flush_held(s);
  return s.held.empty() ? Task::Verdict::kContinue : Task::Verdict::kPark;
}

void CloudNode::flush_held(Session& s) {
  while (s.credits > 0 && !s.held.empty()) {
    DataPayload d{std::move(s.held.front()), s.scan ? s.scan->logical_index() : LogicalIndex::row_offset(0)};
    s.held.pop_front();
    --s.credits;
    ++stats_.blocks_sent;
    stats_.rows_sent += d.block.row_count();
    send(MsgType::kData, s.id, encode(d));
  }
  if (s.held.empty() && s.task && s.task->parked()) s.task->wake();
}

void CloudNode::finish(Session& s) {
  if (s.state == Session::State::kDone) return;
  s.state = Session::State::kDone;
  if (s.stop_index) {
    ++stats_.remigrations;
    send(MsgType::kDeltaState, s.id, encode(DeltaState{DeltaDirection::kCloudToEdge, s.req.sql, *s.stop_index}));
    send(MsgType::kTerminate, s.id, encode(TerminateReason::kRemigration));
  } else {
    send(MsgType::kTerminate, s.id, encode(TerminateReason::kCloudCompleted));
  }
}

}  // namespace ced::migrate

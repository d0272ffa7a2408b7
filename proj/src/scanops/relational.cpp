#include "ced/scanops/relational.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::scanops {

using tsstore::TsBlock;

NextResult Filter::next(ExecCounters& c) {
  auto r = child_->next(c);
  if (r.status != NextResult::Status::kBlock) return r;
  const auto& in = r.block;
  if (column_ >= in.column_count()) throw CedError(ErrorCode::kPlanError, "filter column out of range");
  (pred_.is_text() ? c.rows_filtered_text : c.rows_filtered_numeric) += in.row_count();

  TsBlock out;
  out.series = in.series;
  out.columns.resize(in.column_count());
  const auto& key = in.columns[column_];
  for (std::size_t i = 0; i < in.row_count(); ++i) {
    if (!pred_.matches(key[i])) continue;
    out.timestamps.push_back(in.timestamps[i]);
    for (std::size_t k = 0; k < in.column_count(); ++k) out.columns[k].push_back(in.columns[k][i]);
  }
  if (out.empty()) return NextResult::yield();
  return NextResult::of(std::move(out));
}

NextResult Project::next(ExecCounters& c) {
  auto r = child_->next(c);
  if (r.status != NextResult::Status::kBlock) return r;
  TsBlock out;
  out.series = r.block.series;
  out.timestamps = std::move(r.block.timestamps);
  for (auto k : keep_) {
    if (k >= r.block.column_count()) throw CedError(ErrorCode::kPlanError, "project column out of range");
    out.columns.push_back(r.block.columns[k]);
  }
  c.rows_projected += out.row_count();
  return NextResult::of(std::move(out));
}

Merge::Merge(std::vector<OperatorPtr> children, std::string name) : name_(std::move(name)) {
  for (auto& ch : children) inputs_.push_back({std::move(ch), {}, 0, false});
  out_.series = name_;
  out_.columns.resize(inputs_.size());
}

bool Merge::has_next() const {
  if (!out_.empty()) return true;
  return std::any_of(inputs_.begin(), inputs_.end(), [](const Input& in) { return in.has_rows() || !in.done; });
}

TsBlock Merge::take_output() {
  TsBlock b = std::move(out_);
  out_ = TsBlock{};
  out_.series = name_;
  out_.columns.resize(inputs_.size());
  return b;
}

// Emits aligned rows while every live input has a buffered head. Returns true
// when the output block is full.
bool Merge::drain() {
  for (;;) {
    bool any = false;
    tsstore::Timestamp t = 0;
    for (const auto& in : inputs_) {
      if (in.has_rows()) {
        auto ts = in.block.timestamps[in.pos];
        if (!any || ts < t) t = ts;
        any = true;
      } else if (!in.done) {
        return false;
      }
    }
    if (!any) return false;
    out_.timestamps.push_back(t);
    for (std::size_t k = 0; k < inputs_.size(); ++k) {
      auto& in = inputs_[k];
      if (in.has_rows() && in.block.timestamps[in.pos] == t) {
        out_.columns[k].push_back(in.block.columns.at(0)[in.pos]);
        ++in.pos;
      } else {
        out_.columns[k].emplace_back();
      }
    }
    if (out_.row_count() == tsstore::kBlockCapacity) return true;
  }
}

NextResult Merge::next(ExecCounters& c) {
  for (auto& in : inputs_) {
    if (in.done || in.has_rows()) continue;
    auto r = in.op->next(c);
    if (r.status == NextResult::Status::kPending) return r;
    if (r.status == NextResult::Status::kDone) {
      in.done = true;
      continue;
    }
    if (r.status == NextResult::Status::kBlock) {
      in.block = std::move(r.block);
      in.pos = 0;
    }
    break;
  }
  auto before = out_.row_count();
  bool full = drain();
  c.rows_merged += out_.row_count() - before;
  if (full) return NextResult::of(take_output());
  bool all_done = std::all_of(inputs_.begin(), inputs_.end(), [](const Input& in) { return in.done && !in.has_rows(); });
  if (all_done) return out_.empty() ? NextResult::done() : NextResult::of(take_output());
  return NextResult::yield();
}

}  // namespace ced::scanops

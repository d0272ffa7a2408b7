#pragma once

#include <vector>

#include "ced/queryplan/query.hpp"
#include "ced/scanops/operator.hpp"

namespace ced::scanops {

/// Keeps rows whose `column` satisfies the predicate. One child block per call.
class Filter final : public Operator {
 public:
  Filter(OperatorPtr child, queryplan::Predicate pred, std::uint32_t column = 0)
      : child_(std::move(child)), pred_(std::move(pred)), column_(column) {}

  NextResult next(ExecCounters& c) override;
  bool has_next() const override { return child_->has_next(); }

 private:
  OperatorPtr child_;
  queryplan::Predicate pred_;
  std::uint32_t column_;
};

class Project final : public Operator {
 public:
  Project(OperatorPtr child, std::vector<std::uint32_t> keep) : child_(std::move(child)), keep_(std::move(keep)) {}

  NextResult next(ExecCounters& c) override;
  bool has_next() const override { return child_->has_next(); }

 private:
  OperatorPtr child_;
  std::vector<std::uint32_t> keep_;
};

/// Full outer alignment of single-column streams on timestamp; missing cells
/// are null. Pulls from one child per call and emits 1000-row blocks (the
/// remainder when every child is done).
class Merge final : public Operator {
 public:
  Merge(std::vector<OperatorPtr> children, std::string name = "merge");

  NextResult next(ExecCounters& c) override;
  bool has_next() const override;

 private:
  struct Input {
    OperatorPtr op;
    tsstore::TsBlock block;
    std::size_t pos = 0;
    bool done = false;
    bool has_rows() const { return pos < block.row_count(); }
  };

  bool drain();
  tsstore::TsBlock take_output();

  std::vector<Input> inputs_;
  std::string name_;
  tsstore::TsBlock out_;
};

}  // namespace ced::scanops

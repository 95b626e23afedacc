#pragma once

#include <string>
#include <vector>

#include "adw/sql/ast.hpp"

namespace adw {

/// One benchmark query.
struct WorkloadQuery {
  std::string id;   ///< q1 ... q50
  int number = 0;   ///< 1 ... 50
  int group = 0;    ///< 1 ... 10
  std::string sql;
  bool representative = false;  ///< one of the ten per-group reference queries
  std::string note;             ///< reconstruction remark, if any
};

/// The command row a group's queries must use, in canonical order.
std::vector<sql::Command> group_commands(int group);

/// Fifty fixed queries, five per group, ordered by number.
const std::vector<WorkloadQuery>& builtin_workload();

/// Decision-support queries over the warehouse.
struct CorpusQuery {
  std::string name;  ///< example1 ... example4
  std::string sql;
  std::string description;
};

const std::vector<CorpusQuery>& decision_examples();

/// The ten representative queries (q5, q10, ..., q50) followed by the four examples.
std::vector<std::pair<std::string, std::string>> corpus_queries();

}  // namespace adw

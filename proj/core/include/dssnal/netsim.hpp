#pragma once

#include <Eigen/Core>
#include <functional>

#include "dssnal/graph.hpp"

namespace dssnal {

/// Monotone communication counters. One round is one barrier-synchronized
/// neighbor exchange; vectors_sent counts per-direction payloads; reduce_ops
/// counts global reductions and monitor gathers, kept apart from gossip
/// traffic so reported costs separate algorithm rounds from bookkeeping.
struct CommLedger {
  long rounds = 0;
  long vectors_sent = 0;
  long reduce_ops = 0;
};

/// Read-only view of the payloads agent i received in the current round:
/// exactly one entry per neighbor, nothing else. Reading a non-neighbor is
/// an error, which is what keeps agent programs structurally local.
class Inbox {
 public:
  Inbox(const std::vector<int>& neighbors, const std::vector<Eigen::VectorXd>& payloads)
      : neighbors_(neighbors), payloads_(payloads) {}

  const Eigen::VectorXd& at(int neighbor) const;
  bool contains(int neighbor) const;
  size_t size() const { return neighbors_.size(); }
  const std::vector<int>& neighbors() const { return neighbors_; }

 private:
  const std::vector<int>& neighbors_;
  const std::vector<Eigen::VectorXd>& payloads_;
};

enum class ExecMode { sequential, parallel };

/// Deterministic synchronous-round message passing over a fixed graph.
/// A round has two phases separated by a barrier: every agent publishes one
/// payload, then every agent consumes its neighbors' payloads. Within a
/// phase agents may run in parallel; both modes produce bit-identical
/// results because each agent touches only its own state and reductions are
/// summed in fixed agent order.
class SyncNetwork {
 public:
  explicit SyncNetwork(const Graph& g, ExecMode mode = ExecMode::sequential);

  int agent_count() const { return graph_.m; }
  const Graph& graph() const { return graph_; }
  ExecMode mode() const { return mode_; }
  void set_mode(ExecMode mode) { mode_ = mode; }

  /// One billed round: payload_of(i) publishes agent i's payload, then
  /// consume(i, inbox) runs with exactly the neighbor payloads of i.
  /// All payloads must share one dimension.
  void exchange(const std::function<Eigen::VectorXd(int)>& payload_of,
                const std::function<void(int, const Inbox&)>& consume);

  /// Global sum of per-agent scalars, accumulated in agent-index order so
  /// reruns are bit-identical; every agent observes the same value.
  double reduce_sum(const std::function<double(int)>& local_of);

  /// Bills one centralized monitor gather (convergence residuals, traces).
  void bill_monitor_gather() { ++ledger_.reduce_ops; }

  CommLedger& ledger() { return ledger_; }
  const CommLedger& ledger() const { return ledger_; }

 private:
  void for_each_agent(const std::function<void(int)>& fn);

  Graph graph_;
  ExecMode mode_;
  CommLedger ledger_;
  std::vector<std::vector<Eigen::VectorXd>> inboxes_;  // aligned with neighbor lists
};

struct RoundRunResult {
  int rounds_run = 0;
  bool capped = false;
};

/// Barrier-synchronized driver: runs program(j) for j = 0, 1, ... until the
/// predicate holds, flagging (not throwing) when the cap trips.
RoundRunResult run_rounds(const std::function<void(int)>& program, const std::function<bool()>& until,
                          int cap);

}  // namespace dssnal

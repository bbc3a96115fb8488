#include "dssnal/netsim.hpp"

#include <algorithm>
#include <thread>

namespace dssnal {

const Eigen::VectorXd& Inbox::at(int neighbor) const {
  auto it = std::lower_bound(neighbors_.begin(), neighbors_.end(), neighbor);
  if (it == neighbors_.end() || *it != neighbor)
    throw IncompleteExchangeError("no payload from agent " + std::to_string(neighbor) +
                                  " in this round's inbox");
  return payloads_[static_cast<size_t>(it - neighbors_.begin())];
}

bool Inbox::contains(int neighbor) const {
  return std::binary_search(neighbors_.begin(), neighbors_.end(), neighbor);
}

SyncNetwork::SyncNetwork(const Graph& g, ExecMode mode) : graph_(g), mode_(mode) {
  inboxes_.resize(static_cast<size_t>(graph_.m));
  for (int i = 0; i < graph_.m; ++i)
    inboxes_[static_cast<size_t>(i)].resize(graph_.neighbors[static_cast<size_t>(i)].size());
}

void SyncNetwork::for_each_agent(const std::function<void(int)>& fn) {
  if (mode_ == ExecMode::sequential || graph_.m == 1) {
    for (int i = 0; i < graph_.m; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(graph_.m));
  for (int i = 0; i < graph_.m; ++i) workers.emplace_back(fn, i);
  for (auto& w : workers) w.join();
}

void SyncNetwork::exchange(const std::function<Eigen::VectorXd(int)>& payload_of,
                           const std::function<void(int, const Inbox&)>& consume) {
  const int m = graph_.m;
  std::vector<Eigen::VectorXd> published(static_cast<size_t>(m));

  // Phase 1: every agent publishes. Barrier.
  for_each_agent([&](int i) { published[static_cast<size_t>(i)] = payload_of(i); });

  const Eigen::Index dim = published.front().size();
  for (const auto& p : published)
    if (p.size() != dim) throw ProtocolError("payload dimension mismatch in exchange");

  // Delivery: agent i's inbox gets exactly its neighbors' payloads.
  for (int i = 0; i < m; ++i) {
    const auto& nbrs = graph_.neighbors[static_cast<size_t>(i)];
    auto& box = inboxes_[static_cast<size_t>(i)];
    for (size_t s = 0; s < nbrs.size(); ++s) box[s] = published[static_cast<size_t>(nbrs[s])];
  }

  ++ledger_.rounds;
  ledger_.vectors_sent += 2 * static_cast<long>(graph_.edges.size());

  // Phase 2: every agent consumes. Barrier.
  for_each_agent([&](int i) {
    Inbox inbox(graph_.neighbors[static_cast<size_t>(i)], inboxes_[static_cast<size_t>(i)]);
    consume(i, inbox);
  });
}

double SyncNetwork::reduce_sum(const std::function<double(int)>& local_of) {
  double total = 0.0;
  for (int i = 0; i < graph_.m; ++i) total += local_of(i);
  ++ledger_.reduce_ops;
  return total;
}

RoundRunResult run_rounds(const std::function<void(int)>& program, const std::function<bool()>& until,
                          int cap) {
  RoundRunResult result;
  for (int j = 0; j < cap; ++j) {
    program(j);
    ++result.rounds_run;
    if (until()) return result;
  }
  result.capped = !until();
  return result;
}

}  // namespace dssnal

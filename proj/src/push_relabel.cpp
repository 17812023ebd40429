#include <algorithm>

#include "lgo/error.hpp"
#include "lgo/mincut.hpp"

namespace lgo {

// Two phases. The first pushes excess toward the sink until no active node
// can reach it: a maximum preflow. The second returns the stranded excess
// along reverse residual paths to the source arcs it came from, leaving a
// flow whose residual graph gives both extreme cuts.

void FlowNetwork::run_push_relabel() {
  const std::size_t n = node_.size();
  excess_.assign(n, 0);
  source_flow_.assign(n, 0);
  label_.assign(n, 0);
  current_arc_.assign(n, -1);
  buckets_.assign(n + 2, {});
  for (std::size_t v = 0; v < n; ++v) {
    if (node_[v].terminal > 0) {
      excess_[v] = node_[v].terminal;
      source_flow_[v] = node_[v].terminal;
      node_[v].terminal = 0;
    }
  }
  // Exact distances never exceed n, so n + 1 marks nodes that cannot reach
  // the current target.
  const int dormant = static_cast<int>(n) + 1;
  const std::int64_t relabel_period = 6 * static_cast<std::int64_t>(n) +
                                      static_cast<std::int64_t>(arcs_.size());
  for (bool to_source : {false, true}) {
    global_relabel(to_source);
    while (true) {
      while (max_active_ > 0 && buckets_[max_active_].empty()) --max_active_;
      if (max_active_ == 0) break;
      const int v = buckets_[max_active_].back();
      buckets_[max_active_].pop_back();
      if (excess_[v] == 0 || label_[v] != max_active_) continue;
      discharge(v, to_source);
      if (excess_[v] > 0 && label_[v] < dormant) {
        buckets_[label_[v]].push_back(v);
        max_active_ = std::max(max_active_, label_[v]);
      }
      if (work_ > relabel_period) global_relabel(to_source);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (excess_[v] != 0) throw Error("push-relabel left excess at a node");
  }
}

void FlowNetwork::global_relabel(bool to_source) {
  const int n = static_cast<int>(node_.size());
  const int dormant = n + 1;
  std::fill(label_.begin(), label_.end(), dormant);
  std::vector<int> queue;
  queue.reserve(node_.size());
  for (int v = 0; v < n; ++v) {
    const bool seed = to_source ? source_flow_[v] > 0 : node_[v].terminal < 0;
    if (seed) {
      label_[v] = 1;
      queue.push_back(v);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int w = queue[head];
    for (int a = node_[w].first_arc; a >= 0; a = arcs_[a].next) {
      const int u = arcs_[a].head;
      if (label_[u] == dormant && arcs_[sister(a)].residual > 0) {
        label_[u] = label_[w] + 1;
        queue.push_back(u);
      }
    }
  }
  for (auto& b : buckets_) b.clear();
  label_count_.assign(node_.size() + 2, 0);
  max_active_ = 0;
  for (int v = 0; v < n; ++v) {
    current_arc_[v] = node_[v].first_arc;
    if (label_[v] < dormant) ++label_count_[label_[v]];
    if (excess_[v] > 0 && label_[v] < dormant) {
      buckets_[label_[v]].push_back(v);
      max_active_ = std::max(max_active_, label_[v]);
    }
  }
  work_ = 0;
}

void FlowNetwork::discharge(int v, bool to_source) {
  const int dormant = static_cast<int>(node_.size()) + 1;
  while (excess_[v] > 0) {
    if (label_[v] == 1) {
      if (!to_source && node_[v].terminal < 0) {
        const std::int64_t delta = std::min(excess_[v], -node_[v].terminal);
        node_[v].terminal += delta;
        excess_[v] -= delta;
        flow_ticks_ += delta;
        continue;
      }
      if (to_source && source_flow_[v] > 0) {
        const std::int64_t delta = std::min(excess_[v], source_flow_[v]);
        source_flow_[v] -= delta;
        node_[v].terminal += delta;
        excess_[v] -= delta;
        continue;
      }
    }
    for (int a = current_arc_[v]; a >= 0; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.residual == 0 || label_[arc.head] != label_[v] - 1) continue;
      const std::int64_t delta = std::min(excess_[v], arc.residual);
      arc.residual -= delta;
      arcs_[sister(a)].residual += delta;
      if (excess_[arc.head] == 0 && label_[arc.head] < dormant) {
        buckets_[label_[arc.head]].push_back(arc.head);
        max_active_ = std::max(max_active_, label_[arc.head]);
      }
      excess_[arc.head] += delta;
      excess_[v] -= delta;
      if (excess_[v] == 0) {
        current_arc_[v] = a;
        return;
      }
    }
    // relabel
    int best = dormant;
    int best_arc = node_[v].first_arc;
    if (to_source ? source_flow_[v] > 0 : node_[v].terminal < 0) best = 1;
    int degree = 0;
    for (int a = node_[v].first_arc; a >= 0; a = arcs_[a].next) {
      ++degree;
      if (arcs_[a].residual > 0 && label_[arcs_[a].head] + 1 < best) {
        best = label_[arcs_[a].head] + 1;
        best_arc = a;
      }
    }
    work_ += 12 + degree;
    current_arc_[v] = best_arc;
    const int previous = label_[v];
    if (--label_count_[previous] == 0) {
      // gap: nothing above `previous` can reach the target any more
      for (int& l : label_) {
        if (l > previous && l < dormant) {
          --label_count_[l];
          l = dormant;
        }
      }
      label_[v] = dormant;
      return;
    }
    label_[v] = std::min(best, dormant);
    if (label_[v] >= dormant) return;
    ++label_count_[label_[v]];
  }
}

}  // namespace lgo

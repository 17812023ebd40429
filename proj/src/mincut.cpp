#include "lgo/mincut.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <ostream>

#include "lgo/error.hpp"

namespace lgo {

FlowNetwork::FlowNetwork(DomainPtr domain, const Stencil& stencil,
                         const PixelSet& forced_in, const PixelSet& forced_out,
                         FlowAlgorithm algorithm)
    : domain_(std::move(domain)),
      stencil_(stencil),
      forced_in_(forced_in),
      forced_out_(forced_out),
      algorithm_(algorithm) {
  const GridDomain& d = *domain_;
  if (forced_in.size() != d.size() || forced_out.size() != d.size()) {
    throw PreconditionError("constraint sets do not match the network domain");
  }
  grid_to_node_.assign(d.size(), -1);
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (forced_in.contains(n) && forced_out.contains(n)) {
      throw PreconditionError("node " + std::to_string(n) +
                              " is both forced in and forced out");
    }
    if (!forced_in.contains(n) && !forced_out.contains(n)) {
      grid_to_node_[n] = static_cast<int>(nodes_.size());
      nodes_.push_back(n);
    }
  }
  node_.resize(nodes_.size());
  source_cap_.assign(nodes_.size(), 0);
  sink_cap_.assign(nodes_.size(), 0);

  const auto& half = stencil.half_offsets();
  const auto& ticks = stencil.half_ticks();
  for (int j = 0; j < d.height(); ++j) {
    for (int i = 0; i < d.width(); ++i) {
      const std::size_t p = d.index(i, j);
      for (std::size_t k = 0; k < half.size(); ++k) {
        const int qi = i + half[k].dx;
        const int qj = j + half[k].dy;
        if (!d.in_grid(qi, qj)) continue;
        const std::size_t q = d.index(qi, qj);
        const int np = grid_to_node_[p];
        const int nq = grid_to_node_[q];
        const std::int64_t w = ticks[k];
        if (np >= 0 && nq >= 0) {
          add_arc_pair(np, nq, w);
        } else if (np >= 0) {
          (forced_in.contains(q) ? source_cap_ : sink_cap_)[np] += w;
        } else if (nq >= 0) {
          (forced_in.contains(p) ? source_cap_ : sink_cap_)[nq] += w;
        } else if (forced_in.contains(p) != forced_in.contains(q)) {
          offset_ticks_ += w;
        }
      }
    }
  }
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    paired_terminal_ticks_ += std::min(source_cap_[n], sink_cap_[n]);
    node_[n].terminal = source_cap_[n] - sink_cap_[n];
  }
}

void FlowNetwork::add_arc_pair(int from, int to, std::int64_t cap) {
  const int a = static_cast<int>(arcs_.size());
  arcs_.push_back({to, node_[from].first_arc, cap});
  node_[from].first_arc = a;
  arcs_.push_back({from, node_[to].first_arc, cap});
  node_[to].first_arc = a + 1;
}

void FlowNetwork::set_active(int n) {
  if (node_[n].active) return;
  node_[n].active = true;
  active_queue_.push_back(n);
}

int FlowNetwork::next_active() {
  while (active_head_ < active_queue_.size()) {
    const int n = active_queue_[active_head_++];
    node_[n].active = false;
    if (node_[n].parent != kNone) return n;
  }
  active_queue_.clear();
  active_head_ = 0;
  return -1;
}

void FlowNetwork::augment(int middle) {
  std::int64_t bottleneck = arcs_[middle].residual;
  int n = arcs_[sister(middle)].head;
  for (int a = node_[n].parent; a != kTerminal; a = node_[n].parent) {
    bottleneck = std::min(bottleneck, arcs_[sister(a)].residual);
    n = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, node_[n].terminal);
  n = arcs_[middle].head;
  for (int a = node_[n].parent; a != kTerminal; a = node_[n].parent) {
    bottleneck = std::min(bottleneck, arcs_[a].residual);
    n = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, -node_[n].terminal);

  std::deque<int> front;
  auto orphan_front = [&](int m) {
    node_[m].parent = kOrphan;
    front.push_back(m);
  };

  arcs_[sister(middle)].residual += bottleneck;
  arcs_[middle].residual -= bottleneck;
  n = arcs_[sister(middle)].head;
  while (true) {
    const int a = node_[n].parent;
    if (a == kTerminal) break;
    arcs_[a].residual += bottleneck;
    arcs_[sister(a)].residual -= bottleneck;
    if (arcs_[sister(a)].residual == 0) orphan_front(n);
    n = arcs_[a].head;
  }
  node_[n].terminal -= bottleneck;
  if (node_[n].terminal == 0) orphan_front(n);

  n = arcs_[middle].head;
  while (true) {
    const int a = node_[n].parent;
    if (a == kTerminal) break;
    arcs_[sister(a)].residual += bottleneck;
    arcs_[a].residual -= bottleneck;
    if (arcs_[a].residual == 0) orphan_front(n);
    n = arcs_[a].head;
  }
  node_[n].terminal += bottleneck;
  if (node_[n].terminal == 0) orphan_front(n);

  flow_ticks_ += bottleneck;
  // Orphans created here are processed before any queued earlier, most
  // recent first, matching the reference front insertion.
  for (auto it = front.rbegin(); it != front.rend(); ++it) orphans_.push_back(*it);
}

void FlowNetwork::process_source_orphan(int orphan) {
  constexpr int kInfinite = INT_MAX;
  int best_arc = -1;
  int best_dist = kInfinite;
  for (int a0 = node_[orphan].first_arc; a0 >= 0; a0 = arcs_[a0].next) {
    if (arcs_[sister(a0)].residual == 0) continue;
    int j = arcs_[a0].head;
    if (node_[j].in_sink_tree || node_[j].parent == kNone) continue;
    int d = 0;
    while (true) {
      if (node_[j].timestamp == time_) {
        d += node_[j].dist;
        break;
      }
      const int a = node_[j].parent;
      ++d;
      if (a == kTerminal) {
        node_[j].timestamp = time_;
        node_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfinite;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfinite) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; node_[j].timestamp != time_; j = arcs_[node_[j].parent].head) {
      node_[j].timestamp = time_;
      node_[j].dist = d--;
    }
  }
  if (best_arc >= 0) {
    node_[orphan].parent = best_arc;
    node_[orphan].timestamp = time_;
    node_[orphan].dist = best_dist + 1;
    return;
  }
  node_[orphan].parent = kNone;
  for (int a0 = node_[orphan].first_arc; a0 >= 0; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    const int a = node_[j].parent;
    if (node_[j].in_sink_tree || a == kNone) continue;
    if (arcs_[sister(a0)].residual > 0) set_active(j);
    if (a != kTerminal && a != kOrphan && arcs_[a].head == orphan) {
      node_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

void FlowNetwork::process_sink_orphan(int orphan) {
  constexpr int kInfinite = INT_MAX;
  int best_arc = -1;
  int best_dist = kInfinite;
  for (int a0 = node_[orphan].first_arc; a0 >= 0; a0 = arcs_[a0].next) {
    if (arcs_[a0].residual == 0) continue;
    int j = arcs_[a0].head;
    if (!node_[j].in_sink_tree || node_[j].parent == kNone) continue;
    int d = 0;
    while (true) {
      if (node_[j].timestamp == time_) {
        d += node_[j].dist;
        break;
      }
      const int a = node_[j].parent;
      ++d;
      if (a == kTerminal) {
        node_[j].timestamp = time_;
        node_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfinite;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfinite) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; node_[j].timestamp != time_; j = arcs_[node_[j].parent].head) {
      node_[j].timestamp = time_;
      node_[j].dist = d--;
    }
  }
  if (best_arc >= 0) {
    node_[orphan].parent = best_arc;
    node_[orphan].timestamp = time_;
    node_[orphan].dist = best_dist + 1;
    return;
  }
  node_[orphan].parent = kNone;
  for (int a0 = node_[orphan].first_arc; a0 >= 0; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    const int a = node_[j].parent;
    if (!node_[j].in_sink_tree || a == kNone) continue;
    if (arcs_[a0].residual > 0) set_active(j);
    if (a != kTerminal && a != kOrphan && arcs_[a].head == orphan) {
      node_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

std::int64_t FlowNetwork::max_flow() {
  if (solved_) return flow_ticks_ + paired_terminal_ticks_;
  if (algorithm_ == FlowAlgorithm::PushRelabel) {
    run_push_relabel();
  } else {
    run_boykov_kolmogorov();
  }
  solved_ = true;
  return flow_ticks_ + paired_terminal_ticks_;
}

void FlowNetwork::run_boykov_kolmogorov() {
  for (std::size_t k = 0; k < node_.size(); ++k) {
    Node& n = node_[k];
    if (n.terminal > 0) {
      n.in_sink_tree = false;
      n.parent = kTerminal;
      n.timestamp = 0;
      n.dist = 1;
      set_active(static_cast<int>(k));
    } else if (n.terminal < 0) {
      n.in_sink_tree = true;
      n.parent = kTerminal;
      n.timestamp = 0;
      n.dist = 1;
      set_active(static_cast<int>(k));
    } else {
      n.parent = kNone;
    }
  }

  int current = -1;
  while (true) {
    int i = current;
    if (i >= 0) {
      node_[i].active = false;
      if (node_[i].parent == kNone) i = -1;
    }
    if (i < 0) {
      i = next_active();
      if (i < 0) break;
    }

    int found = -1;
    if (!node_[i].in_sink_tree) {
      for (int a = node_[i].first_arc; a >= 0; a = arcs_[a].next) {
        if (arcs_[a].residual == 0) continue;
        const int j = arcs_[a].head;
        Node& nj = node_[j];
        if (nj.parent == kNone) {
          nj.in_sink_tree = false;
          nj.parent = sister(a);
          nj.timestamp = node_[i].timestamp;
          nj.dist = node_[i].dist + 1;
          set_active(j);
        } else if (nj.in_sink_tree) {
          found = a;
          break;
        } else if (nj.timestamp <= node_[i].timestamp && nj.dist > node_[i].dist) {
          nj.parent = sister(a);
          nj.timestamp = node_[i].timestamp;
          nj.dist = node_[i].dist + 1;
        }
      }
    } else {
      for (int a = node_[i].first_arc; a >= 0; a = arcs_[a].next) {
        if (arcs_[sister(a)].residual == 0) continue;
        const int j = arcs_[a].head;
        Node& nj = node_[j];
        if (nj.parent == kNone) {
          nj.in_sink_tree = true;
          nj.parent = sister(a);
          nj.timestamp = node_[i].timestamp;
          nj.dist = node_[i].dist + 1;
          set_active(j);
        } else if (!nj.in_sink_tree) {
          found = sister(a);
          break;
        } else if (nj.timestamp <= node_[i].timestamp && nj.dist > node_[i].dist) {
          nj.parent = sister(a);
          nj.timestamp = node_[i].timestamp;
          nj.dist = node_[i].dist + 1;
        }
      }
    }

    ++time_;
    if (found >= 0) {
      node_[i].active = true;  // stays current; keeps it out of the queue
      current = i;
      augment(found);
      while (orphan_head_ < orphans_.size()) {
        const int n = orphans_[orphan_head_++];
        if (node_[n].in_sink_tree) {
          process_sink_orphan(n);
        } else {
          process_source_orphan(n);
        }
      }
      orphans_.clear();
      orphan_head_ = 0;
    } else {
      current = -1;
    }
  }
}

CutResult FlowNetwork::extract_cuts() const {
  if (!solved_) throw PreconditionError("extract_cuts called before max_flow");
  const std::size_t count = nodes_.size();
  std::vector<std::uint8_t> source_side(count, 0);
  std::vector<std::uint8_t> sink_side(count, 0);
  std::vector<int> queue;

  for (std::size_t k = 0; k < count; ++k) {
    if (node_[k].terminal > 0) {
      source_side[k] = 1;
      queue.push_back(static_cast<int>(k));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int n = queue[head];
    for (int a = node_[n].first_arc; a >= 0; a = arcs_[a].next) {
      const int j = arcs_[a].head;
      if (arcs_[a].residual > 0 && !source_side[j]) {
        source_side[j] = 1;
        queue.push_back(j);
      }
    }
  }
  queue.clear();
  for (std::size_t k = 0; k < count; ++k) {
    if (node_[k].terminal < 0) {
      sink_side[k] = 1;
      queue.push_back(static_cast<int>(k));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int n = queue[head];
    for (int a = node_[n].first_arc; a >= 0; a = arcs_[a].next) {
      const int j = arcs_[a].head;
      if (arcs_[sister(a)].residual > 0 && !sink_side[j]) {
        sink_side[j] = 1;
        queue.push_back(j);
      }
    }
  }

  CutResult result{0.0, 0, offset_ticks_, forced_in_, forced_in_, {}};
  for (std::size_t k = 0; k < count; ++k) {
    if (source_side[k]) result.e_min.set(nodes_[k]);
    if (!sink_side[k]) result.e_max.set(nodes_[k]);
  }
  result.flow_ticks = flow_ticks_ + paired_terminal_ticks_;
  result.flow_value = static_cast<double>(result.flow_ticks) * stencil_.tick_length();
  result.perimeter = perimeter(result.e_max, Region::omega(), stencil_);
  return result;
}

void FlowNetwork::write_dimacs(std::ostream& out) const {
  // r(a) + r(sister a) is invariant under augmentation: twice the weight.
  std::size_t arc_count = arcs_.size();
  for (std::size_t k = 0; k < node_.size(); ++k) {
    arc_count += (source_cap_[k] > 0) + (sink_cap_[k] > 0);
  }
  out << "c lgo flow network, capacities in ticks\n";
  out << "p max " << node_.size() + 2 << ' ' << arc_count << '\n';
  out << "n 1 s\nn 2 t\n";
  for (std::size_t a = 0; a < arcs_.size(); a += 2) {
    const std::int64_t cap = (arcs_[a].residual + arcs_[a + 1].residual) / 2;
    const int from = arcs_[a + 1].head;
    const int to = arcs_[a].head;
    out << "a " << from + 3 << ' ' << to + 3 << ' ' << cap << '\n';
    out << "a " << to + 3 << ' ' << from + 3 << ' ' << cap << '\n';
  }
  for (std::size_t k = 0; k < node_.size(); ++k) {
    if (source_cap_[k] > 0) out << "a 1 " << k + 3 << ' ' << source_cap_[k] << '\n';
    if (sink_cap_[k] > 0) out << "a " << k + 3 << " 2 " << sink_cap_[k] << '\n';
  }
}

FlowNetwork build_network(DomainPtr domain, const Stencil& stencil,
                          const PixelSet& forced_in, const PixelSet& forced_out) {
  return FlowNetwork(std::move(domain), stencil, forced_in, forced_out);
}

CutResult solve_min_cut(DomainPtr domain, const Stencil& stencil,
                        const PixelSet& forced_in, const PixelSet& forced_out,
                        FlowAlgorithm algorithm) {
  FlowNetwork net(std::move(domain), stencil, forced_in, forced_out, algorithm);
  net.max_flow();
  return net.extract_cuts();
}

CutMinimalityVerdict verify_minimality_by_cut(const PixelSet& set,
                                              std::span<const std::size_t> window,
                                              MinimalityMode mode,
                                              const Stencil& stencil) {
  const DomainPtr& domain = set.domain_ptr();
  std::vector<std::uint8_t> in_window(domain->size(), 0);
  for (std::size_t n : window) {
    if (n >= domain->size()) throw PreconditionError("window node outside grid");
    in_window[n] = 1;
  }
  PixelSet forced_in(domain);
  PixelSet forced_out(domain);
  for (std::size_t n = 0; n < domain->size(); ++n) {
    const bool member = set.contains(n);
    const bool free_in_window = in_window[n] != 0;
    switch (mode) {
      case MinimalityMode::Min:
        if (!free_in_window) (member ? forced_in : forced_out).set(n);
        break;
      case MinimalityMode::Super:
        if (member) forced_in.set(n);
        else if (!free_in_window) forced_out.set(n);
        break;
      case MinimalityMode::Sub:
        if (!member) forced_out.set(n);
        else if (!free_in_window) forced_in.set(n);
        break;
    }
  }
  CutResult cut = solve_min_cut(domain, stencil, forced_in, forced_out);
  CutMinimalityVerdict verdict{true, 0, 0, cut.e_max};
  verdict.set_ticks = perimeter(set, Region::plane(), stencil).total_ticks();
  verdict.best_ticks = cut.flow_ticks + cut.offset_ticks;
  verdict.holds = verdict.set_ticks <= verdict.best_ticks;
  return verdict;
}

}  // namespace lgo

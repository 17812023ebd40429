#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/perimeter.hpp"

namespace lgo {

struct CutResult {
  /// Minimum cut over the free part of the network, in length units.
  double flow_value = 0.0;
  std::int64_t flow_ticks = 0;
  /// Cut weight of edges joining two forced nodes (independent of the cut).
  std::int64_t offset_ticks = 0;
  PixelSet e_min;  // nodes reachable from the source in the residual graph
  PixelSet e_max;  // complement of the nodes that reach the sink
  PerimeterValue perimeter;  // of e_max over Omega
};

enum class FlowAlgorithm : std::uint8_t {
  BoykovKolmogorov,  // search trees; fast when terminals are spread out
  PushRelabel,       // highest label with global relabeling; long-path grids
};

/// s-t network whose finite cuts are the sets containing `forced_in` and
/// avoiding `forced_out`. Forced nodes are merged into the terminals, so the
/// cut capacity of an admissible set E equals P(E) minus `offset_ticks()`.
///
/// Single owner; not thread-safe. Distinct networks may be solved
/// concurrently.
class FlowNetwork {
 public:
  FlowNetwork(DomainPtr domain, const Stencil& stencil, const PixelSet& forced_in,
              const PixelSet& forced_out,
              FlowAlgorithm algorithm = FlowAlgorithm::PushRelabel);

  std::size_t free_node_count() const { return nodes_.size(); }
  std::int64_t offset_ticks() const { return offset_ticks_; }
  bool solved() const { return solved_; }

  /// Computes a maximum flow with the chosen algorithm. Returns the flow
  /// value in ticks. Idempotent.
  std::int64_t max_flow();

  /// Minimal and maximal minimum cuts. Throws PreconditionError before
  /// max_flow().
  CutResult extract_cuts() const;

  /// DIMACS max-flow dump (source = 1, sink = 2, free nodes from 3).
  void write_dimacs(std::ostream& out) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Arc {
    int head;
    int next;
    std::int64_t residual;
  };
  struct Node {
    int first_arc = -1;
    int parent = kNone;
    int timestamp = 0;
    int dist = 0;
    bool in_sink_tree = false;
    bool active = false;
    std::int64_t terminal = 0;  // > 0: residual from source; < 0: to sink
  };

  static int sister(int arc) { return arc ^ 1; }
  void add_arc_pair(int from, int to, std::int64_t cap);
  void set_active(int n);
  int next_active();
  void augment(int middle_arc);
  void process_source_orphan(int n);
  void process_sink_orphan(int n);
  void run_boykov_kolmogorov();

  void run_push_relabel();
  void global_relabel(bool to_source);
  void discharge(int v, bool to_source);

  DomainPtr domain_;
  Stencil stencil_;
  PixelSet forced_in_;
  PixelSet forced_out_;
  std::vector<int> grid_to_node_;
  std::vector<std::size_t> nodes_;  // node id -> grid index
  std::vector<Node> node_;
  std::vector<Arc> arcs_;
  std::vector<std::int64_t> source_cap_;  // as built, for the dump
  std::vector<std::int64_t> sink_cap_;
  std::int64_t offset_ticks_ = 0;
  std::int64_t paired_terminal_ticks_ = 0;
  std::int64_t flow_ticks_ = 0;
  bool solved_ = false;

  std::vector<int> active_queue_;
  std::size_t active_head_ = 0;
  std::vector<int> orphans_;  // used as a deque through orphan_head_
  std::size_t orphan_head_ = 0;
  int time_ = 0;

  FlowAlgorithm algorithm_;
  std::vector<std::int64_t> excess_;
  std::vector<std::int64_t> source_flow_;  // flow on the source arc, for returns
  std::vector<int> label_;
  std::vector<int> current_arc_;
  std::vector<int> label_count_;  // nodes per label below dormant
  std::vector<std::vector<int>> buckets_;  // active nodes by label
  int max_active_ = 0;
  std::int64_t work_ = 0;
};

/// Throws PreconditionError when forced_in and forced_out overlap.
FlowNetwork build_network(DomainPtr domain, const Stencil& stencil,
                          const PixelSet& forced_in, const PixelSet& forced_out);

/// Convenience: build, solve and extract.
CutResult solve_min_cut(DomainPtr domain, const Stencil& stencil,
                        const PixelSet& forced_in, const PixelSet& forced_out,
                        FlowAlgorithm algorithm = FlowAlgorithm::PushRelabel);

struct CutMinimalityVerdict {
  bool holds = true;
  std::int64_t set_ticks = 0;  // P(E) over the plane
  std::int64_t best_ticks = 0;  // least perimeter among admissible competitors
  PixelSet witness;  // volume-maximal best competitor
};

/// Exact minimality test for windows of any size, by min cut. Competitors F
/// agree with E outside the window; Super also requires F to contain E, Sub
/// requires F inside E.
CutMinimalityVerdict verify_minimality_by_cut(const PixelSet& set,
                                              std::span<const std::size_t> window,
                                              MinimalityMode mode,
                                              const Stencil& stencil);

}  // namespace lgo

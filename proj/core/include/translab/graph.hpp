#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace translab::graph {

enum class EdgeKind : std::uint8_t { local, translocal };

using NodeId = std::uint32_t;
using EdgeKey = std::pair<NodeId, NodeId>;  // canonical: first < second

EdgeKey make_edge_key(NodeId u, NodeId v);

// Undirected simple graph with per-edge local/translocal tags and optional
// periodic lattice coordinates. Values are immutable in normal use: builders
// and rewiring return fresh graphs.
class Graph {
 public:
  Graph() = default;
  explicit Graph(NodeId node_count);

  NodeId node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t edge_count(EdgeKind kind) const;

  // Returns false (and leaves the graph unchanged) on duplicates; throws on
  // self-loops and out-of-range endpoints.
  bool add_edge(NodeId u, NodeId v, EdgeKind kind);
  bool remove_edge(NodeId u, NodeId v);
  bool has_edge(NodeId u, NodeId v) const;
  std::optional<EdgeKind> edge_kind(NodeId u, NodeId v) const;

  // Neighbor lists are kept sorted so every traversal is deterministic.
  const std::vector<NodeId>& neighbors(NodeId u) const;
  const std::map<EdgeKey, EdgeKind>& edges() const { return edges_; }

  bool has_positions() const { return !positions_.empty(); }
  int lattice_dims() const { return lattice_dims_; }
  int lattice_side() const { return lattice_side_; }
  const std::array<int, 3>& position(NodeId u) const;
  void set_lattice(int side, int dims);  // assigns row-major coordinates to all nodes
  // True when u and v are nearest neighbors of the periodic lattice.
  bool lattice_adjacent(NodeId u, NodeId v) const;

  std::vector<std::size_t> degree_sequence() const;  // sorted ascending
  std::size_t triangle_count() const;

 private:
  NodeId node_count_ = 0;
  std::map<EdgeKey, EdgeKind> edges_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::array<int, 3>> positions_;
  int lattice_dims_ = 0;
  int lattice_side_ = 0;
};

struct Clique {
  std::vector<NodeId> members;  // sorted
  friend bool operator==(const Clique&, const Clique&) = default;
  friend auto operator<=>(const Clique& a, const Clique& b) { return a.members <=> b.members; }
};

struct RenormalizationLevel {
  Graph graph;
  // lineage[i] = the previous-level nodes merged into node i (its clique);
  // identity at level 0.
  std::vector<std::vector<NodeId>> lineage;
  int level_index = 0;
};

enum class FixedPointStatus { found, not_found, undecided };

struct RenormalizeResult {
  std::vector<RenormalizationLevel> levels;
  FixedPointStatus status = FixedPointStatus::not_found;
  // Index of the first level of the detected fixed point (meaningful when
  // status == found).
  int fixed_point_level = -1;
};

struct ConnectivityRatio {
  double value = 0.0;
  double log10_value = 0.0;  // -inf when value == 0
};

struct SpreadingReport {
  std::size_t union_count = 0;
  std::vector<std::size_t> part_counts;
  std::size_t sum_of_parts = 0;
  bool additive = false;         // union_count == sum_of_parts
  double relative_spread = 0.0;  // sd(part_counts) / mean, 0 when mean == 0
};

// --- constructions -------------------------------------------------------

// Periodic lattice of side^dims nodes with nearest-neighbor `local` edges;
// each node sprouts one `translocal` shortcut to a uniformly random
// non-neighbor with probability shortcut_prob.
Graph build_lattice_with_shortcuts(int side, int dims, double shortcut_prob, std::uint64_t seed);

// Erdos-Renyi G(n, p); edges tagged translocal (no lattice metric).
Graph build_erdos_renyi(NodeId n, double p, std::uint64_t seed);

Graph complete_graph(NodeId n);
Graph cycle_graph(NodeId n);
Graph path_graph(NodeId n);
Graph petersen_graph();

// --- operations ----------------------------------------------------------

// Maximal cliques with at least min_size members, each sorted, the list in
// lexicographic order. Bron-Kerbosch with pivoting.
std::vector<Clique> enumerate_max_cliques(const Graph& g, int min_size);

// Clique graph: one node per maximal clique (>= min_size members), edges
// where the member overlap reaches overlap_min.
RenormalizationLevel clique_graph(const Graph& g, int overlap_min, int min_size = 2);

// Iterates clique_graph up to max_steps, stopping early at a detected fixed
// point (consecutive isomorphic levels, or a single node). Above iso_bound
// nodes the exact check is replaced by an invariant fingerprint and a match
// reports `undecided`.
RenormalizeResult renormalize(const Graph& g, int max_steps, int overlap_min, int min_size = 2,
                              NodeId iso_bound = 16);

// Interbond count between two disjoint nonempty node sets over its maximum.
double connectivity(const Graph& g, std::span<const NodeId> s1, std::span<const NodeId> s2);

// Same ratio from raw counts, evaluated in log space so magnitudes around
// 10^(+-80) survive.
ConnectivityRatio connectivity_from_counts(double n_interbonds, double n1, double n2);

SpreadingReport spreading_statistic(const Graph& g, std::span<const NodeId> target,
                                    const std::vector<std::vector<NodeId>>& parts);

// Structurally dynamic step: translocal edges whose endpoint phase difference
// exceeds threshold are each, with probability toggle_prob, replaced by a new
// translocal edge between a random pair with phase difference below
// threshold. Local edges and the node count are untouched.
Graph rewire_step(const Graph& g, std::span<const double> phases, double threshold,
                  double toggle_prob, std::uint64_t seed);

// Exact isomorphism test (backtracking); intended for small graphs.
bool graphs_isomorphic(const Graph& a, const Graph& b);

// --- file format ---------------------------------------------------------
// One-line header `nodes=<n>`, then `u v kind` lines with kind in {L,T};
// write/read round-trips bit-exactly.

void write_graph(const Graph& g, std::ostream& os);
Graph read_graph(std::istream& is);
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

}  // namespace translab::graph

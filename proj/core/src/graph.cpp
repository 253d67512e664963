#include "translab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "translab/numeric.hpp"

namespace translab::graph {

namespace {

// Fixed-capacity bitset over node ids, sized at runtime.
class NodeSet {
 public:
  explicit NodeSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= (1ULL << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  std::size_t intersect_count(const NodeSet& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(__builtin_popcountll(words_[i] & o.words_[i]));
    return c;
  }

  NodeSet intersect(const NodeSet& o) const {
    NodeSet r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        const auto b = static_cast<std::size_t>(__builtin_ctzll(w));
        fn(wi * 64 + b);
        w &= w - 1;
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

EdgeKey make_edge_key(NodeId u, NodeId v) {
  return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
}

Graph::Graph(NodeId node_count) : node_count_(node_count), adj_(node_count) {}

std::size_t Graph::edge_count(EdgeKind kind) const {
  std::size_t c = 0;
  for (const auto& [key, k] : edges_)
    if (k == kind) ++c;
  return c;
}

bool Graph::add_edge(NodeId u, NodeId v, EdgeKind kind) {
  if (u == v) throw std::invalid_argument("graph: self-loop");
  if (u >= node_count_ || v >= node_count_) throw std::invalid_argument("graph: endpoint out of range");
  const auto key = make_edge_key(u, v);
  if (edges_.contains(key)) return false;
  edges_.emplace(key, kind);
  auto& au = adj_[u];
  au.insert(std::lower_bound(au.begin(), au.end(), v), v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  return true;
}

bool Graph::remove_edge(NodeId u, NodeId v) {
  const auto key = make_edge_key(u, v);
  const auto it = edges_.find(key);
  if (it == edges_.end()) return false;
  edges_.erase(it);
  auto& au = adj_[u];
  au.erase(std::lower_bound(au.begin(), au.end(), v));
  auto& av = adj_[v];
  av.erase(std::lower_bound(av.begin(), av.end(), u));
  return true;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u == v) return false;
  return edges_.contains(make_edge_key(u, v));
}

std::optional<EdgeKind> Graph::edge_kind(NodeId u, NodeId v) const {
  const auto it = edges_.find(make_edge_key(u, v));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

const std::vector<NodeId>& Graph::neighbors(NodeId u) const {
  if (u >= node_count_) throw std::invalid_argument("graph: node out of range");
  return adj_[u];
}

const std::array<int, 3>& Graph::position(NodeId u) const {
  if (!has_positions()) throw std::logic_error("graph: no positions");
  return positions_[u];
}

void Graph::set_lattice(int side, int dims) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("graph: dims must be 1..3");
  if (ipow(static_cast<std::size_t>(side), dims) != node_count_)
    throw std::invalid_argument("graph: node count does not match side^dims");
  lattice_side_ = side;
  lattice_dims_ = dims;
  positions_.assign(node_count_, {0, 0, 0});
  for (NodeId u = 0; u < node_count_; ++u) {
    auto rest = static_cast<std::size_t>(u);
    for (int d = dims - 1; d >= 0; --d) {
      positions_[u][static_cast<std::size_t>(d)] = static_cast<int>(rest % static_cast<std::size_t>(side));
      rest /= static_cast<std::size_t>(side);
    }
  }
}

bool Graph::lattice_adjacent(NodeId u, NodeId v) const {
  if (!has_positions() || u == v) return false;
  int diff_axes = 0;
  bool unit_step = true;
  for (int d = 0; d < lattice_dims_; ++d) {
    int delta = std::abs(positions_[u][static_cast<std::size_t>(d)] -
                         positions_[v][static_cast<std::size_t>(d)]);
    delta = std::min(delta, lattice_side_ - delta);  // periodic
    if (delta != 0) {
      ++diff_axes;
      if (delta != 1) unit_step = false;
    }
  }
  return diff_axes == 1 && unit_step;
}

std::vector<std::size_t> Graph::degree_sequence() const {
  std::vector<std::size_t> deg(node_count_);
  for (NodeId u = 0; u < node_count_; ++u) deg[u] = adj_[u].size();
  std::sort(deg.begin(), deg.end());
  return deg;
}

std::size_t Graph::triangle_count() const {
  std::size_t t = 0;
  for (const auto& [key, kind] : edges_) {
    (void)kind;
    const auto& [u, v] = key;
    const auto& au = adj_[u];
    const auto& av = adj_[v];
    // common neighbors above v, so each triangle is counted once
    auto iu = std::upper_bound(au.begin(), au.end(), v);
    auto iv = std::upper_bound(av.begin(), av.end(), v);
    while (iu != au.end() && iv != av.end()) {
      if (*iu < *iv) {
        ++iu;
      } else if (*iv < *iu) {
        ++iv;
      } else {
        ++t;
        ++iu;
        ++iv;
      }
    }
  }
  return t;
}

// --- constructions -------------------------------------------------------

Graph build_lattice_with_shortcuts(int side, int dims, double shortcut_prob, std::uint64_t seed) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("lattice: dims must be 1..3");
  if (side < 2) throw std::invalid_argument("lattice: side must be >= 2");
  if (shortcut_prob < 0.0 || shortcut_prob > 1.0)
    throw std::invalid_argument("lattice: shortcut_prob must be in [0,1]");
  const auto n = static_cast<NodeId>(ipow(static_cast<std::size_t>(side), dims));
  Graph g(n);
  g.set_lattice(side, dims);

  const std::size_t stride[3] = {ipow(static_cast<std::size_t>(side), dims - 1),
                                 dims >= 2 ? ipow(static_cast<std::size_t>(side), dims - 2) : 0, 1};
  (void)stride;
  for (NodeId u = 0; u < n; ++u) {
    const auto& pu = g.position(u);
    for (int d = 0; d < dims; ++d) {
      // +1 neighbor along axis d; -1 comes from that neighbor's own +1
      std::array<int, 3> pv = pu;
      pv[static_cast<std::size_t>(d)] = (pu[static_cast<std::size_t>(d)] + 1) % side;
      std::size_t v = 0;
      for (int e = 0; e < dims; ++e)
        v = v * static_cast<std::size_t>(side) + static_cast<std::size_t>(pv[static_cast<std::size_t>(e)]);
      g.add_edge(u, static_cast<NodeId>(v), EdgeKind::local);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  for (NodeId u = 0; u < n; ++u) {
    if (shortcut_prob <= 0.0) break;
    if (coin(rng) >= shortcut_prob) continue;
    for (std::size_t attempt = 0; attempt < 64ULL * n; ++attempt) {
      const NodeId v = pick(rng);
      if (v == u || g.lattice_adjacent(u, v) || g.has_edge(u, v)) continue;
      g.add_edge(u, v, EdgeKind::translocal);
      break;
    }
  }
  return g;
}

Graph build_erdos_renyi(NodeId n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi: p must be in [0,1]");
  Graph g(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng) < p) g.add_edge(u, v, EdgeKind::translocal);
  return g;
}

Graph complete_graph(NodeId n) {
  Graph g(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v, EdgeKind::local);
  return g;
}

Graph cycle_graph(NodeId n) {
  Graph g(n);
  for (NodeId u = 0; u < n; ++u) g.add_edge(u, (u + 1) % n, EdgeKind::local);
  return g;
}

Graph path_graph(NodeId n) {
  Graph g(n);
  for (NodeId u = 0; u + 1 < n; ++u) g.add_edge(u, u + 1, EdgeKind::local);
  return g;
}

Graph petersen_graph() {
  Graph g(10);
  for (NodeId u = 0; u < 5; ++u) {
    g.add_edge(u, (u + 1) % 5, EdgeKind::local);          // outer pentagon
    g.add_edge(u + 5, (u + 2) % 5 + 5, EdgeKind::local);  // inner pentagram
    g.add_edge(u, u + 5, EdgeKind::local);                // spokes
  }
  return g;
}

// --- clique enumeration ---------------------------------------------------

namespace {

void bron_kerbosch(const std::vector<NodeSet>& nbr, std::vector<NodeId>& r, NodeSet p, NodeSet x,
                   std::size_t n, int min_size, std::vector<Clique>& out) {
  if (p.empty() && x.empty()) {
    if (r.size() >= static_cast<std::size_t>(min_size)) {
      Clique c;
      c.members = r;
      std::sort(c.members.begin(), c.members.end());
      out.push_back(std::move(c));
    }
    return;
  }
  // pivot: vertex of P|X with the most neighbors inside P
  std::size_t pivot = 0, best = 0;
  bool have_pivot = false;
  auto consider = [&](std::size_t u) {
    const std::size_t c = p.intersect_count(nbr[u]);
    if (!have_pivot || c > best) {
      pivot = u;
      best = c;
      have_pivot = true;
    }
  };
  p.for_each(consider);
  x.for_each(consider);

  std::vector<std::size_t> candidates;
  p.for_each([&](std::size_t v) {
    if (!nbr[pivot].test(v)) candidates.push_back(v);
  });
  for (const std::size_t v : candidates) {
    r.push_back(static_cast<NodeId>(v));
    bron_kerbosch(nbr, r, p.intersect(nbr[v]), x.intersect(nbr[v]), n, min_size, out);
    r.pop_back();
    p.reset(v);
    x.set(v);
  }
}

}  // namespace

std::vector<Clique> enumerate_max_cliques(const Graph& g, int min_size) {
  if (min_size < 1) throw std::invalid_argument("cliques: min_size must be >= 1");
  const std::size_t n = g.node_count();
  std::vector<Clique> out;
  if (n == 0) return out;
  std::vector<NodeSet> nbr(n, NodeSet(n));
  for (std::size_t u = 0; u < n; ++u)
    for (const NodeId v : g.neighbors(static_cast<NodeId>(u))) nbr[u].set(v);
  NodeSet p(n), x(n);
  for (std::size_t u = 0; u < n; ++u) p.set(u);
  std::vector<NodeId> r;
  bron_kerbosch(nbr, r, p, x, n, min_size, out);
  std::sort(out.begin(), out.end());
  return out;
}

RenormalizationLevel clique_graph(const Graph& g, int overlap_min, int min_size) {
  if (overlap_min < 1) throw std::invalid_argument("clique_graph: overlap_min must be >= 1");
  const auto cliques = enumerate_max_cliques(g, min_size);
  RenormalizationLevel level;
  level.graph = Graph(static_cast<NodeId>(cliques.size()));
  level.lineage.reserve(cliques.size());
  for (const auto& c : cliques) level.lineage.push_back(c.members);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (std::size_t j = i + 1; j < cliques.size(); ++j) {
      const auto& a = cliques[i].members;
      const auto& b = cliques[j].members;
      std::size_t overlap = 0;
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++overlap;
          ++ia;
          ++ib;
        }
      }
      if (overlap >= static_cast<std::size_t>(overlap_min))
        level.graph.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j), EdgeKind::local);
    }
  }
  return level;
}

RenormalizeResult renormalize(const Graph& g, int max_steps, int overlap_min, int min_size,
                              NodeId iso_bound) {
  if (max_steps < 1) throw std::invalid_argument("renormalize: max_steps must be >= 1");
  RenormalizeResult result;
  RenormalizationLevel base;
  base.graph = g;
  base.level_index = 0;
  base.lineage.resize(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) base.lineage[u] = {u};
  result.levels.push_back(std::move(base));

  for (int step = 1; step <= max_steps; ++step) {
    RenormalizationLevel next = clique_graph(result.levels.back().graph, overlap_min, min_size);
    next.level_index = step;
    result.levels.push_back(std::move(next));
    const Graph& prev = result.levels[result.levels.size() - 2].graph;
    const Graph& cur = result.levels.back().graph;

    if (cur.node_count() <= 1) {
      result.status = FixedPointStatus::found;
      result.fixed_point_level = step;
      return result;
    }
    if (prev.node_count() <= iso_bound && cur.node_count() <= iso_bound) {
      if (graphs_isomorphic(prev, cur)) {
        result.status = FixedPointStatus::found;
        result.fixed_point_level = step - 1;
        return result;
      }
    } else {
      // beyond the exact-check bound: fingerprints can only refute
      const bool same = prev.node_count() == cur.node_count() &&
                        prev.edge_count() == cur.edge_count() &&
                        prev.degree_sequence() == cur.degree_sequence() &&
                        prev.triangle_count() == cur.triangle_count();
      if (same) {
        result.status = FixedPointStatus::undecided;
        result.fixed_point_level = step - 1;
        return result;
      }
    }
  }
  result.status = FixedPointStatus::not_found;
  return result;
}

// --- connectivity ----------------------------------------------------------

namespace {

std::vector<char> membership(const Graph& g, std::span<const NodeId> s, const char* what) {
  std::vector<char> in(g.node_count(), 0);
  for (const NodeId u : s) {
    if (u >= g.node_count()) throw std::invalid_argument(std::string(what) + ": node out of range");
    if (in[u]) throw std::invalid_argument(std::string(what) + ": duplicate node");
    in[u] = 1;
  }
  return in;
}

std::size_t interbond_count(const Graph& g, const std::vector<char>& in1,
                            std::span<const NodeId> s2) {
  std::size_t c = 0;
  for (const NodeId v : s2)
    for (const NodeId w : g.neighbors(v))
      if (in1[w]) ++c;
  return c;
}

}  // namespace

double connectivity(const Graph& g, std::span<const NodeId> s1, std::span<const NodeId> s2) {
  if (s1.empty() || s2.empty()) throw std::invalid_argument("connectivity: empty node set");
  auto in1 = membership(g, s1, "connectivity");
  for (const NodeId u : s2)
    if (u < in1.size() && in1[u]) throw std::invalid_argument("connectivity: sets overlap");
  (void)membership(g, s2, "connectivity");
  const std::size_t c = interbond_count(g, in1, s2);
  return static_cast<double>(c) / (static_cast<double>(s1.size()) * static_cast<double>(s2.size()));
}

ConnectivityRatio connectivity_from_counts(double n_interbonds, double n1, double n2) {
  if (!(n1 > 0.0) || !(n2 > 0.0))
    throw std::invalid_argument("connectivity_from_counts: set sizes must be positive");
  if (n_interbonds < 0.0)
    throw std::invalid_argument("connectivity_from_counts: negative interbond count");
  const double log_max = std::log10(n1) + std::log10(n2);
  if (n_interbonds > 0.0 && std::log10(n_interbonds) > log_max * (1.0 + 1e-15) + 1e-12)
    throw std::invalid_argument("connectivity_from_counts: count exceeds maximum wiring");
  ConnectivityRatio r;
  if (n_interbonds == 0.0) {
    r.value = 0.0;
    r.log10_value = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.log10_value = std::log10(n_interbonds) - log_max;
  r.value = std::pow(10.0, r.log10_value);
  return r;
}

SpreadingReport spreading_statistic(const Graph& g, std::span<const NodeId> target,
                                    const std::vector<std::vector<NodeId>>& parts) {
  auto in_target = membership(g, target, "spreading");
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> all;
  for (const auto& part : parts) {
    for (const NodeId u : part) {
      if (u >= g.node_count()) throw std::invalid_argument("spreading: node out of range");
      if (seen[u]) throw std::invalid_argument("spreading: parts overlap");
      if (in_target[u]) throw std::invalid_argument("spreading: part overlaps target");
      seen[u] = 1;
      all.push_back(u);
    }
  }
  SpreadingReport rep;
  for (const auto& part : parts)
    rep.part_counts.push_back(interbond_count(g, in_target, part));
  for (const std::size_t c : rep.part_counts) rep.sum_of_parts += c;
  rep.union_count = interbond_count(g, in_target, all);
  rep.additive = rep.union_count == rep.sum_of_parts;
  if (!rep.part_counts.empty()) {
    std::vector<double> xs(rep.part_counts.begin(), rep.part_counts.end());
    const double m = num::mean(xs);
    if (m > 0.0 && xs.size() > 1) rep.relative_spread = std::sqrt(num::variance(xs)) / m;
  }
  return rep;
}

Graph rewire_step(const Graph& g, std::span<const double> phases, double threshold,
                  double toggle_prob, std::uint64_t seed) {
  if (phases.size() != g.node_count()) throw std::invalid_argument("rewire: phase array size mismatch");
  if (!(threshold > 0.0) || threshold > std::numbers::pi)
    throw std::invalid_argument("rewire: threshold must be in (0, pi]");
  if (toggle_prob < 0.0 || toggle_prob > 1.0)
    throw std::invalid_argument("rewire: toggle_prob must be in [0,1]");
  Graph out = g;
  if (toggle_prob == 0.0 || g.node_count() < 2) return out;

  std::vector<EdgeKey> candidates;
  for (const auto& [key, kind] : g.edges()) {
    if (kind != EdgeKind::translocal) continue;
    const double d = std::abs(num::wrap_pi(phases[key.first] - phases[key.second]));
    if (d > threshold) candidates.push_back(key);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<NodeId> pick(0, g.node_count() - 1);
  for (const auto& [u, v] : candidates) {
    if (coin(rng) >= toggle_prob) continue;
    out.remove_edge(u, v);
    for (std::size_t attempt = 0; attempt < 64ULL * g.node_count(); ++attempt) {
      const NodeId a = pick(rng);
      const NodeId b = pick(rng);
      if (a == b || out.has_edge(a, b) || out.lattice_adjacent(a, b)) continue;
      if (std::abs(num::wrap_pi(phases[a] - phases[b])) >= threshold) continue;
      out.add_edge(a, b, EdgeKind::translocal);
      break;
    }
  }
  return out;
}

// --- isomorphism -----------------------------------------------------------

namespace {

bool iso_backtrack(const Graph& a, const Graph& b, const std::vector<NodeId>& order,
                   std::size_t depth, std::vector<int>& map_ab, std::vector<char>& used_b) {
  if (depth == order.size()) return true;
  const NodeId u = order[depth];
  const auto deg_u = a.neighbors(u).size();
  for (NodeId v = 0; v < b.node_count(); ++v) {
    if (used_b[v] || b.neighbors(v).size() != deg_u) continue;
    bool ok = true;
    for (std::size_t d = 0; d < depth && ok; ++d) {
      const NodeId w = order[d];
      if (a.has_edge(u, w) != b.has_edge(v, static_cast<NodeId>(map_ab[w]))) ok = false;
    }
    if (!ok) continue;
    map_ab[u] = static_cast<int>(v);
    used_b[v] = 1;
    if (iso_backtrack(a, b, order, depth + 1, map_ab, used_b)) return true;
    used_b[v] = 0;
    map_ab[u] = -1;
  }
  return false;
}

}  // namespace

bool graphs_isomorphic(const Graph& a, const Graph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.degree_sequence() != b.degree_sequence()) return false;
  if (a.triangle_count() != b.triangle_count()) return false;
  if (a.node_count() == 0) return true;
  std::vector<NodeId> order(a.node_count());
  for (NodeId u = 0; u < a.node_count(); ++u) order[u] = u;
  std::sort(order.begin(), order.end(), [&](NodeId x, NodeId y) {
    const auto dx = a.neighbors(x).size();
    const auto dy = a.neighbors(y).size();
    return dx != dy ? dx > dy : x < y;
  });
  std::vector<int> map_ab(a.node_count(), -1);
  std::vector<char> used_b(b.node_count(), 0);
  return iso_backtrack(a, b, order, 0, map_ab, used_b);
}

// --- file format ------------------------------------------------------------

void write_graph(const Graph& g, std::ostream& os) {
  os << "nodes=" << g.node_count() << "\n";
  for (const auto& [key, kind] : g.edges())
    os << key.first << " " << key.second << " " << (kind == EdgeKind::local ? 'L' : 'T') << "\n";
}

Graph read_graph(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("nodes=", 0) != 0)
    throw std::runtime_error("graph file: missing nodes= header");
  const unsigned long n = std::stoul(header.substr(6));
  Graph g(static_cast<NodeId>(n));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    NodeId u = 0, v = 0;
    char kind = 0;
    if (!(ls >> u >> v >> kind) || (kind != 'L' && kind != 'T'))
      throw std::runtime_error("graph file: malformed edge line: " + line);
    if (!g.add_edge(u, v, kind == 'L' ? EdgeKind::local : EdgeKind::translocal))
      throw std::runtime_error("graph file: duplicate edge: " + line);
  }
  return g;
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_graph(g, os);
}

Graph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_graph(is);
}

}  // namespace translab::graph

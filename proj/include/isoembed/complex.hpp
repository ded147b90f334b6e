#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isoembed/error.hpp"
#include "isoembed/scalar.hpp"

namespace isoembed {

template <class T>
struct length_entry {
  std::string a;
  std::string b;
  T value;

  friend bool operator==(const length_entry&, const length_entry&) = default;
};

/// Raw description of an indefinite metric polyhedron, as read from a file or
/// produced by a generator. The complex is the downward closure of
/// `maximal_simplices`; `squared_lengths` must cover exactly its edges.
template <class T>
struct polyhedron_data {
  std::vector<std::string> vertices;
  std::vector<std::vector<std::string>> maximal_simplices;
  std::vector<length_entry<T>> squared_lengths;

  friend bool operator==(const polyhedron_data&, const polyhedron_data&) = default;
};

struct defect {
  enum class kind {
    duplicate_vertex_id,
    empty_simplex,
    repeated_vertex,
    unknown_vertex,
    missing_length,
    duplicate_length,
    length_without_edge,
  };
  kind what;
  std::string message;
};

inline std::string to_string(defect::kind k) {
  switch (k) {
    case defect::kind::duplicate_vertex_id: return "duplicate vertex id";
    case defect::kind::empty_simplex: return "empty simplex";
    case defect::kind::repeated_vertex: return "repeated vertex";
    case defect::kind::unknown_vertex: return "unknown vertex";
    case defect::kind::missing_length: return "missing edge length";
    case defect::kind::duplicate_length: return "duplicate edge length";
    case defect::kind::length_without_edge: return "length for a pair that is not an edge";
  }
  return "defect";
}

class invalid_polyhedron : public error {
 public:
  explicit invalid_polyhedron(std::vector<defect> defects)
      : error(summary(defects)), defects_(std::move(defects)) {}
  const std::vector<defect>& defects() const noexcept { return defects_; }

 private:
  static std::string summary(const std::vector<defect>& ds) {
    std::string s = "invalid polyhedron:";
    for (const auto& d : ds) s += "\n  " + d.message;
    return s;
  }
  std::vector<defect> defects_;
};

namespace detail {

inline std::pair<std::string, std::string> ordered_pair(const std::string& a, const std::string& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

/// Reports every structural defect; an empty result means the data is valid.
template <class T>
std::vector<defect> validate(const polyhedron_data<T>& p) {
  std::vector<defect> out;
  std::set<std::string> ids;
  for (const auto& v : p.vertices)
    if (!ids.insert(v).second)
      out.push_back({defect::kind::duplicate_vertex_id, "duplicate vertex id '" + v + "'"});

  std::set<std::pair<std::string, std::string>> edges;
  for (std::size_t s = 0; s < p.maximal_simplices.size(); ++s) {
    const auto& simplex = p.maximal_simplices[s];
    const std::string where = "simplex #" + std::to_string(s);
    if (simplex.empty()) {
      out.push_back({defect::kind::empty_simplex, where + " is empty"});
      continue;
    }
    std::set<std::string> seen;
    bool usable = true;
    for (const auto& v : simplex) {
      if (!ids.count(v)) {
        out.push_back({defect::kind::unknown_vertex, where + " references unknown vertex '" + v + "'"});
        usable = false;
      }
      if (!seen.insert(v).second) {
        out.push_back({defect::kind::repeated_vertex, where + " contains vertex '" + v + "' twice"});
        usable = false;
      }
    }
    if (!usable) continue;
    for (auto i = seen.begin(); i != seen.end(); ++i)
      for (auto j = std::next(i); j != seen.end(); ++j) edges.insert({*i, *j});
  }

  std::set<std::pair<std::string, std::string>> covered;
  for (const auto& e : p.squared_lengths) {
    const auto key = detail::ordered_pair(e.a, e.b);
    const std::string name = "{" + key.first + ", " + key.second + "}";
    if (!edges.count(key)) {
      out.push_back({defect::kind::length_without_edge, "length given for " + name + ", which is not an edge"});
      continue;
    }
    if (!covered.insert(key).second)
      out.push_back({defect::kind::duplicate_length, "edge " + name + " has more than one length"});
  }
  for (const auto& e : edges)
    if (!covered.count(e))
      out.push_back({defect::kind::missing_length, "missing edge length for {" + e.first + ", " + e.second + "}"});
  return out;
}

/// An edge of the 1-skeleton by vertex index, a < b.
struct edge {
  std::size_t a;
  std::size_t b;
  friend auto operator<=>(const edge&, const edge&) = default;
};

/// A validated simplicial complex with squared edge lengths g. Vertices are
/// indexed 0..N-1 in input order; edges are sorted lexicographically by index.
template <class T>
class indefinite_metric_polyhedron {
 public:
  explicit indefinite_metric_polyhedron(const polyhedron_data<T>& data) {
    if (auto defects = validate(data); !defects.empty()) throw invalid_polyhedron(std::move(defects));
    names_ = data.vertices;
    for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
    std::set<edge> edge_set;
    for (const auto& s : data.maximal_simplices) {
      std::vector<std::size_t> ids;
      for (const auto& v : s) ids.push_back(index_.at(v));
      std::sort(ids.begin(), ids.end());
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) edge_set.insert({ids[i], ids[j]});
      dimension_ = std::max(dimension_, ids.size() - 1);
      simplices_.push_back(std::move(ids));
    }
    edges_.assign(edge_set.begin(), edge_set.end());
    neighbors_.assign(names_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      edge_index_.emplace(key(edges_[e].a, edges_[e].b), e);
      neighbors_[edges_[e].a].push_back(edges_[e].b);
      neighbors_[edges_[e].b].push_back(edges_[e].a);
    }
    for (auto& n : neighbors_) std::sort(n.begin(), n.end());
    lengths_.assign(edges_.size(), T(0));
    for (const auto& le : data.squared_lengths)
      lengths_[*edge_index(index_.at(le.a), index_.at(le.b))] = le.value;
  }

  std::size_t vertex_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t v) const { return names_.at(v); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string& name) const {
    auto v = find(name);
    if (!v) throw precondition_error("unknown vertex '" + name + "'", {name});
    return *v;
  }

  /// Generating simplices as sorted vertex indices.
  const std::vector<std::vector<std::size_t>>& simplices() const noexcept { return simplices_; }
  const std::vector<edge>& edges() const noexcept { return edges_; }
  const std::vector<T>& lengths() const noexcept { return lengths_; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return neighbors_.at(v); }
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return neighbors_; }

  /// n = largest simplex cardinality - 1 (0 when there are no simplices).
  std::size_t dimension() const noexcept { return dimension_; }

  std::optional<std::size_t> edge_index(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    auto it = edge_index_.find(key(a, b));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  const T& length(std::size_t a, std::size_t b) const {
    auto e = edge_index(a, b);
    if (!e) throw precondition_error("no edge between '" + name(a) + "' and '" + name(b) + "'");
    return lengths_[*e];
  }

  polyhedron_data<T> data() const {
    polyhedron_data<T> d;
    d.vertices = names_;
    for (const auto& s : simplices_) {
      std::vector<std::string> named;
      for (auto v : s) named.push_back(names_[v]);
      d.maximal_simplices.push_back(std::move(named));
    }
    for (std::size_t e = 0; e < edges_.size(); ++e)
      d.squared_lengths.push_back({names_[edges_[e].a], names_[edges_[e].b], lengths_[e]});
    return d;
  }

 private:
  static std::uint64_t key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> simplices_;
  std::vector<edge> edges_;
  std::vector<T> lengths_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
  std::size_t dimension_ = 0;
};

/// Same complex with every length mapped through `convert`.
template <class U, class T, class F>
polyhedron_data<U> convert_lengths(const polyhedron_data<T>& p, F&& convert) {
  polyhedron_data<U> out{p.vertices, p.maximal_simplices, {}};
  out.squared_lengths.reserve(p.squared_lengths.size());
  for (const auto& e : p.squared_lengths) out.squared_lengths.push_back({e.a, e.b, convert(e.value)});
  return out;
}

template <class T>
std::size_t vertex_degree(const indefinite_metric_polyhedron<T>& p, const std::string& v) {
  return p.neighbors(p.index_of(v)).size();
}

template <class T>
std::size_t max_degree(const indefinite_metric_polyhedron<T>& p) {
  std::size_t m = 0;
  for (const auto& n : p.adjacency()) m = std::max(m, n.size());
  return m;
}

template <class T>
struct skeleton_edge {
  std::string a;
  std::string b;
  T value;

  friend bool operator==(const skeleton_edge&, const skeleton_edge&) = default;
};

/// E(T) with lengths, in the polyhedron's canonical edge order.
template <class T>
std::vector<skeleton_edge<T>> skeleton_edges(const indefinite_metric_polyhedron<T>& p) {
  std::vector<skeleton_edge<T>> out;
  out.reserve(p.edges().size());
  for (std::size_t e = 0; e < p.edges().size(); ++e)
    out.push_back({p.name(p.edges()[e].a), p.name(p.edges()[e].b), p.lengths()[e]});
  return out;
}

/// Vertex order in which every vertex has at most `degeneracy` neighbours
/// earlier in the order.
struct degeneracy_ordering {
  std::vector<std::size_t> order;        // vertex indices, first placed first
  std::vector<std::size_t> position;     // inverse of order
  std::vector<std::size_t> back_degree;  // per vertex index
  std::size_t degeneracy = 0;
};

/// back_degree/degeneracy for a prescribed order.
inline degeneracy_ordering ordering_from_sequence(const std::vector<std::vector<std::size_t>>& adjacency,
                                                  std::vector<std::size_t> order) {
  const std::size_t n = adjacency.size();
  if (order.size() != n) throw precondition_error("ordering does not cover every vertex");
  degeneracy_ordering out;
  out.position.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || out.position[order[i]] != n)
      throw precondition_error("ordering is not a permutation of the vertices");
    out.position[order[i]] = i;
  }
  out.back_degree.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto u : adjacency[v])
      if (out.position[u] < out.position[v]) ++out.back_degree[v];
    out.degeneracy = std::max(out.degeneracy, out.back_degree[v]);
  }
  out.order = std::move(order);
  return out;
}

/// Smallest-last ordering: repeatedly delete a vertex of minimum remaining
/// degree (lowest index on ties); the order is the reverse of the deletions.
inline degeneracy_ordering smallest_last(const std::vector<std::vector<std::size_t>>& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<std::size_t> degree(n);
  std::size_t max_deg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = adjacency[v].size();
    max_deg = std::max(max_deg, degree[v]);
  }
  std::vector<std::set<std::size_t>> buckets(max_deg + 1);
  for (std::size_t v = 0; v < n; ++v) buckets[degree[v]].insert(v);
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> removal;
  removal.reserve(n);

  degeneracy_ordering out;
  out.back_degree.assign(n, 0);
  std::size_t low = 0;
  for (std::size_t step = 0; step < n; ++step) {
    while (buckets[low].empty()) ++low;
    const std::size_t v = *buckets[low].begin();
    buckets[low].erase(buckets[low].begin());
    removed[v] = true;
    out.back_degree[v] = degree[v];
    out.degeneracy = std::max(out.degeneracy, degree[v]);
    removal.push_back(v);
    for (auto u : adjacency[v]) {
      if (removed[u]) continue;
      buckets[degree[u]].erase(u);
      --degree[u];
      buckets[degree[u]].insert(u);
    }
    low = low > 0 ? low - 1 : 0;
  }
  out.order.assign(removal.rbegin(), removal.rend());
  out.position.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) out.position[out.order[i]] = i;
  return out;
}

template <class T>
degeneracy_ordering smallest_last(const indefinite_metric_polyhedron<T>& p) {
  return smallest_last(p.adjacency());
}

}  // namespace isoembed

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isoembed/linalg.hpp"

namespace isoembed {

/// How a construction ran, enough to replay it.
struct embedding_meta {
  std::string pipeline;               // "embed" or "extend"
  std::vector<std::string> ordering;  // vertex ids in placement order
  std::string split_policy;           // "standard" or "per-vertex"
  std::string anchors;                // anchor family ("moment_curve", "uniform_box", "generic")
  std::vector<std::string> anchor_parameters;  // moment-curve t per ordering position
  std::uint64_t seed = 0;

  friend bool operator==(const embedding_meta&, const embedding_meta&) = default;
};

/// Vertex images in R^d_d, indexed like the polyhedron's vertices. Unassigned
/// entries make it a partial map.
template <class T>
struct embedding {
  std::size_t d = 0;
  std::vector<std::optional<mink_vector<T>>> images;
  embedding_meta meta;

  bool assigned(std::size_t v) const { return v < images.size() && images[v].has_value(); }

  std::size_t assigned_count() const {
    std::size_t n = 0;
    for (const auto& im : images) n += im.has_value();
    return n;
  }

  bool is_total() const { return assigned_count() == images.size(); }

  const mink_vector<T>& at(std::size_t v) const {
    if (!assigned(v)) throw precondition_error("vertex #" + std::to_string(v) + " has no image");
    return *images[v];
  }
};

}  // namespace isoembed

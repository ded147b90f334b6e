#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isoembed/complex.hpp"
#include "isoembed/embedding.hpp"
#include "isoembed/scalar.hpp"
#include "isoembed/verify.hpp"

namespace isoembed::io {

// All numbers travel as strings ("p/q", integers or decimals) so exact values
// survive JSON. Objects serialize with sorted keys, two-space indent and a
// trailing LF, which makes parse/serialize byte-stable.

using json = nlohmann::json;

inline constexpr const char* polyhedron_version = "isoembed-polyhedron/1";
inline constexpr const char* embedding_version = "isoembed-embedding/1";

using coordinate_map = std::map<std::string, std::vector<std::string>>;

struct polyhedron_file {
  std::string version = polyhedron_version;
  std::optional<std::size_t> d;
  polyhedron_data<std::string> data;
  std::optional<coordinate_map> partial_embedding;

  friend bool operator==(const polyhedron_file&, const polyhedron_file&) = default;
};

struct embedding_file {
  std::string version = embedding_version;
  std::size_t d = 0;
  std::string backend;
  coordinate_map assignment;
  embedding_meta meta;
  std::optional<json> report;

  friend bool operator==(const embedding_file&, const embedding_file&) = default;
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw parse_error(what + " must be a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_strings(const json& j, const std::string& what) {
  if (!j.is_array()) throw parse_error(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(as_string(x, what + " entry"));
  return out;
}

inline std::size_t as_size(const json& j, const std::string& what) {
  if (!j.is_number_unsigned()) throw parse_error(what + " must be a non-negative integer");
  return j.get<std::size_t>();
}

inline coordinate_map as_coordinates(const json& j, const std::string& what) {
  if (!j.is_object()) throw parse_error(what + " must be an object of id -> coordinate strings");
  coordinate_map out;
  for (const auto& [k, v] : j.items()) out[k] = as_strings(v, what + "['" + k + "']");
  return out;
}

}  // namespace detail

inline json to_json(const polyhedron_file& f) {
  json j = json::object();
  j["version"] = f.version;
  if (f.d) j["d"] = *f.d;
  j["vertices"] = f.data.vertices;
  j["maximal_simplices"] = f.data.maximal_simplices;
  json lengths = json::array();
  for (const auto& e : f.data.squared_lengths) lengths.push_back({{"edge", {e.a, e.b}}, {"value", e.value}});
  j["squared_lengths"] = std::move(lengths);
  if (f.partial_embedding) j["partial_embedding"] = *f.partial_embedding;
  return j;
}

inline polyhedron_file parse_polyhedron_file(const json& j) {
  polyhedron_file f;
  f.version = detail::as_string(detail::field(j, "version"), "version");
  if (f.version != polyhedron_version) throw parse_error("unsupported polyhedron file version '" + f.version + "'");
  if (j.contains("d")) f.d = detail::as_size(j.at("d"), "d");
  f.data.vertices = detail::as_strings(detail::field(j, "vertices"), "vertices");
  const auto& simplices = detail::field(j, "maximal_simplices");
  if (!simplices.is_array()) throw parse_error("maximal_simplices must be an array");
  for (const auto& s : simplices) f.data.maximal_simplices.push_back(detail::as_strings(s, "simplex"));
  const auto& lengths = detail::field(j, "squared_lengths");
  if (!lengths.is_array()) throw parse_error("squared_lengths must be an array");
  for (const auto& e : lengths) {
    auto ends = detail::as_strings(detail::field(e, "edge"), "edge");
    if (ends.size() != 2) throw parse_error("edge must list exactly two vertex ids");
    f.data.squared_lengths.push_back({ends[0], ends[1], detail::as_string(detail::field(e, "value"), "value")});
  }
  if (j.contains("partial_embedding"))
    f.partial_embedding = detail::as_coordinates(j.at("partial_embedding"), "partial_embedding");
  return f;
}

inline polyhedron_file parse_polyhedron_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  return parse_polyhedron_file(j);
}

inline std::string serialize(const polyhedron_file& f) { return dump(to_json(f)); }

template <class T>
polyhedron_file to_file(const polyhedron_data<T>& p, std::optional<std::size_t> d = std::nullopt) {
  polyhedron_file f;
  f.d = d;
  f.data = convert_lengths<std::string>(p, [](const T& x) { return format_scalar(x); });
  return f;
}

/// True when every length is an integer or "p/q" literal.
inline bool all_rational_literals(const polyhedron_file& f) {
  for (const auto& e : f.data.squared_lengths)
    if (!is_rational_literal(e.value)) return false;
  return true;
}

template <class T>
polyhedron_data<T> lengths_as(const polyhedron_file& f) {
  return convert_lengths<T>(f.data, [](const std::string& s) { return parse_scalar<T>(s); });
}

inline json to_json(const embedding_meta& m) {
  return json{{"pipeline", m.pipeline},         {"ordering", m.ordering},
              {"split_policy", m.split_policy}, {"anchors", m.anchors},
              {"anchor_parameters", m.anchor_parameters}, {"seed", m.seed}};
}

inline embedding_meta parse_meta(const json& j) {
  embedding_meta m;
  m.pipeline = detail::as_string(detail::field(j, "pipeline"), "meta.pipeline");
  m.ordering = detail::as_strings(detail::field(j, "ordering"), "meta.ordering");
  m.split_policy = detail::as_string(detail::field(j, "split_policy"), "meta.split_policy");
  m.anchors = detail::as_string(detail::field(j, "anchors"), "meta.anchors");
  m.anchor_parameters = detail::as_strings(detail::field(j, "anchor_parameters"), "meta.anchor_parameters");
  const auto& seed = detail::field(j, "seed");
  if (!seed.is_number_unsigned()) throw parse_error("meta.seed must be a non-negative integer");
  m.seed = seed.get<std::uint64_t>();
  return m;
}

inline json to_json(const embedding_file& f) {
  json j = json::object();
  j["version"] = f.version;
  j["d"] = f.d;
  j["backend"] = f.backend;
  j["assignment"] = f.assignment;
  j["meta"] = to_json(f.meta);
  if (f.report) j["report"] = *f.report;
  return j;
}

inline embedding_file parse_embedding_file(const json& j) {
  embedding_file f;
  f.version = detail::as_string(detail::field(j, "version"), "version");
  if (f.version != embedding_version) throw parse_error("unsupported embedding file version '" + f.version + "'");
  f.d = detail::as_size(detail::field(j, "d"), "d");
  f.backend = detail::as_string(detail::field(j, "backend"), "backend");
  parse_backend(f.backend);
  f.assignment = detail::as_coordinates(detail::field(j, "assignment"), "assignment");
  f.meta = parse_meta(detail::field(j, "meta"));
  if (j.contains("report")) f.report = j.at("report");
  return f;
}

inline embedding_file parse_embedding_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  return parse_embedding_file(j);
}

inline std::string serialize(const embedding_file& f) { return dump(to_json(f)); }

template <class T>
coordinate_map to_coordinates(const indefinite_metric_polyhedron<T>& p, const embedding<T>& tau) {
  coordinate_map out;
  for (std::size_t v = 0; v < tau.images.size(); ++v) {
    if (!tau.images[v]) continue;
    auto& coords = out[p.name(v)];
    for (const auto& x : tau.images[v]->coords()) coords.push_back(format_scalar(x));
  }
  return out;
}

/// Vertex images from id -> coordinate strings; unknown ids and wrong lengths
/// are parse errors.
template <class T>
embedding<T> from_coordinates(const indefinite_metric_polyhedron<T>& p, const coordinate_map& coords, std::size_t d) {
  embedding<T> tau;
  tau.d = d;
  tau.images.assign(p.vertex_count(), std::nullopt);
  for (const auto& [id, values] : coords) {
    auto v = p.find(id);
    if (!v) throw parse_error("embedding references unknown vertex '" + id + "'");
    if (values.size() != 2 * d)
      throw parse_error("vertex '" + id + "' has " + std::to_string(values.size()) + " coordinates, expected " +
                        std::to_string(2 * d));
    vec<T> c;
    c.reserve(values.size());
    for (const auto& s : values) c.push_back(parse_scalar<T>(s));
    tau.images[*v] = mink_vector<T>(std::move(c));
  }
  return tau;
}

// Verification reports.

template <class T>
json to_json(const indefinite_metric_polyhedron<T>& p, const verification_report<T>& r) {
  json iso = json::object();
  json residuals = json::array();
  for (const auto& x : r.isometry.residuals) {
    const auto e = p.edges()[x.edge];
    residuals.push_back({{"edge", {p.name(e.a), p.name(e.b)}}, {"residual", format_scalar(x.value)}});
  }
  iso["residuals"] = std::move(residuals);
  iso["max_abs_residual"] = format_scalar(r.isometry.max_abs_residual);
  iso["max_relative_residual"] = scalar_traits<double>::format(r.isometry.max_relative);
  iso["tolerance"] = scalar_traits<double>::format(r.isometry.tolerance);
  iso["pass"] = r.isometry.pass;
  if (r.isometry.worst_edge) {
    const auto e = p.edges()[*r.isometry.worst_edge];
    iso["worst_edge"] = {p.name(e.a), p.name(e.b)};
  }
  json j = json::object();
  j["isometry"] = std::move(iso);
  if (r.general_position) {
    json witness = json::array();
    for (auto v : r.general_position->witness) witness.push_back(p.name(v));
    j["general_position"] = {{"mode", to_string(r.general_position->mode)},
                             {"status", to_string(r.general_position->status)},
                             {"witness", witness},
                             {"subsets_checked", r.general_position->subsets_checked}};
  }
  if (r.injectivity) {
    j["injectivity"] = {{"applicable", r.injectivity->applicable},
                        {"verdict", to_string(r.injectivity->verdict)},
                        {"witness", r.injectivity->witness},
                        {"samples_run", r.injectivity->samples_run},
                        {"min_separation", scalar_traits<double>::format(r.injectivity->min_separation)}};
  }
  j["pass"] = r.pass;
  return j;
}

template <class T>
verification_report<T> parse_report(const indefinite_metric_polyhedron<T>& p, const json& j) {
  auto vertex = [&](const json& x) {
    auto v = p.find(detail::as_string(x, "vertex id"));
    if (!v) throw parse_error("report references unknown vertex");
    return *v;
  };
  auto edge_of = [&](const json& x) {
    if (!x.is_array() || x.size() != 2) throw parse_error("report edge must be a pair");
    auto e = p.edge_index(vertex(x[0]), vertex(x[1]));
    if (!e) throw parse_error("report references a pair that is not an edge");
    return *e;
  };
  verification_report<T> r;
  const auto& iso = detail::field(j, "isometry");
  for (const auto& x : detail::field(iso, "residuals"))
    r.isometry.residuals.push_back(
        {edge_of(detail::field(x, "edge")), parse_scalar<T>(detail::as_string(detail::field(x, "residual"), "residual"))});
  r.isometry.max_abs_residual = parse_scalar<T>(detail::as_string(detail::field(iso, "max_abs_residual"), "max"));
  r.isometry.max_relative = scalar_traits<double>::parse(detail::as_string(detail::field(iso, "max_relative_residual"), "rel"));
  r.isometry.tolerance = scalar_traits<double>::parse(detail::as_string(detail::field(iso, "tolerance"), "tolerance"));
  r.isometry.pass = detail::field(iso, "pass").get<bool>();
  if (iso.contains("worst_edge")) r.isometry.worst_edge = edge_of(iso.at("worst_edge"));
  if (j.contains("general_position")) {
    const auto& g = j.at("general_position");
    gp_report gr;
    const auto mode = detail::as_string(detail::field(g, "mode"), "mode");
    gr.mode = mode == "exhaustive" ? gp_mode::exhaustive : gp_mode::sampled;
    const auto status = detail::as_string(detail::field(g, "status"), "status");
    gr.status = status == "pass" ? gp_status::pass : status == "fail" ? gp_status::fail : gp_status::not_certified;
    for (const auto& w : detail::field(g, "witness")) gr.witness.push_back(vertex(w));
    gr.subsets_checked = detail::as_size(detail::field(g, "subsets_checked"), "subsets_checked");
    r.general_position = gr;
  }
  if (j.contains("injectivity")) {
    const auto& i = j.at("injectivity");
    injectivity_report ir;
    ir.applicable = detail::field(i, "applicable").get<bool>();
    const auto verdict = detail::as_string(detail::field(i, "verdict"), "verdict");
    for (auto v : {injectivity_verdict::embedding, injectivity_verdict::criterion_inapplicable,
                   injectivity_verdict::unverified, injectivity_verdict::not_injective})
      if (to_string(v) == verdict) ir.verdict = v;
    ir.witness = detail::as_strings(detail::field(i, "witness"), "witness");
    ir.samples_run = detail::as_size(detail::field(i, "samples_run"), "samples_run");
    ir.min_separation = scalar_traits<double>::parse(detail::as_string(detail::field(i, "min_separation"), "sep"));
    r.injectivity = ir;
  }
  r.pass = detail::field(j, "pass").get<bool>();
  return r;
}

}  // namespace isoembed::io

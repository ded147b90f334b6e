#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "isoembed/complex.hpp"
#include "isoembed/embed.hpp"
#include "isoembed/error.hpp"
#include "isoembed/gen.hpp"
#include "isoembed/io.hpp"
#include "isoembed/scalar.hpp"
#include "isoembed/verify.hpp"

// Command-line front end. Everything runs in-process through cli::run so the
// test suite can drive it with string streams.
//
// Exit codes: 0 success, 1 internal failure, 2 usage or parse error,
// 3 verification failure.

namespace isoembed::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_verify = 3;

inline constexpr const char* backend_env = "ISOEMBED_BACKEND";
inline constexpr const char* bench_header = "n,d,backend,phase_order_ms,phase_place_ms,phase_verify_ms,max_residual";

struct embed_options {
  std::string input;
  std::optional<std::size_t> d;
  std::string backend;
  std::uint64_t seed = 0;
  bool certify = false;
  std::size_t samples = 1000;
  std::string out;
};

struct verify_cmd_options {
  std::string polyhedron;
  std::string embedding;
  std::optional<double> tol;
  std::string backend;
  bool certify = false;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

struct gen_options {
  std::string kind = "degenerate";
  std::size_t d = 3;
  std::size_t rows = 2, cols = 2;
  std::size_t n = 50;
  std::size_t dim = 1;
  std::size_t bound = 3;
  std::string min = "-10", max = "10";
  unsigned max_den = 4;
  std::uint64_t seed = 0;
  std::string out;
};

struct bench_options {
  std::vector<std::size_t> n{100, 1000};
  std::vector<std::size_t> d{4, 8};
  std::string backend = "float";
  std::size_t dim = 1;
  std::uint64_t seed = 0;
  std::string out;
};

namespace detail {

inline std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw parse_error("cannot write '" + path + "'");
  f << text;
}

/// Flag, then environment, then the literals in the file decide the backend.
inline backend choose_backend(const std::string& flag, const io::polyhedron_file& f) {
  if (!flag.empty()) return parse_backend(flag);
  if (const char* env = std::getenv(backend_env); env && *env) return parse_backend(env);
  return io::all_rational_literals(f) ? backend::rational : backend::floating;
}

inline std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

template <class T>
verify_options make_verify_options(bool certify, std::size_t samples, std::uint64_t seed) {
  verify_options vo;
  vo.general_position = certify ? verify_options::gp_policy::exhaustive : verify_options::gp_policy::automatic;
  vo.gp.seed = seed;
  vo.injectivity.samples = samples;
  vo.injectivity.seed = seed;
  return vo;
}

template <class T>
bool accepted(const verification_report<T>& r, bool certify) {
  if (!r.pass) return false;
  return !certify || (r.general_position && r.general_position->status == gp_status::pass);
}

template <class T>
void describe_failure(const indefinite_metric_polyhedron<T>& p, const verification_report<T>& r, std::ostream& err) {
  if (!r.isometry.pass && r.isometry.worst_edge) {
    const auto e = p.edges()[*r.isometry.worst_edge];
    err << "isometry check failed on edge {" << p.name(e.a) << ", " << p.name(e.b) << "}\n";
  }
  if (r.general_position && r.general_position->status != gp_status::pass) {
    std::vector<std::string> w;
    for (auto v : r.general_position->witness) w.push_back(p.name(v));
    err << "general position " << to_string(r.general_position->status);
    if (!w.empty()) err << ", witness: " << join(w);
    err << "\n";
  }
  if (r.injectivity && r.injectivity->verdict == injectivity_verdict::not_injective)
    err << "images coincide: " << join(r.injectivity->witness) << "\n";
}

template <class T>
int embed_as(const io::polyhedron_file& f, backend b, const embed_options& o, std::ostream& out, std::ostream& err) {
  const indefinite_metric_polyhedron<T> p(io::lengths_as<T>(f));
  const auto order = smallest_last(p);
  embed_config cfg;
  cfg.d = o.d ? o.d : f.d;
  cfg.seed = o.seed;
  try {
    resolve_dimension(cfg.d, order.degeneracy);
  } catch (const precondition_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  const auto tau = embed_polyhedron(p, order, cfg);
  const auto report = verify_embedding(p, tau, make_verify_options<T>(o.certify, o.samples, o.seed));

  io::embedding_file ef;
  ef.d = tau.d;
  ef.backend = to_string(b);
  ef.assignment = io::to_coordinates(p, tau);
  ef.meta = tau.meta;
  ef.report = io::to_json(p, report);
  write_text(io::serialize(ef), o.out, out);
  if (accepted(report, o.certify)) return exit_ok;
  describe_failure(p, report, err);
  return exit_verify;
}

template <class T>
int verify_as(const io::polyhedron_file& f, const io::embedding_file& ef, const verify_cmd_options& o,
              std::ostream& out, std::ostream& err) {
  const indefinite_metric_polyhedron<T> p(io::lengths_as<T>(f));
  const auto tau = io::from_coordinates(p, ef.assignment, ef.d);
  if (!tau.is_total()) {
    std::vector<std::string> missing;
    for (std::size_t v = 0; v < p.vertex_count(); ++v)
      if (!tau.assigned(v)) missing.push_back(p.name(v));
    err << "error: embedding has no coordinates for: " << join(missing) << "\n";
    return exit_usage;
  }
  auto vo = make_verify_options<T>(o.certify, o.samples, o.seed);
  vo.residual_tol = o.tol;
  const auto report = verify_embedding(p, tau, vo);
  out << io::dump(io::to_json(p, report));
  if (accepted(report, o.certify)) return exit_ok;
  describe_failure(p, report, err);
  return exit_verify;
}

inline std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

template <class T>
std::string bench_row(std::size_t n, std::size_t d, const bench_options& o) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
  gen::gen_spec spec;
  spec.kind = gen::kind::random_d_degenerate;
  spec.n_vertices = n;
  spec.bound = d;
  spec.dim = o.dim;
  spec.seed = o.seed;
  const indefinite_metric_polyhedron<T> p(convert_lengths<T>(
      gen::random_polyhedron(spec), [](const rational& x) { return parse_scalar<T>(format_scalar(x)); }));

  const auto t0 = clock::now();
  const auto order = smallest_last(p);
  const auto t1 = clock::now();
  embed_config cfg;
  cfg.d = d;
  cfg.seed = o.seed;
  const auto tau = embed_polyhedron(p, order, cfg);
  const auto t2 = clock::now();
  const auto iso = verify_isometry(p, tau, default_residual_tol<T>());
  const auto t3 = clock::now();

  char residual[32];
  std::snprintf(residual, sizeof residual, "%.3e", iso.max_relative);
  return std::to_string(n) + "," + std::to_string(d) + "," + to_string(scalar_traits<T>::exact ? backend::rational : backend::floating) + "," + format_ms(ms(t0, t1)) +
         "," + format_ms(ms(t1, t2)) + "," + format_ms(ms(t2, t3)) + "," + residual;
}

}  // namespace detail

inline int cmd_embed(const embed_options& o, std::ostream& out, std::ostream& err) {
  const auto f = io::parse_polyhedron_file(detail::read_text(o.input));
  const backend b = detail::choose_backend(o.backend, f);
  return b == backend::rational ? detail::embed_as<rational>(f, b, o, out, err)
                                : detail::embed_as<double>(f, b, o, out, err);
}

/// Float only. Coordinates of already placed vertices are copied from the
/// input strings unchanged; new ones are printed in shortest round-trip form.
inline int cmd_extend(const embed_options& o, std::ostream& out, std::ostream& err) {
  const auto f = io::parse_polyhedron_file(detail::read_text(o.input));
  if (!o.backend.empty() && parse_backend(o.backend) != backend::floating) {
    err << "error: extend runs on the float backend only\n";
    return exit_usage;
  }
  if (!f.partial_embedding) {
    err << "error: input has no partial_embedding\n";
    return exit_usage;
  }
  const indefinite_metric_polyhedron<double> p(io::lengths_as<double>(f));
  std::optional<std::size_t> d = o.d ? o.d : f.d;
  if (!d && !f.partial_embedding->empty()) d = f.partial_embedding->begin()->second.size() / 2;
  if (!d) d = std::max<std::size_t>(max_degree(p), 1);
  if (*d == 0) throw parse_error("d must be at least 1");
  if (const auto md = max_degree(p); md > *d) {
    err << "error: max degree " << md << " exceeds d=" << *d << "\n";
    return exit_usage;
  }
  const auto partial = io::from_coordinates(p, *f.partial_embedding, *d);

  extend_config cfg;
  cfg.seed = o.seed;
  cfg.certify = o.certify;
  embedding<double> tau;
  try {
    tau = extend_embedding(p, partial, cfg);
  } catch (const precondition_error& e) {
    err << "precondition failed: " << e.what() << "\n";
    if (!e.witness().empty()) err << "witness: " << detail::join(e.witness()) << "\n";
    return exit_verify;
  }
  const auto report = verify_embedding(p, tau, detail::make_verify_options<double>(o.certify, o.samples, o.seed));

  io::embedding_file ef;
  ef.d = tau.d;
  ef.backend = to_string(backend::floating);
  ef.assignment = io::to_coordinates(p, tau);
  for (const auto& [id, coords] : *f.partial_embedding) ef.assignment[id] = coords;
  ef.meta = tau.meta;
  ef.report = io::to_json(p, report);
  detail::write_text(io::serialize(ef), o.out, out);
  if (detail::accepted(report, o.certify)) return exit_ok;
  detail::describe_failure(p, report, err);
  return exit_verify;
}

inline int cmd_verify(const verify_cmd_options& o, std::ostream& out, std::ostream& err) {
  const auto f = io::parse_polyhedron_file(detail::read_text(o.polyhedron));
  const auto ef = io::parse_embedding_file(detail::read_text(o.embedding));
  const backend b = parse_backend(o.backend.empty() ? ef.backend : o.backend);
  return b == backend::rational ? detail::verify_as<rational>(f, ef, o, out, err)
                                : detail::verify_as<double>(f, ef, o, out, err);
}

inline gen::kind parse_kind(const std::string& s) {
  if (s == "complete") return gen::kind::complete_skeleton;
  if (s == "mesh") return gen::kind::euclidean_mesh;
  if (s == "bounded") return gen::kind::random_bounded_degree;
  if (s == "degenerate") return gen::kind::random_d_degenerate;
  if (s == "stacked") return gen::kind::stacked_simplices;
  throw parse_error("unknown kind '" + s + "'");
}

inline int cmd_gen(const gen_options& o, std::ostream& out, std::ostream&) {
  gen::gen_spec spec;
  spec.kind = parse_kind(o.kind);
  spec.n_vertices = o.n;
  spec.dim = o.dim;
  spec.bound = spec.kind == gen::kind::complete_skeleton ? o.d : o.bound;
  spec.rows = o.rows;
  spec.cols = o.cols;
  spec.lengths.min = parse_rational(o.min);
  spec.lengths.max = parse_rational(o.max);
  spec.lengths.max_denominator = o.max_den;
  spec.seed = o.seed;
  const auto data = gen::random_polyhedron(spec);
  std::optional<std::size_t> d;
  if (spec.kind == gen::kind::complete_skeleton) d = o.d;
  detail::write_text(io::serialize(io::to_file(data, d)), o.out, out);
  return exit_ok;
}

inline int cmd_bench(const bench_options& o, std::ostream& out, std::ostream&) {
  const backend b = parse_backend(o.backend);
  std::string csv = std::string(bench_header) + "\n";
  for (auto n : o.n)
    for (auto d : o.d)
      csv += (b == backend::rational ? detail::bench_row<rational>(n, d, o) : detail::bench_row<double>(n, d, o)) + "\n";
  detail::write_text(csv, o.out, out);
  return exit_ok;
}

inline int cmd_info(const std::string& input, std::ostream& out, std::ostream& err) {
  const auto f = io::parse_polyhedron_file(detail::read_text(input));
  const auto defects = validate(f.data);
  io::json j = io::json::object();
  j["vertices"] = f.data.vertices.size();
  j["maximal_simplices"] = f.data.maximal_simplices.size();
  j["squared_lengths"] = f.data.squared_lengths.size();
  j["rational_literals"] = io::all_rational_literals(f);
  j["has_partial_embedding"] = f.partial_embedding.has_value();
  if (f.d) j["d"] = *f.d;
  io::json dj = io::json::array();
  for (const auto& x : defects) dj.push_back({{"kind", to_string(x.what)}, {"message", x.message}});
  j["defects"] = dj;
  if (defects.empty()) {
    // Structure only, so the lengths are replaced by placeholders.
    const indefinite_metric_polyhedron<int> p(convert_lengths<int>(f.data, [](const std::string&) { return 0; }));
    j["edges"] = p.edges().size();
    j["dimension"] = p.dimension();
    j["max_degree"] = max_degree(p);
    j["degeneracy"] = smallest_last(p).degeneracy;
  }
  out << io::dump(j);
  if (defects.empty()) return exit_ok;
  for (const auto& x : defects) err << "defect: " << x.message << "\n";
  return exit_usage;
}

/// Parses argv and runs one subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isometric embedding of indefinite metric polyhedra into Minkowski space R^d_d", "isoembed"};
  app.require_subcommand(1);

  embed_options eo;
  auto* embed = app.add_subcommand("embed", "embed a polyhedron file");
  auto* extend = app.add_subcommand("extend", "extend the partial_embedding of a polyhedron file");
  for (auto* sub : {embed, extend}) {
    sub->add_option("input", eo.input, "polyhedron JSON file, - for stdin")->required();
    sub->add_option("--d", eo.d, "target dimension d of R^d_d");
    sub->add_option("--backend", eo.backend, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--seed", eo.seed, "random seed");
    sub->add_flag("--certify", eo.certify, "require exhaustive general-position certification");
    sub->add_option("--samples", eo.samples, "injectivity samples");
    sub->add_option("--out", eo.out, "output file (default stdout)");
  }

  verify_cmd_options vo;
  auto* verify = app.add_subcommand("verify", "check an embedding file against a polyhedron file");
  verify->add_option("polyhedron", vo.polyhedron)->required();
  verify->add_option("embedding", vo.embedding)->required();
  verify->add_option("--tol", vo.tol, "relative residual tolerance");
  verify->add_option("--backend", vo.backend)->check(CLI::IsMember({"rational", "float"}));
  verify->add_flag("--certify", vo.certify);
  verify->add_option("--samples", vo.samples);
  verify->add_option("--seed", vo.seed);

  gen_options go;
  auto* gen = app.add_subcommand("gen", "write a fixture or random polyhedron file");
  gen->add_option("--kind", go.kind)->check(CLI::IsMember({"complete", "mesh", "bounded", "degenerate", "stacked"}));
  gen->add_option("--d", go.d, "complete: simplex dimension");
  gen->add_option("--rows", go.rows);
  gen->add_option("--cols", go.cols);
  gen->add_option("--n", go.n, "vertex count");
  gen->add_option("--dim", go.dim, "simplex dimension");
  gen->add_option("--bound", go.bound, "degree or degeneracy bound");
  gen->add_option("--min", go.min, "smallest squared length");
  gen->add_option("--max", go.max, "largest squared length");
  gen->add_option("--max-den", go.max_den, "largest denominator");
  gen->add_option("--seed", go.seed);
  gen->add_option("--out", go.out);

  bench_options bo;
  auto* bench = app.add_subcommand("bench", "time ordering, placement and verification");
  bench->add_option("--n", bo.n)->delimiter(',');
  bench->add_option("--d", bo.d)->delimiter(',');
  bench->add_option("--backend", bo.backend)->check(CLI::IsMember({"rational", "float"}));
  bench->add_option("--dim", bo.dim);
  bench->add_option("--seed", bo.seed);
  bench->add_option("--out", bo.out);

  std::string info_input;
  auto* info = app.add_subcommand("info", "summarize a polyhedron file");
  info->add_option("input", info_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (embed->parsed()) return cmd_embed(eo, out, err);
    if (extend->parsed()) return cmd_extend(eo, out, err);
    if (verify->parsed()) return cmd_verify(vo, out, err);
    if (gen->parsed()) return cmd_gen(go, out, err);
    if (bench->parsed()) return cmd_bench(bo, out, err);
    if (info->parsed()) return cmd_info(info_input, out, err);
  } catch (const invalid_polyhedron& e) {
    for (const auto& x : e.defects()) err << "defect: " << x.message << "\n";
    return exit_usage;
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_usage;
  } catch (const gen::infeasible_spec& e) {
    err << "infeasible spec: " << e.what() << "\n";
    return exit_usage;
  } catch (const dimension_mismatch& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const precondition_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_usage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"isoembed"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace isoembed::cli

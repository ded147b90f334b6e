#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isoembed/cli.hpp"
#include "isoembed/io.hpp"

using namespace isoembed;
namespace fs = std::filesystem;

namespace {

struct result {
  int code;
  std::string out, err;
};

result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("isoembed_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    unsetenv(cli::backend_env);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST(Io, PolyhedronFileRoundTripIsByteStable) {
  gen::gen_spec spec;
  spec.dim = 2;
  spec.seed = 4;
  auto f = io::to_file(gen::random_polyhedron(spec), std::size_t{3});
  f.partial_embedding = io::coordinate_map{{"v0", {"1/3", "-2", "0.5", "1e-3", "0", "7"}}};
  const auto text = io::serialize(f);
  const auto back = io::parse_polyhedron_file(text);
  EXPECT_EQ(back, f);
  EXPECT_EQ(io::serialize(back), text);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Io, EmbeddingFileRoundTripIsByteStable) {
  const indefinite_metric_polyhedron<rational> p(gen::simplex_skeleton(3));
  const auto tau = embed_polyhedron(p);
  const auto report = verify_embedding(p, tau);
  io::embedding_file ef;
  ef.d = tau.d;
  ef.backend = "rational";
  ef.assignment = io::to_coordinates(p, tau);
  ef.meta = tau.meta;
  ef.report = io::to_json(p, report);
  const auto text = io::serialize(ef);
  const auto back = io::parse_embedding_file(text);
  EXPECT_EQ(back, ef);
  EXPECT_EQ(io::serialize(back), text);
  EXPECT_EQ(io::from_coordinates(p, back.assignment, back.d).images, tau.images);
  EXPECT_EQ(io::parse_report(p, *back.report), report);
}

TEST(Io, LiteralsAndBackends) {
  EXPECT_EQ(parse_scalar<rational>("0.125"), rational(1, 8));
  EXPECT_EQ(parse_scalar<rational>("-3/6"), rational(-1, 2));
  EXPECT_EQ(parse_scalar<rational>("25e-1"), rational(5, 2));
  EXPECT_EQ(parse_scalar<double>("1/4"), 0.25);
  EXPECT_TRUE(is_rational_literal("-7/3"));
  EXPECT_FALSE(is_rational_literal("0.5"));
  EXPECT_THROW(parse_scalar<rational>("abc"), parse_error);
  EXPECT_THROW(parse_scalar<rational>("1/0"), parse_error);
}

TEST(Io, MalformedFilesAreParseErrors) {
  EXPECT_THROW(io::parse_polyhedron_file(std::string("{")), parse_error);
  EXPECT_THROW(io::parse_polyhedron_file(std::string(R"({"version":"other"})")), parse_error);
  EXPECT_THROW(io::parse_polyhedron_file(std::string(R"({"version":"isoembed-polyhedron/1","vertices":[1]})")), parse_error);
  const indefinite_metric_polyhedron<rational> p(gen::simplex_skeleton(1));
  EXPECT_THROW(io::from_coordinates(p, {{"zz", {"0", "0"}}}, 1), parse_error);
  EXPECT_THROW(io::from_coordinates(p, {{"v0", {"0"}}}, 1), parse_error);
}

TEST_F(CliTest, EmbedCompleteSkeletonRationalHasZeroResiduals) {
  ASSERT_EQ(run({"gen", "--kind", "complete", "--d", "3", "--out", path("k4.json")}).code, 0);
  const auto r = run({"embed", path("k4.json"), "--backend", "rational"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ef = io::parse_embedding_file(r.out);
  EXPECT_EQ(ef.backend, "rational");
  EXPECT_EQ(ef.d, 3u);
  const auto& residuals = (*ef.report)["isometry"]["residuals"];
  EXPECT_EQ(residuals.size(), 6u);
  for (const auto& x : residuals) EXPECT_EQ(x["residual"], "0");
}

TEST_F(CliTest, DimensionBelowDegeneracyIsUsageError) {
  run({"gen", "--kind", "complete", "--d", "4", "--out", path("k5.json")});
  const auto r = run({"embed", path("k5.json"), "--d", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("d=2"), std::string::npos);
  EXPECT_NE(r.err.find("degeneracy 4"), std::string::npos);
}

TEST_F(CliTest, SameSeedIsByteIdentical) {
  run({"gen", "--kind", "degenerate", "--n", "40", "--bound", "3", "--seed", "2", "--out", path("g.json")});
  for (const char* backend : {"rational", "float"}) {
    const auto a = run({"embed", path("g.json"), "--backend", backend, "--seed", "5"});
    const auto b = run({"embed", path("g.json"), "--backend", backend, "--seed", "5"});
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, BackendSelection) {
  run({"gen", "--kind", "complete", "--d", "2", "--out", path("k3.json")});
  EXPECT_EQ(io::parse_embedding_file(run({"embed", path("k3.json")}).out).backend, "rational");
  setenv(cli::backend_env, "float", 1);
  EXPECT_EQ(io::parse_embedding_file(run({"embed", path("k3.json")}).out).backend, "float");
  EXPECT_EQ(io::parse_embedding_file(run({"embed", path("k3.json"), "--backend", "rational"}).out).backend,
            "rational");
  unsetenv(cli::backend_env);
  auto text = read(path("k3.json"));
  text.replace(text.find("\"1\""), 3, "\"1.0\"");
  write("k3dec.json", text);
  EXPECT_EQ(io::parse_embedding_file(run({"embed", path("k3dec.json")}).out).backend, "float");
}

TEST_F(CliTest, VerifyPassFailAndTolerance) {
  run({"gen", "--kind", "complete", "--d", "3", "--out", path("k4.json")});
  write("e.json", run({"embed", path("k4.json"), "--backend", "rational"}).out);
  EXPECT_EQ(run({"verify", path("k4.json"), path("e.json")}).code, 0);
  EXPECT_EQ(run({"verify", path("k4.json"), path("e.json"), "--tol", "0"}).code, 0);

  write("f.json", run({"embed", path("k4.json"), "--backend", "float"}).out);
  EXPECT_EQ(run({"verify", path("k4.json"), path("f.json")}).code, 0);
  const int strict = run({"verify", path("k4.json"), path("f.json"), "--tol", "0"}).code;
  EXPECT_TRUE(strict == 0 || strict == 3);

  auto ef = io::parse_embedding_file(read(path("e.json")));
  ef.assignment["v2"][0] = "12345";
  write("bad.json", io::serialize(ef));
  const auto r = run({"verify", path("k4.json"), path("bad.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("v2"), std::string::npos);
  const auto report = io::json::parse(r.out);
  EXPECT_FALSE(report["pass"].get<bool>());
  const auto worst = report["isometry"]["worst_edge"];
  EXPECT_TRUE(worst[0] == "v2" || worst[1] == "v2");
}

TEST_F(CliTest, VerifyIdMismatch) {
  run({"gen", "--kind", "complete", "--d", "3", "--out", path("k4.json")});
  auto ef = io::parse_embedding_file(run({"embed", path("k4.json")}).out);
  auto renamed = ef;
  renamed.assignment["w9"] = renamed.assignment["v0"];
  renamed.assignment.erase("v0");
  write("renamed.json", io::serialize(renamed));
  EXPECT_EQ(run({"verify", path("k4.json"), path("renamed.json")}).code, 2);
  ef.assignment.erase("v1");
  write("missing.json", io::serialize(ef));
  EXPECT_EQ(run({"verify", path("k4.json"), path("missing.json")}).code, 2);
}

TEST_F(CliTest, ExtendRoundTrips) {
  run({"gen", "--kind", "bounded", "--n", "20", "--bound", "4", "--seed", "6", "--out", path("g.json")});
  const auto full = io::parse_embedding_file(run({"embed", path("g.json"), "--backend", "float", "--d", "4"}).out);
  auto pf = io::parse_polyhedron_file(read(path("g.json")));

  // partial map = full map
  pf.partial_embedding = full.assignment;
  write("full.json", io::serialize(pf));
  auto r = run({"extend", path("full.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::parse_embedding_file(r.out).assignment, full.assignment);

  // truncated map
  io::coordinate_map half;
  std::size_t i = 0;
  for (const auto& [id, c] : full.assignment)
    if (i++ % 2 == 0) half[id] = c;
  pf.partial_embedding = half;
  write("half.json", io::serialize(pf));
  r = run({"extend", path("half.json"), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = io::parse_embedding_file(r.out);
  EXPECT_EQ(out.assignment.size(), full.assignment.size());
  for (const auto& [id, c] : half) EXPECT_EQ(out.assignment.at(id), c);
  EXPECT_TRUE((*out.report)["isometry"]["pass"].get<bool>());

  write("ext.json", r.out);
  EXPECT_EQ(run({"verify", path("g.json"), path("ext.json")}).code, 0);
}

TEST_F(CliTest, ExtendViolatedLengthPrintsWitness) {
  run({"gen", "--kind", "complete", "--d", "3", "--out", path("k4.json")});
  const auto full = io::parse_embedding_file(run({"embed", path("k4.json"), "--backend", "float"}).out);
  auto pf = io::parse_polyhedron_file(read(path("k4.json")));
  auto partial = full.assignment;
  partial.erase("v3");
  partial["v1"][0] = "99";
  pf.partial_embedding = partial;
  write("bad.json", io::serialize(pf));
  const auto r = run({"extend", path("bad.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("witness"), std::string::npos);
  EXPECT_NE(r.err.find("v1"), std::string::npos);
}

TEST_F(CliTest, ExtendRejectsRationalBackendAndMissingPartial) {
  run({"gen", "--kind", "complete", "--d", "3", "--out", path("k4.json")});
  EXPECT_EQ(run({"extend", path("k4.json")}).code, 2);
  auto pf = io::parse_polyhedron_file(read(path("k4.json")));
  pf.partial_embedding = io::coordinate_map{};
  write("p.json", io::serialize(pf));
  EXPECT_EQ(run({"extend", path("p.json"), "--backend", "rational"}).code, 2);
  EXPECT_EQ(run({"extend", path("p.json")}).code, 0);
}

TEST_F(CliTest, GenCompleteGivesK5) {
  const auto r = run({"gen", "--kind", "complete", "--d", "4"});
  ASSERT_EQ(r.code, 0);
  const auto f = io::parse_polyhedron_file(r.out);
  EXPECT_EQ(f.data.vertices.size(), 5u);
  EXPECT_EQ(f.data.squared_lengths.size(), 10u);
  EXPECT_EQ(f.d, std::optional<std::size_t>(4));
  EXPECT_EQ(run({"gen", "--kind", "bounded", "--bound", "0"}).code, 2);
}

TEST_F(CliTest, BenchShape) {
  const auto r = run({"bench", "--n", "100,1000", "--d", "4,8"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, cli::bench_header);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].rfind("100,4,float,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("1000,8,float,", 0), 0u);
  for (const auto& row : rows) EXPECT_LE(std::stod(row.substr(row.rfind(',') + 1)), 1e-9);
}

TEST_F(CliTest, InfoAndUsageErrors) {
  run({"gen", "--kind", "mesh", "--rows", "3", "--cols", "3", "--out", path("m.json")});
  const auto r = run({"info", path("m.json")});
  ASSERT_EQ(r.code, 0);
  const auto j = io::json::parse(r.out);
  EXPECT_EQ(j["vertices"], 9);
  EXPECT_EQ(j["dimension"], 2);

  auto pf = io::parse_polyhedron_file(read(path("m.json")));
  pf.data.squared_lengths.pop_back();
  write("broken.json", io::serialize(pf));
  EXPECT_EQ(run({"info", path("broken.json")}).code, 2);
  EXPECT_EQ(run({"embed", path("broken.json")}).code, 2);

  write("junk.json", "not json");
  EXPECT_EQ(run({"embed", path("junk.json")}).code, 2);
  EXPECT_EQ(run({"embed", path("absent.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"embed", path("m.json"), "--backend", "quad"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "specspan/error.hpp"
#include "specspan/io.hpp"

using namespace specspan;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "specspan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("specspan_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_text(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

VectorFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_vector_file(in);
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("parse_vector_file basics") {
  const VectorFile f = parse("# hello\n1, 2.5, -3e-2\n+4,5,6\n\n# tail\n");
  REQUIRE(f.vectors.size() == 2);
  CHECK(f.vectors.dim() == 3);
  CHECK(f.vectors[0][1] == 2.5);
  CHECK(f.vectors[0][2] == -0.03);
  CHECK(f.vectors[1][0] == 4.0);
  CHECK_FALSE(f.parts.has_value());
  REQUIRE(f.comments.size() == 2);
  CHECK(f.comments[0] == "hello");

  const VectorFile p = parse("# layout: partitioned\n0,1,0\n0,0,1\n1,1,1\n");
  REQUIRE(p.parts.has_value());
  CHECK(*p.parts == std::vector<std::size_t>{0, 0, 1});
  CHECK(p.vectors.dim() == 2);
}

TEST_CASE("parse_vector_file errors") {
  CHECK(parse_error("1,2\n3\n") == ErrorCode::Parse);
  CHECK(parse_error("1,abc\n") == ErrorCode::Parse);
  CHECK(parse_error("1,2,\n") == ErrorCode::Parse);
  CHECK(parse_error("1,2\n1,inf\n") == ErrorCode::Parse);
  CHECK(parse_error("# only comments\n") == ErrorCode::Parse);
  CHECK_NOTHROW(parse("1,5\n\n"));
  CHECK(parse_error("# layout: partitioned\n-1,2,3\n") == ErrorCode::BadPartColumn);
  CHECK(parse_error("# layout: partitioned\n0.5,2,3\n") == ErrorCode::BadPartColumn);
  CHECK_THROWS_AS(read_vector_file((scratch() / "missing.csv").string()), Error);
}

TEST_CASE("vector files round-trip exactly") {
  Rng rng(8);
  VectorFile f;
  f.vectors = VectorSet(4);
  for (int i = 0; i < 50; ++i) {
    Vec v(4);
    for (double& x : v) x = rng.normal() * std::pow(10.0, rng.normal() * 30.0);
    f.vectors.push_back(v);
  }
  Vec extremes{std::numeric_limits<double>::min(), std::numeric_limits<double>::max(), -0.0, 0.1};
  f.vectors.push_back(extremes);
  f.comments = {" generated"};
  std::ostringstream out;
  write_vector_file(out, f);
  const VectorFile back = parse(out.str());
  REQUIRE(back.vectors.size() == f.vectors.size());
  for (std::size_t i = 0; i < f.vectors.size(); ++i) CHECK(back.vectors.vector(i) == f.vectors.vector(i));

  f.parts = std::vector<std::size_t>(f.vectors.size(), 3);
  std::ostringstream out2;
  write_vector_file(out2, f);
  const VectorFile back2 = parse(out2.str());
  REQUIRE(back2.parts.has_value());
  CHECK(*back2.parts == *f.parts);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("cli gen") {
  const std::string path = (scratch() / "s.csv").string();
  CliResult r = cli({"gen", "sphere", "--d", "3", "--n", "5", "--seed", "1", "--out", path});
  REQUIRE(r.code == 0);
  const VectorFile s = read_vector_file(path);
  CHECK(s.vectors.size() == 5);
  CHECK(s.vectors.dim() == 3);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(norm(s.vectors[i]) - 1.0) <= 1e-12);

  const std::string pm = (scratch() / "pm.csv").string();
  // 20 vectors with |cos| <= 1/4 do not exist in dimension 8 (relative bound gives at most 15)
  CHECK(cli({"gen", "pm1", "--d", "8", "--n", "20", "--seed", "2", "--out", pm}).code == 3);
  REQUIRE(cli({"gen", "pm1", "--d", "8", "--n", "5", "--seed", "2", "--out", pm}).code == 0);
  const VectorFile p = read_vector_file(pm);
  CHECK(p.vectors.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (double x : p.vectors[i]) CHECK(std::abs(x) == 1.0);

  const std::string hard = (scratch() / "hard.csv").string();
  REQUIRE(cli({"gen", "hard", "--d", "16", "--beta", "1", "--n-override", "256", "--seed", "7", "--out", hard}).code == 0);
  const VectorFile h = read_vector_file(hard);
  REQUIRE(h.parts.has_value());
  std::size_t max_part = 0;
  for (std::size_t id : *h.parts) max_part = std::max(max_part, id);
  CHECK(max_part + 1 == 16);
  bool header = false;
  for (const auto& c : h.comments) header = header || c.find("m=6") != std::string::npos;
  CHECK(header);

  CHECK(cli({"gen", "sphere", "--d", "3"}).code == 2);
  CHECK(cli({"gen", "sphere", "--d", "x", "--n", "2", "--out", path}).code == 2);
  CHECK(cli({"gen", "hard", "--d", "5", "--n-override", "4", "--out", hard}).code == 3);
  CHECK(cli({"gen", "pm1", "--d", "2", "--n", "3", "--out", pm}).code == 3);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("cli spanner") {
  const std::string basis = write_text("basis.csv", "1,0,0\n0,1,0\n0,0,1\n");
  const std::string rep = (scratch() / "sp.json").string();
  CliResult r = cli({"spanner", "--input", basis, "--verify", "strong", "--out", rep});
  REQUIRE(r.code == 0);
  CHECK(r.out == "size 3\nverdict pass\n");
  const auto j = nlohmann::json::parse(slurp(rep));
  CHECK(j.contains("version"));

  const std::string rnd = (scratch() / "r8.csv").string();
  REQUIRE(cli({"gen", "sphere", "--d", "8", "--n", "200", "--seed", "3", "--out", rnd}).code == 0);
  r = cli({"spanner", "--input", rnd, "--verify", "weak"});
  CHECK(r.code == 0);
  CHECK(r.out.find("verdict pass") != std::string::npos);

  CHECK(cli({"spanner", "--input", basis, "--alpha", "0.5"}).code == 2);
  CHECK(cli({"spanner", "--input", basis, "--alpha", "2", "--alpha-scale", "2"}).code == 2);
  CHECK(cli({"spanner", "--input", basis, "--verify", "maybe"}).code == 2);

  // verification against a stricter alpha than the one used to build fails with 4
  const std::string sum = write_text("sum.csv", "1,0\n0,1\n1,1\n");
  r = cli({"spanner", "--input", sum, "--alpha", "4", "--verify", "weak", "--verify-alpha", "3.9"});
  CHECK(r.out.find("size 2") != std::string::npos);
  CHECK(r.code == 4);
  CHECK(r.out.find("verdict fail") != std::string::npos);
  CHECK_FALSE(r.err.empty());

  const std::string idx = (scratch() / "idx.txt").string();
  REQUIRE(cli({"spanner", "--input", sum, "--alpha", "4", "--indices-out", idx}).code == 0);
  CHECK(slurp(idx) == "0\n1\n");
}

TEST_CASE("cli detmax") {
  const std::string toy = write_text("toy.csv", "1,0\n2,0\n0,1\n");
  CliResult r = cli({"detmax", "--input", toy, "--k", "2", "--method", "brute"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["solution"]["value"].get<double>() == doctest::Approx(4.0));
  CHECK(j["solution"]["indices"] == nlohmann::json::array({1, 2}));

  r = cli({"detmax", "--input", toy, "--k", "1", "--method", "fw-round"});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());

  const std::string rnd = (scratch() / "r3.csv").string();
  REQUIRE(cli({"gen", "sphere", "--d", "3", "--n", "12", "--seed", "5", "--out", rnd}).code == 0);
  const CliResult a = cli({"detmax", "--input", rnd, "--method", "fw-round", "--trials", "300", "--seed", "9"});
  const CliResult b = cli({"detmax", "--input", rnd, "--method", "fw-round", "--trials", "300", "--seed", "9"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  const std::string big = (scratch() / "big.csv").string();
  REQUIRE(cli({"gen", "sphere", "--d", "30", "--n", "200", "--seed", "1", "--out", big}).code == 0);
  CHECK(cli({"detmax", "--input", big, "--k", "20", "--method", "brute"}).code == 3);
  CHECK(cli({"detmax", "--input", toy, "--k", "5"}).code == 2);
}

TEST_CASE("cli pipeline") {
  const std::string basis = write_text("b4.csv", "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n");
  CliResult r = cli({"pipeline", "--input", basis, "--parts", "4", "--solver", "brute"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["ratio"].get<double>() == doctest::Approx(1.0));
  for (const char* key : {"config", "parts", "coreset_sizes", "union_size", "objective", "reference", "ratio",
                          "guarantee", "comm_bytes", "timings_ms", "seed", "version"})
    CHECK(j.contains(key));
  CHECK(j["version"] == "1");
  CHECK(j["reference"]["kind"] == "brute");

  const std::string rnd = (scratch() / "r60.csv").string();
  REQUIRE(cli({"gen", "sphere", "--d", "4", "--n", "60", "--seed", "11", "--out", rnd}).code == 0);
  const std::string rep = (scratch() / "pl.json").string();
  r = cli({"pipeline", "--input", rnd, "--parts", "3", "--k", "4", "--solver", "brute", "--seed", "1", "--report", rep});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(slurp(rep));
  CHECK(j["ratio"].get<double>() >= j["guarantee"].get<double>());
  CHECK(j["ratio"].get<double>() <= 1.0 + 1e-9);

  // same seed, same report apart from timings
  const std::string rep2 = (scratch() / "pl2.json").string();
  REQUIRE(cli({"pipeline", "--input", rnd, "--parts", "3", "--k", "4", "--solver", "brute", "--seed", "1", "--report", rep2}).code == 0);
  auto j2 = nlohmann::json::parse(slurp(rep2));
  j.erase("timings_ms");
  j2.erase("timings_ms");
  CHECK(j == j2);

  const std::string hard = (scratch() / "hard8.csv").string();
  REQUIRE(cli({"gen", "hard", "--d", "8", "--n-override", "30", "--seed", "3", "--out", hard}).code == 0);
  r = cli({"pipeline", "--input", hard});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  REQUIRE(j.contains("planted_survival"));
  CHECK(j["planted_survival"].is_array());
  CHECK(j["parts"].size() == 8);

  CHECK(cli({"pipeline", "--input", rnd, "--k", "2", "--solver", "fw-round"}).code == 3);
  CHECK(cli({"pipeline", "--input", rnd, "--scheme", "zigzag"}).code == 2);
  CHECK(cli({"pipeline", "--input", (scratch() / "nope.csv").string()}).code == 1);
  CHECK(cli({"pipeline", "--input", rnd, "--block-size", "20", "--solver", "brute"}).code == 0);
}

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "specspan/coreset.hpp"
#include "specspan/detmax.hpp"
#include "specspan/error.hpp"
#include "specspan/hardgen.hpp"
#include "specspan/io.hpp"
#include "specspan/report.hpp"
#include "specspan/spanner.hpp"

namespace specspan {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitFlags = 2;
constexpr int kExitGuard = 3;
constexpr int kExitVerify = 4;

constexpr const char* kPlantedPrefix = "planted:";

/// Raised for flag values CLI11 cannot validate on its own.
struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenOpts {
  std::size_t d = 0;
  std::size_t n = 0;
  double beta = 1.0;
  double big_m = kDefaultBigM;
  std::optional<std::size_t> n_override;
  std::uint64_t seed = 0;
  std::string out;
};

struct SpannerOpts {
  std::string input;
  std::size_t k = 0;
  std::optional<double> alpha;
  double alpha_scale = 1.0;
  std::optional<std::size_t> m;
  std::optional<double> verify_alpha;
  std::string verify = "none";
  std::string out;
  std::string indices_out;
};

struct DetmaxOpts {
  std::string input;
  std::size_t k = 0;
  std::string method = "greedy";
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

struct PipelineOpts {
  std::string input;
  std::optional<std::size_t> parts;
  std::string scheme = "rr";
  std::size_t k = 0;
  std::string solver = "greedy";
  std::optional<double> alpha;
  double alpha_scale = 1.0;
  std::optional<std::size_t> m;
  std::optional<std::size_t> block_size;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string report;
};

std::size_t thread_limit() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THREADS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
      throw FlagError("THREADS must be a positive integer");
    n = v;
  }
  return n;
}

void emit(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  f << j.dump(2) << '\n';
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::vector<std::size_t> planted_from(const VectorFile& file) {
  std::vector<std::size_t> out;
  for (const auto& c : file.comments) {
    if (c.rfind(kPlantedPrefix, 0) != 0) continue;
    std::istringstream in(c.substr(std::string(kPlantedPrefix).size()));
    for (std::size_t i; in >> i;) out.push_back(i);
  }
  return out;
}

void check_alpha(const std::optional<double>& alpha) {
  if (alpha && !(*alpha >= 1.0)) throw FlagError("--alpha must be >= 1");
}

int cmd_gen(const std::string& kind, const GenOpts& o, std::ostream& err) {
  VectorFile file;
  if (kind == "sphere") {
    if (o.d < 1 || o.n < 1) throw FlagError("--d and --n must be >= 1");
    file.vectors = sample_sphere(o.n, o.d, o.seed);
    file.comments.push_back("sphere d=" + std::to_string(o.d) + " n=" + std::to_string(o.n) +
                            " seed=" + std::to_string(o.seed));
  } else if (kind == "pm1") {
    if (o.d < 1 || o.n < 1) throw FlagError("--d and --n must be >= 1");
    file.vectors = gen_pm1_lowerbound(o.d, o.n, o.seed);
    file.comments.push_back("pm1 d=" + std::to_string(o.d) + " n=" + std::to_string(o.n) +
                            " seed=" + std::to_string(o.seed));
  } else {
    if (!(o.beta >= 1.0)) throw FlagError("--beta must be >= 1");
    if (!(o.big_m > 0.0)) throw FlagError("--M must be positive");
    const HardInstance inst = gen_hard_instance(o.d, o.beta, o.big_m, o.seed, o.n_override);
    file.vectors = inst.vectors;
    file.parts = inst.part_ids;
    file.comments.push_back(kPartitionedMarker);
    file.comments.push_back("hard d=" + std::to_string(inst.d) + " m=" + std::to_string(inst.m) +
                            " x_sets=" + std::to_string(inst.x_sets()) + " y_sets=" + std::to_string(inst.m) +
                            " parts=" + std::to_string(inst.d) + " n_per_set=" + std::to_string(inst.n_per_set) +
                            " beta=" + format_double(inst.beta) + " M=" + format_double(inst.big_m) +
                            " seed=" + std::to_string(inst.seed));
    std::string planted = kPlantedPrefix;
    for (std::size_t p : inst.planted) planted += " " + std::to_string(p);
    file.comments.push_back(planted);
  }
  if (o.out.empty()) throw FlagError("--out is required");
  write_vector_file(o.out, file);
  err << "wrote " << file.vectors.size() << " vectors of dimension " << file.vectors.dim() << " to " << o.out
      << '\n';
  return kExitOk;
}

int cmd_spanner(const SpannerOpts& o, std::ostream& out, std::ostream& err) {
  check_alpha(o.alpha);
  check_alpha(o.verify_alpha);
  const VectorFile file = read_vector_file(o.input);
  const VectorSet& vs = file.vectors;
  SpannerParams params;
  params.k = o.k;
  params.alpha = o.alpha;
  params.alpha_scale = o.alpha_scale;
  params.m_override = o.m;
  const Spanner sp = build_k_spanner(vs, params);
  const std::size_t k = o.k == 0 ? vs.dim() : o.k;

  nlohmann::json config = {{"input", o.input}, {"k", k}, {"alpha_scale", o.alpha_scale}, {"verify", o.verify}};
  if (o.alpha) config["alpha"] = *o.alpha;
  if (o.m) config["m"] = *o.m;
  nlohmann::json verify = {{"mode", o.verify}};
  std::string verdict = "skipped";
  bool failed = false;

  if (o.verify == "weak") {
    const double a = o.verify_alpha.value_or(sp.alpha);
    const auto w = verify_weak(vs, sp.indices, a);
    verify["alpha"] = a;
    verify["ok"] = w.ok;
    if (!w.ok) verify["violating_index"] = *w.violating_index;
    verdict = w.ok ? "pass" : "fail";
    failed = !w.ok;
  } else if (o.verify == "strong") {
    const double a = o.verify_alpha.value_or(sp.alpha);
    nlohmann::json certs = nlohmann::json::array();
    std::size_t inconclusive = 0;
    try {
      for (const auto& c : certify_spanner(vs, sp.indices, a)) {
        const bool ok = c.status == CertificateStatus::Certified;
        inconclusive += ok ? 0 : 1;
        nlohmann::json support = nlohmann::json::array();
        for (auto [idx, p] : c.support) support.push_back({idx, p});
        certs.push_back({{"vector", c.vector_index},
                         {"delta", c.delta},
                         {"status", ok ? "certified" : "inconclusive"},
                         {"support", support}});
      }
      verdict = inconclusive == 0 ? "pass" : "inconclusive";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInSpan) throw;
      verdict = "fail";
      failed = true;
      verify["error"] = e.what();
    }
    verify["alpha"] = a;
    verify["inconclusive"] = inconclusive;
    verify["certificates"] = certs;
  } else if (o.verify == "k") {
    const double lk = 1.0 + std::log(static_cast<double>(k));
    const double a = o.verify_alpha.value_or(32.0 * static_cast<double>(k) * lk * lk * lk);
    const auto kv = verify_k_spanner(vs, sp, k, a);
    const auto orth = check_orthogonal_component(vs, sp, k);
    verify["alpha"] = a;
    verify["ok"] = kv.ok;
    verify["failures"] = kv.failures;
    verify["min_margin"] = kv.min_margin;
    verify["orthogonal_component_ok"] = orth.ok;
    verdict = kv.ok && orth.ok ? "pass" : "fail";
    failed = verdict == "fail";
  } else if (o.verify != "none") {
    throw FlagError("--verify must be none, weak, strong or k");
  }
  verify["verdict"] = verdict;
  if (!sp.d_stage.empty()) verify["witness_dominance"] = check_witness_dominance(vs, sp);

  const nlohmann::json report = {
      {"config", config}, {"spanner", spanner_json(sp)}, {"verification", verify}, {"version", kReportVersion}};
  if (!o.out.empty()) emit(report, o.out, out);
  if (!o.indices_out.empty()) {
    std::ofstream f(o.indices_out);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + o.indices_out);
    for (std::size_t i : sp.indices) f << i << '\n';
  }
  out << "size " << sp.size() << '\n' << "verdict " << verdict << '\n';
  if (failed) {
    err << "verification failed\n";
    return kExitVerify;
  }
  return kExitOk;
}

SolverKind solver_from(const std::string& s) {
  if (s == "brute") return SolverKind::Brute;
  if (s == "greedy") return SolverKind::GreedyLocal;
  if (s == "fw-round") return SolverKind::FwRound;
  throw FlagError("solver must be brute, greedy or fw-round");
}

int cmd_detmax(const DetmaxOpts& o, std::ostream& out) {
  const SolverKind kind = solver_from(o.method);
  if (o.trials < 1) throw FlagError("--trials must be >= 1");
  const VectorFile file = read_vector_file(o.input);
  const VectorSet& vs = file.vectors;
  const std::size_t k = o.k == 0 ? vs.dim() : o.k;
  if (k > vs.dim()) throw FlagError("--k must not exceed the dimension");
  nlohmann::json report = {
      {"config", {{"input", o.input}, {"k", k}, {"method", o.method}, {"trials", o.trials}, {"seed", o.seed}}},
      {"seed", o.seed},
      {"version", kReportVersion}};
  if (kind == SolverKind::FwRound) {
    if (k != vs.dim())
      throw Error(ErrorCode::KOutOfRange, "fw-round needs k = d (the fractional relaxation is implemented for k = d)");
    const auto frac = fractional_detmax(vs);
    const auto r = nikolov_round(vs, frac, k, o.trials, o.seed);
    report["solution"] = solution_json(r.best);
    report["fractional"] = {{"objective", frac.objective}, {"iterations", frac.iterations}, {"weights", frac.weights}};
    report["rounding"] = {{"mean", r.mean}, {"std_error", r.std_error}, {"trials", r.trials}};
  } else {
    PipelineOptions po;
    po.solver = kind;
    po.seed = o.seed;
    report["solution"] = solution_json(solve(vs, k, po));
  }
  out << report.dump(2) << '\n';
  if (!o.out.empty()) emit(report, o.out, out);
  return kExitOk;
}

int cmd_pipeline(const PipelineOpts& o, std::ostream& out) {
  check_alpha(o.alpha);
  const SolverKind kind = solver_from(o.solver);
  VectorFile file = read_vector_file(o.input);
  const std::size_t n = file.vectors.size();
  const std::size_t d = file.vectors.dim();
  const std::size_t k = o.k == 0 ? d : o.k;
  if (k > d) throw FlagError("--k must not exceed the dimension");
  if (kind == SolverKind::FwRound && k != d) throw Error(ErrorCode::KOutOfRange, "fw-round needs k = d");

  PipelineOptions po;
  po.k = k;
  po.spanner.k = k;
  po.spanner.alpha = o.alpha;
  po.spanner.alpha_scale = o.alpha_scale;
  po.spanner.m_override = o.m;
  po.solver = kind;
  po.seed = o.seed;
  po.threads = thread_limit();
  po.rounding_trials = o.trials;

  nlohmann::json config = {{"input", o.input}, {"k", k}, {"solver", o.solver}, {"alpha_scale", o.alpha_scale},
                           {"n", n}, {"d", d}};
  if (o.alpha) config["alpha"] = *o.alpha;
  if (o.m) config["m"] = *o.m;

  PipelineReport rep;
  if (o.block_size) {
    config["block_size"] = *o.block_size;
    rep = stream_pipeline(file.vectors, *o.block_size, po);
  } else {
    PartitionedInput input;
    if (file.parts && !o.parts) {
      config["scheme"] = "file";
      input = partition(std::move(file.vectors), 0, PartitionScheme::FromFile, o.seed, *file.parts);
    } else {
      const std::size_t p = o.parts.value_or(1);
      if (p < 1) throw FlagError("--parts must be >= 1");
      if (o.scheme != "rr" && o.scheme != "hash") throw FlagError("--scheme must be rr or hash");
      config["scheme"] = o.scheme;
      config["parts"] = p;
      input = partition(std::move(file.vectors), p,
                        o.scheme == "rr" ? PartitionScheme::RoundRobin : PartitionScheme::Hash, o.seed);
    }
    rep = run_pipeline(input, po);
  }

  nlohmann::json report = pipeline_report_json(rep, config);
  if (const auto planted = planted_from(file); !planted.empty()) {
    nlohmann::json survival = nlohmann::json::array();
    for (std::size_t p : planted) {
      bool kept = std::find(rep.union_indices.begin(), rep.union_indices.end(), p) != rep.union_indices.end();
      survival.push_back(kept);
    }
    report["planted_survival"] = survival;
  }
  emit(report, o.report, out);
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooLarge:
    case ErrorCode::KOutOfRange:
    case ErrorCode::Degenerate:
    case ErrorCode::DimensionTooSmall:
    case ErrorCode::SamplingFailed:
      return kExitGuard;
    default:
      return kExitOther;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral spanners and composable core-sets for determinant maximization", "specspan"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a vector file");
  gen_cmd->require_subcommand(1);
  auto* sphere = gen_cmd->add_subcommand("sphere", "uniform samples from the unit sphere");
  auto* hard = gen_cmd->add_subcommand("hard", "planted hard instance for core-sets (partitioned)");
  auto* pm1 = gen_cmd->add_subcommand("pm1", "random +-1 vectors with bounded pairwise inner products");
  for (auto* c : {sphere, pm1}) {
    c->add_option("--d", gen.d, "dimension")->required();
    c->add_option("--n", gen.n, "number of vectors")->required();
  }
  hard->add_option("--d", gen.d, "dimension")->required();
  hard->add_option("--beta", gen.beta, "size exponent, n = d^(beta+2)");
  hard->add_option("--M", gen.big_m, "norm of the Y vectors");
  hard->add_option("--n-override", gen.n_override, "vectors per X set");
  for (auto* c : {sphere, hard, pm1}) {
    c->add_option("--seed", gen.seed, "random seed");
    c->add_option("--out", gen.out, "output file")->required();
  }

  SpannerOpts sp;
  auto* sp_cmd = app.add_subcommand("spanner", "build and optionally verify a spectral spanner");
  sp_cmd->add_option("--input", sp.input, "vector file")->required();
  sp_cmd->add_option("--k", sp.k, "order k (default d)");
  auto* sp_alpha = sp_cmd->add_option("--alpha", sp.alpha, "domination factor");
  sp_cmd->add_option("--alpha-scale", sp.alpha_scale, "constant C in alpha = C d (1 + ln d)^2")->excludes(sp_alpha);
  sp_cmd->add_option("--m", sp.m, "volume-greedy subspace dimension");
  sp_cmd->add_option("--verify", sp.verify, "none|weak|strong|k");
  sp_cmd->add_option("--verify-alpha", sp.verify_alpha, "alpha used by the verification");
  sp_cmd->add_option("--out", sp.out, "JSON report");
  sp_cmd->add_option("--indices-out", sp.indices_out, "spanner indices, one per line");

  DetmaxOpts dm;
  auto* dm_cmd = app.add_subcommand("detmax", "offline k-determinant maximization");
  dm_cmd->add_option("--input", dm.input, "vector file")->required();
  dm_cmd->add_option("--k", dm.k, "subset size (default d)");
  dm_cmd->add_option("--method", dm.method, "brute|greedy|fw-round");
  dm_cmd->add_option("--trials", dm.trials, "rounding trials for fw-round");
  dm_cmd->add_option("--seed", dm.seed, "random seed");
  dm_cmd->add_option("--out", dm.out, "JSON report");

  PipelineOpts pl;
  auto* pl_cmd = app.add_subcommand("pipeline", "composable core-set pipeline");
  pl_cmd->add_option("--input", pl.input, "vector file")->required();
  pl_cmd->add_option("--parts", pl.parts, "number of parts (ignored for partitioned files unless given)");
  pl_cmd->add_option("--scheme", pl.scheme, "rr|hash");
  pl_cmd->add_option("--k", pl.k, "subset size (default d)");
  pl_cmd->add_option("--solver", pl.solver, "brute|greedy|fw-round");
  auto* pl_alpha = pl_cmd->add_option("--alpha", pl.alpha, "spanner domination factor");
  pl_cmd->add_option("--alpha-scale", pl.alpha_scale, "constant C in alpha = C d (1 + ln d)^2")->excludes(pl_alpha);
  pl_cmd->add_option("--m", pl.m, "volume-greedy subspace dimension");
  pl_cmd->add_option("--block-size", pl.block_size, "stream in blocks of this size instead of partitioning");
  pl_cmd->add_option("--trials", pl.trials, "rounding trials for fw-round");
  pl_cmd->add_option("--seed", pl.seed, "random seed");
  pl_cmd->add_option("--report", pl.report, "JSON report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFlags;
  }

  try {
    if (gen_cmd->parsed()) {
      const std::string kind = sphere->parsed() ? "sphere" : hard->parsed() ? "hard" : "pm1";
      return cmd_gen(kind, gen, err);
    }
    if (sp_cmd->parsed()) return cmd_spanner(sp, out, err);
    if (dm_cmd->parsed()) return cmd_detmax(dm, out);
    if (pl_cmd->parsed()) return cmd_pipeline(pl, out);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlags;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace specspan

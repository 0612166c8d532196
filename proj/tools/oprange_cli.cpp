#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oprange/acceptance.hpp"
#include "oprange/fixtures.hpp"
#include "oprange/pipelines.hpp"

namespace fs = std::filesystem;
using namespace oprange;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsage = 8;
constexpr int kInternal = 70;

struct ExitCode {
  int code;
  std::optional<ErrorKind> kind;
  const char* meaning;
};

const std::vector<ExitCode>& exit_codes() {
  static const std::vector<ExitCode> table{
      {0, std::nullopt, "success"},
      {kCheckFailed, std::nullopt, "a pipeline check or selftest criterion failed"},
      {2, ErrorKind::NoFactorization, "no Douglas factorization (range not included)"},
      {3, ErrorKind::UnknownPipeline, "unknown pipeline"},
      {4, ErrorKind::ConfigParse, "malformed config or parameter value"},
      {5, ErrorKind::UnknownFixture, "unknown fixture"},
      {6, ErrorKind::Io, "file cannot be read or written"},
      {7, ErrorKind::Parse, "malformed matrix, subspace or relation file"},
      {kUsage, std::nullopt, "command-line usage error"},
      {9, ErrorKind::InvalidTolerance, "tolerance outside (0, 1)"},
      {10, ErrorKind::NotSquare, "matrix not square"},
      {11, ErrorKind::NotHermitian, "matrix not Hermitian"},
      {12, ErrorKind::NotPsd, "matrix not positive semidefinite"},
      {13, ErrorKind::DimensionMismatch, "dimensions do not match"},
      {14, ErrorKind::EmptyList, "empty list"},
      {15, ErrorKind::NotConverged, "limit did not converge"},
      {16, ErrorKind::HypothesisViolated, "input violates a range hypothesis"},
      {17, ErrorKind::NotNested, "subspaces not nested"},
      {18, ErrorKind::OutOfFormDomain, "vector outside the form domain"},
      {19, ErrorKind::NotOrthogonal, "subspaces not orthogonal"},
      {20, ErrorKind::NotSpanning, "subspaces do not span"},
      {21, ErrorKind::NotContraction, "resolvent is not a contraction"},
      {22, ErrorKind::NotOperator, "relation has a multivalued part"},
      {23, ErrorKind::InvalidZ, "z outside the closed right half-plane"},
      {24, ErrorKind::NotInvertible, "matrix not invertible"},
      {25, ErrorKind::RankDeficientSource, "operator lacks full column rank"},
      {26, ErrorKind::InvalidArgument, "invalid argument"},
      {kInternal, std::nullopt, "internal error"},
  };
  return table;
}

int exit_code_for(ErrorKind kind) {
  for (const ExitCode& e : exit_codes())
    if (e.kind == kind) return e.code;
  return kInternal;
}

std::string exit_code_help() {
  std::string out = "Exit codes:\n";
  for (const ExitCode& e : exit_codes()) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "  %3d  ", e.code);
    out += buf;
    out += e.meaning;
    out += '\n';
  }
  return out;
}

struct Globals {
  std::uint64_t seed = 1;
  double tol_rank = 0.0;
  double tol_cmp = 0.0;
  std::string out_dir;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* rank_opt = nullptr;
  CLI::Option* cmp_opt = nullptr;

  RunOverrides overrides() const {
    RunOverrides o;
    if (seed_opt->count()) o.seed = seed;
    if (rank_opt->count()) o.tol_rank = tol_rank;
    if (cmp_opt->count()) o.tol_cmp = tol_cmp;
    return o;
  }

  ToleranceContext ctx() const {
    ToleranceContext c;
    if (rank_opt->count()) c.rank_rel_tol = tol_rank;
    if (cmp_opt->count()) c.cmp_tol = tol_cmp;
    return c;
  }
};

int emit(const PipelineResult& result, const std::string& out_dir) {
  if (out_dir.empty()) {
    std::cout << result.csv << std::flush;
    std::cerr << result.summary;
  } else {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec, ErrorKind::Io, "cannot create " + out_dir);
    const fs::path dir(out_dir);
    save_text((dir / (result.pipeline + ".csv")).string(), result.csv);
    save_text((dir / (result.pipeline + ".txt")).string(), result.summary);
    std::cerr << result.summary;
  }
  return result.passed ? 0 : kCheckFailed;
}

int selftest(const Globals& g) {
  const auto results = run_acceptance(g.ctx(), g.seed);
  int failed = 0;
  for (const CriterionResult& r : results) {
    std::printf("[%s] %2d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
    failed += !r.passed;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed ? kCheckFailed : 0;
}

int emit_fixture(const std::string& name, const std::string& out_dir) {
  const Fixture f = find_fixture(name);
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create " + dir.string());
  for (const FixtureFile& file : f.files) {
    const fs::path path = dir / file.name;
    save_text(path.string(), file.contents);
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-range experiments: parallel sums, shorted operators, compressions, liftings, "
               "relations and extensions.",
               "oprange"};
  app.footer(exit_code_help());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "seed for all random draws (default 1)");
  g.rank_opt = app.add_option("--tol-rank", g.tol_rank, "relative eigenvalue cutoff for numerical rank");
  g.cmp_opt = app.add_option("--tol-cmp", g.tol_cmp, "relative tolerance for matrix comparisons");
  app.add_option("--out", g.out_dir, "write NAME.csv and NAME.txt into this directory");

  std::function<int()> action;

  auto* run = app.add_subcommand("run", "run a scenario config");
  std::string config_path;
  run->add_option("config", config_path, "key = value scenario file")->required();
  run->callback([&] {
    action = [&] {
      const Config config = load_config(config_path);
      std::string out_dir = g.out_dir;
      if (out_dir.empty()) {
        if (const auto it = config.values.find("out"); it != config.values.end()) {
          fs::path p(it->second);
          out_dir = (p.is_relative() ? config.base_dir / p : p).string();
        }
      }
      return emit(run_pipeline(config, g.overrides()), out_dir);
    };
  });

  auto* fixtures = app.add_subcommand("fixtures", "bundled witness fixtures");
  fixtures->require_subcommand(1);
  auto* list = fixtures->add_subcommand("list", "list fixture names");
  list->callback([&] {
    action = [] {
      for (const Fixture& f : bundled_fixtures()) std::cout << f.name << "\t" << f.description << '\n';
      return 0;
    };
  });
  auto* emit_cmd = fixtures->add_subcommand("emit", "write a fixture's files (into --out or the current directory)");
  std::string fixture_name;
  emit_cmd->add_option("name", fixture_name, "fixture name")->required();
  emit_cmd->callback([&] { action = [&] { return emit_fixture(fixture_name, g.out_dir); }; });

  auto* self = app.add_subcommand("selftest", "run the acceptance criteria");
  self->callback([&] { action = [&] { return selftest(g); }; });

  // One subcommand per pipeline: file inputs are positional, options map to
  // config keys of the same name.
  std::vector<std::shared_ptr<std::map<std::string, std::string>>> stores;
  for (const PipelineSpec& spec : pipelines()) {
    auto* sub = app.add_subcommand(spec.name, spec.description);
    auto store = std::make_shared<std::map<std::string, std::string>>();
    stores.push_back(store);
    for (const std::string& file : spec.files) sub->add_option(file, (*store)[file], file + " file")->required();
    std::vector<CLI::Option*> opts;
    for (const PipelineOption& o : spec.options)
      opts.push_back(sub->add_option("--" + o.key, (*store)["opt:" + o.key], o.help + " (default " + o.fallback + ")"));
    sub->callback([&, store, opts, name = spec.name, files = spec.files, options = spec.options] {
      action = [&, store, opts, name, files, options] {
        Config config;
        config.values["pipeline"] = name;
        for (const std::string& file : files) config.values[file] = store->at(file);
        for (std::size_t k = 0; k < options.size(); ++k)
          if (opts[k]->count()) config.values[options[k].key] = store->at("opt:" + options[k].key);
        return emit(run_pipeline(config, g.overrides()), g.out_dir);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

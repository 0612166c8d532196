#pragma once

// Scenario pipelines behind the command-line tool. A scenario is a flat
// key = value file:
//
//   # comments start with '#'
//   pipeline = parsum
//   f = fixture:c4-disjoint-pair/F.mat
//   g = G.mat          # relative to the config file's directory
//   seed = 7
//
// Each pipeline has named file inputs and numeric options; any other key is a
// ConfigParse error. Every pipeline yields a CSV table, a plain-text summary
// and a pass flag.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oprange/compressions.hpp"
#include "oprange/divergence.hpp"
#include "oprange/fixtures.hpp"
#include "oprange/lifting.hpp"
#include "oprange/matrix_io.hpp"
#include "oprange/range.hpp"
#include "oprange/relations.hpp"
#include "oprange/shorting.hpp"

namespace oprange {

struct Config {
  std::map<std::string, std::string> values;
  std::filesystem::path base_dir = ".";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace detail

inline Config parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  Config out;
  out.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = "line " + std::to_string(number);
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::ConfigParse, where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    require(detail::valid_key(key), ErrorKind::ConfigParse, where + ": bad key '" + key + "'");
    require(!value.empty(), ErrorKind::ConfigParse, where + ": empty value for '" + key + "'");
    require(out.values.emplace(key, value).second, ErrorKind::ConfigParse, where + ": duplicate key '" + key + "'");
  }
  require(out.values.count("pipeline"), ErrorKind::ConfigParse, "no pipeline key");
  return out;
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

// Value parsers; they throw InvalidArgument, which the config layer reports as
// ConfigParse with the offending key.

inline double parse_real(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
}

inline long parse_integer(const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::InvalidArgument, "not an integer: '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(detail::trim(item));
  require(!out.empty(), ErrorKind::InvalidArgument, "empty list");
  for (const auto& s : out) require(!s.empty(), ErrorKind::InvalidArgument, "empty list item in '" + text + "'");
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_real(s));
  return out;
}

// "8,16,32" or "8..1024", the latter doubling from the first bound.
inline std::vector<int> parse_count_list(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = parse_integer(detail::trim(text.substr(0, dots)));
    const long hi = parse_integer(detail::trim(text.substr(dots + 2)));
    require(lo >= 1 && hi >= lo && hi <= (1L << 24), ErrorKind::InvalidArgument, "bad range '" + text + "'");
    for (long n = lo; n <= hi; n *= 2) out.push_back(static_cast<int>(n));
    return out;
  }
  for (const auto& s : split_list(text)) {
    const long n = parse_integer(s);
    require(n >= 1 && n <= (1L << 24), ErrorKind::InvalidArgument, "count out of range: '" + s + "'");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

// "1", "0.5+2i", "-1e-3-0.25i", "2i".
inline Scalar parse_complex(const std::string& raw) {
  const std::string text = detail::trim(raw);
  require(!text.empty(), ErrorKind::InvalidArgument, "empty complex number");
  if (text.back() != 'i') return {parse_real(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imaginary = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s);
  };
  if (split == std::string::npos) return {0.0, imaginary(body)};
  return {parse_real(body.substr(0, split)), imaginary(body.substr(split))};
}

// Simple CSV table: header row, comma separated, '.' decimal point.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { add(std::move(header)); }

  void add(std::vector<std::string> row) {
    require(row.size() == width_, ErrorKind::InvalidArgument, "csv row width");
    for (std::size_t k = 0; k < row.size(); ++k) text_ += (k ? "," : "") + row[k];
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

inline std::string cell(double x) { return format_real(x); }
inline std::string cell(bool b) { return b ? "1" : "0"; }
inline std::string cell(Index n) { return std::to_string(n); }
inline std::string cell(int n) { return std::to_string(n); }

struct PipelineResult {
  std::string pipeline;
  std::string csv;
  std::string summary;
  bool passed = false;
};

// Tolerance and seed settings from the command line override the config.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_rank;
  std::optional<double> tol_cmp;
};

// Keys consumed by a pipeline, so that unused keys can be reported.
class Params {
 public:
  Params(const Config& config, const ToleranceContext& ctx) : config_(config), ctx_(ctx) {
    for (const char* key : {"pipeline", "seed", "tol_rank", "tol_cmp", "out"}) used_.insert(key);
  }

  const ToleranceContext& ctx() const { return ctx_; }

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    const auto it = config_.values.find(key);
    if (it == config_.values.end()) return std::nullopt;
    return it->second;
  }

  std::string required(const std::string& key) {
    auto v = get(key);
    require(v.has_value(), ErrorKind::ConfigParse, "missing key '" + key + "'");
    return *v;
  }

  template <typename Parse>
  auto parsed(const std::string& key, const std::string& fallback, Parse parse) {
    const std::string text = get(key).value_or(fallback);
    try {
      return parse(text);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidArgument) throw;
      fail(ErrorKind::ConfigParse, "key '" + key + "': " + e.what());
    }
  }

  double real(const std::string& key, double fallback) {
    return parsed(key, format_real(fallback), parse_real);
  }

  long integer(const std::string& key, long fallback) {
    return parsed(key, std::to_string(fallback), parse_integer);
  }

  std::string text(const std::string& key) {
    const std::string value = required(key);
    if (value.rfind("fixture:", 0) == 0) {
      const std::string ref = value.substr(8);
      const auto slash = ref.find('/');
      require(slash != std::string::npos, ErrorKind::ConfigParse, "fixture reference needs NAME/FILE: " + value);
      const std::string name = ref.substr(0, slash);
      const std::string file = ref.substr(slash + 1);
      for (const FixtureFile& f : find_fixture(name).files)
        if (f.name == file) return f.contents;
      fail(ErrorKind::UnknownFixture, "fixture '" + name + "' has no file '" + file + "'");
    }
    std::filesystem::path path(value);
    if (path.is_relative()) path = config_.base_dir / path;
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  }

  Matrix matrix(const std::string& key) {
    const std::string body = text(key);
    require(body.rfind("RELATION", 0) != 0, ErrorKind::Parse, "'" + key + "' must be a plain matrix file");
    return matrix_from_string(body);
  }

  PsdOperator psd(const std::string& key) { return make_psd(matrix(key), ctx_); }

  Subspace subspace(const std::string& key) { return Subspace::span(matrix(key), ctx_); }

  // A RELATION file gives the resolvent; a plain matrix is read as an operator.
  NonnegRelation relation(const std::string& key) {
    std::istringstream in(text(key));
    std::string head;
    in >> head;
    in.clear();
    if (head == "RELATION") {
      in.seekg(0);
      return NonnegRelation::from_resolvent(read_relation_resolvent(in), ctx_);
    }
    in.seekg(0);
    return from_operator(make_psd(read_matrix(in), ctx_));
  }

  void finish() const {
    for (const auto& [key, value] : config_.values)
      require(used_.count(key), ErrorKind::ConfigParse, "unknown key '" + key + "'");
  }

 private:
  const Config& config_;
  ToleranceContext ctx_;
  std::set<std::string> used_;
};

struct PipelineOption {
  std::string key;
  std::string fallback;
  std::string help;
};

struct PipelineSpec {
  std::string name;
  std::string description;
  std::vector<std::string> files;
  std::vector<PipelineOption> options;
  std::function<PipelineResult(Params&, std::uint64_t)> run;
};

namespace detail {

inline std::string line(const std::string& key, const std::string& value) { return key + ": " + value + "\n"; }

inline std::string block(const std::string& key, const Matrix& m) { return key + ":\n" + matrix_to_string(m); }

inline PipelineResult run_parsum(Params& p, std::uint64_t) {
  const PsdOperator f = p.psd("f");
  const PsdOperator g = p.psd("g");
  const std::string route = p.get("route").value_or("all");
  require(route == "all" || route == "block" || route == "variational" || route == "limit", ErrorKind::ConfigParse,
          "route must be all, block, variational or limit");
  const PsdOperator block_route = parallel_sum(f, g);
  const PsdOperator variational = parallel_sum_variational(f, g);
  const PsdOperator limit = parallel_sum_limit(f, g).value;
  const double disagreement = max_pairwise_distance({&block_route.matrix(), &variational.matrix(), &limit.matrix()});
  const double scale = f.norm() + g.norm();
  CsvTable csv({"route", "norm", "rank", "distance_to_block", "route_disagreement"});
  for (const auto& [name, op] : {std::pair{"block", &block_route}, std::pair{"variational", &variational},
                                 std::pair{"limit", &limit}}) {
    if (route != "all" && route != name) continue;
    csv.add({name, cell(op->norm()), cell(op->rank()), cell((op->matrix() - block_route.matrix()).norm()),
             cell(disagreement)});
  }
  const PsdOperator& shown = route == "variational" ? variational : route == "limit" ? limit : block_route;
  PipelineResult out{"parsum", csv.str(), "", disagreement <= 1e-6 * std::max(scale, 1e-300) || scale == 0.0};
  out.summary = block("parallel sum (" + (route == "all" ? std::string("block") : route) + " route)", shown.matrix()) +
                line("route disagreement", cell(disagreement)) +
                line("vanishes", cell(shown.norm() <= vanish_tolerance(p.ctx()) * scale));
  return out;
}

inline PipelineResult run_short(Params& p, std::uint64_t) {
  const PsdOperator b = p.psd("b");
  const Subspace k = p.subspace("k");
  const ShortReport on_k = shorted(b, k);
  const ShortReport on_perp = shorted(b, k.complement());
  CsvTable csv({"subspace", "norm", "rank", "route_disagreement", "vanishes", "range_condition"});
  for (const auto& [name, r] : {std::pair{"K", &on_k}, std::pair{"K_perp", &on_perp}})
    csv.add({name, cell(r->shorted.norm()), cell(r->shorted.rank()), cell(r->route_disagreement), cell(r->vanishes),
             cell(r->range_condition)});
  PipelineResult out{"short", csv.str(), "", on_k.route_disagreement <= 1e-7 * std::max(b.norm(), 1e-300) ||
                                                 b.norm() == 0.0};
  out.summary = block("shorted operator", on_k.shorted.matrix()) +
                line("route disagreement", cell(on_k.route_disagreement)) + line("vanishes", cell(on_k.vanishes)) +
                line("range condition", cell(on_k.range_condition));
  return out;
}

inline PipelineResult run_douglas(Params& p, std::uint64_t) {
  const Matrix a = p.matrix("a");
  const Matrix b = p.matrix("b");
  const DouglasFactor d = douglas_solve(a, b, p.ctx());
  CsvTable csv({"residual", "lambda", "range_in_adjoint", "kernels_match"});
  csv.add({cell(d.residual), cell(d.lambda), cell(d.range_in_adjoint), cell(d.kernels_match)});
  PipelineResult out{"douglas", csv.str(), "", d.residual <= douglas_tolerance(a)};
  out.summary = block("C", d.factor) + line("residual", cell(d.residual)) + line("lambda", cell(d.lambda));
  return out;
}

inline PipelineResult run_pxfamily(Params& p, std::uint64_t) {
  const PsdOperator a = p.psd("a");
  const PsdOperator b = p.psd("b");
  const std::vector<double> xs = p.parsed("xs", "0.5,1,2,4", parse_real_list);
  const double x0 = p.real("x0", 1.0);
  const ProjectionFamily family = projection_family(a, b, xs);
  const Matrix base = family_member(a, b, x0).projection;
  CsvTable csv({"x", "dist_to_x0", "reconstruction", "projection_defect"});
  bool ok = true;
  const double scale = std::max(1.0, a.norm());
  for (const FamilySample& s : family.samples) {
    csv.add({cell(s.x), cell((s.projection - base).norm()), cell(s.reconstruction), cell(s.projection_defect)});
    ok = ok && s.reconstruction <= 1e-9 * scale && s.projection_defect <= 1e-8;
  }
  PipelineResult out{"pxfamily", csv.str(), "", ok};
  out.summary = line("samples", std::to_string(xs.size())) + line("x0", cell(x0)) + block("P(x0)", base);
  return out;
}

inline PipelineResult run_chain(Params& p, std::uint64_t) {
  const PsdOperator a = p.psd("a");
  const Subspace m = p.subspace("m");
  const long k_max = p.integer("k", 20);
  require(k_max >= 1 && k_max <= 10000, ErrorKind::ConfigParse, "k must lie in [1, 10000]");
  const ChainReport report = chain(a, m, static_cast<int>(k_max));
  CsvTable csv({"k", "norm", "ratio", "a_decreasing", "gram_decreasing", "p_decreasing"});
  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    const ChainStep& s = report.steps[k];
    const double ratio = k && report.steps[k - 1].norm > 0.0 ? s.norm / report.steps[k - 1].norm : 1.0;
    csv.add({cell(static_cast<int>(k + 1)), cell(s.norm), cell(ratio), cell(s.a_decreasing), cell(s.gram_decreasing),
             cell(s.p_decreasing)});
  }
  PipelineResult out{"chain", csv.str(), "", report.monotone};
  out.summary = line("steps", std::to_string(k_max)) + line("monotone", cell(report.monotone)) +
                line("fixed point residual", cell(report.fixed_point_residual));
  return out;
}

inline PipelineResult run_liftcheck(Params& p, std::uint64_t) {
  const PsdOperator a = p.psd("a");
  const Subspace m = p.subspace("m");
  const LiftingCriterion c = lifting_criterion(a, m);
  CsvTable csv({"included", "factor_norm"});
  csv.add({cell(c.included), cell(c.factor_norm)});
  PipelineResult out{"liftcheck", csv.str(), "", true};
  out.summary = line("ran A12 in ran A11^{3/4}", cell(c.included)) + line("factor norm", cell(c.factor_norm));
  return out;
}

inline PipelineResult run_liftsweep(Params& p, std::uint64_t) {
  GradedModel model;
  model.a_exponent = p.real("a", 2.0);
  model.b_exponent = p.real("b", 1.0);
  for (int n : p.parsed("ns", "8..1024", parse_count_list)) model.sizes.push_back(n);
  const TruncationReport r = truncation_diagnostic(model);
  const std::string classification = r.numeric_bounded ? "bounded" : "unbounded";
  CsvTable csv({"n", "factor_norm", "classification"});
  for (std::size_t k = 0; k < r.sizes.size(); ++k)
    csv.add({cell(r.sizes[k]), cell(r.factor_norms[k]), classification});
  PipelineResult out{"liftsweep", csv.str(), "", r.agree};
  out.summary = line("slope", cell(r.slope)) + line("numeric", classification) +
                line("exponent test", r.exponent_bounded ? "bounded" : "unbounded") + line("agree", cell(r.agree));
  return out;
}

inline PipelineResult run_splitpair(Params& p, std::uint64_t seed) {
  const NonnegRelation t = p.relation("t");
  const Subspace m = p.subspace("m");
  const long probes = p.integer("probes", 20);
  require(probes >= 0 && probes <= 100000, ErrorKind::ConfigParse, "probes out of range");
  const PairSplit s = split_pair(t, m, static_cast<int>(probes), seed);
  CsvTable csv({"dim_d1", "dim_d2", "resolvent_sum_residual", "graph_orthogonality", "form_defect",
                "decomposition_residual", "domains_match", "domains_disjoint", "domains_span", "pieces_in_domains",
                "kernel_claim"});
  csv.add({cell(s.domain1.dim()), cell(s.domain2.dim()), cell(s.resolvent_sum_residual), cell(s.graph_orthogonality),
           cell(s.form_defect), cell(s.decomposition_residual), cell(s.domains_match), cell(s.domains_disjoint),
           cell(s.domains_span), cell(s.pieces_in_domains), cell(s.kernel_claim)});
  const bool ok = s.resolvent_sum_residual <= 1e-12 && s.graph_orthogonality <= 1e-8 && s.form_defect <= 1e-8 &&
                  s.domains_match && s.domains_disjoint && s.domains_span;
  PipelineResult out{"splitpair", csv.str(), "", ok};
  out.summary = block("R1", s.rel1.resolvent().matrix()) + block("R2", s.rel2.resolvent().matrix()) +
                line("resolvent sum residual", cell(s.resolvent_sum_residual));
  return out;
}

inline PipelineResult run_euler(Params& p, std::uint64_t) {
  const NonnegRelation t = p.relation("t");
  const Scalar z = p.parsed("z", "1", parse_complex);
  const std::vector<int> ns = p.parsed("ns", "8..1024", parse_count_list);
  const EulerSweep sweep = euler_sweep(t, z, ns);
  CsvTable csv({"n", "error", "n_times_error"});
  double worst = 0.0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    csv.add({cell(ns[k]), cell(sweep.errors[k]), cell(ns[k] * sweep.errors[k])});
    worst = std::max(worst, sweep.errors[k]);
  }
  PipelineResult out{"euler", csv.str(), "", sweep.rate_ok || worst <= 1e-14};
  out.summary = line("slope", sweep.slope ? cell(*sweep.slope) : std::string("none (exact)")) +
                line("constant", cell(sweep.constant)) + line("rate in [-1.2, -0.8]", cell(sweep.rate_ok));
  return out;
}

inline PipelineResult run_trotter(Params& p, std::uint64_t) {
  const NonnegRelation t1 = p.relation("t1");
  const NonnegRelation t2 = p.relation("t2");
  const double t = p.real("t", 1.0);
  require(t >= 0.0, ErrorKind::ConfigParse, "t must be nonnegative");
  const std::vector<int> ns = p.parsed("ns", "2..256", parse_count_list);
  const TrotterSweep sweep = trotter_sweep(t1, t2, t, ns);
  CsvTable csv({"n", "norm", "distance_to_limit"});
  for (std::size_t k = 0; k < ns.size(); ++k) csv.add({cell(ns[k]), cell(sweep.norms[k]), cell(sweep.distances[k])});
  const bool ok = sweep.vanishing ? sweep.norms.back() <= 1e-3
                                  : sweep.nested ? sweep.decreasing : sweep.distances.back() <= sweep.distances.front();
  PipelineResult out{"trotter", csv.str(), "", ok};
  out.summary = line("form domains meet trivially", cell(sweep.vanishing)) + line("nested", cell(sweep.nested)) +
                line("distance decreasing", cell(sweep.decreasing)) + block("limit", sweep.limit);
  return out;
}

inline PipelineResult run_divext(Params& p, std::uint64_t seed) {
  const Matrix l2 = p.matrix("l2");
  const Subspace d = Subspace::span(p.matrix("d"), p.ctx());
  const long samples = p.integer("samples", 100);
  require(samples >= 1 && samples <= 100000, ErrorKind::ConfigParse, "samples out of range");
  const double shift = p.real("shift", 1.0);
  require(shift > 0.0, ErrorKind::ConfigParse, "shift must be positive");
  const ExtensionReport r = extension_sandwich_check(l2, d, static_cast<int>(samples), seed, shift, p.ctx());
  CsvTable csv({"samples", "worst_left_gap", "worst_right_gap", "friedrichs_form_residual", "friedrichs_domain",
                "krein_domain_full", "friedrichs_below_krein", "all_extend"});
  csv.add({cell(r.samples), cell(r.worst_left_gap), cell(r.worst_right_gap), cell(r.friedrichs_form_residual),
           cell(r.friedrichs_domain), cell(r.krein_domain_full), cell(r.friedrichs_below_krein), cell(r.all_extend)});
  PipelineResult out{"divext", csv.str(), "", r.pass};
  out.summary = block("Friedrichs resolvent", r.friedrichs.resolvent().matrix()) +
                block("Krein resolvent", r.krein.resolvent().matrix()) +
                line("worst left gap", cell(r.worst_left_gap)) + line("worst right gap", cell(r.worst_right_gap)) +
                line("sandwich holds", cell(r.pass));
  return out;
}

inline PipelineResult run_prodpair(Params& p, std::uint64_t) {
  const Matrix b = p.matrix("b");
  const Subspace m = p.subspace("m");
  const ProductPairReport r = product_pair(b, m, p.ctx());
  CsvTable csv({"dim_d1", "dim_d2", "direct", "friedrichs_below", "friedrichs_form_residual", "krein_residual",
                "products_below", "resolvent_sum_residual", "graph_orthogonality", "images_match", "image1_spans",
                "image2_spans"});
  csv.add({cell(r.d1.dim()), cell(r.d2.dim()), cell(r.direct), cell(r.friedrichs_below),
           cell(r.friedrichs_form_residual), cell(r.krein_residual), cell(r.products_below),
           cell(r.resolvent_sum_residual), cell(r.graph_orthogonality), cell(r.images_match), cell(r.image_spans[0]),
           cell(r.image_spans[1])});
  PipelineResult out{"prodpair", csv.str(), "", r.pass};
  out.summary = block("D1 frame", r.d1.frame()) + block("D2 frame", r.d2.frame()) +
                line("Krein residual", cell(r.krein_residual)) + line("pass", cell(r.pass));
  return out;
}

}  // namespace detail

inline const std::vector<PipelineSpec>& pipelines() {
  static const std::vector<PipelineSpec> specs{
      {"parsum", "parallel sum F:G by three routes", {"f", "g"},
       {{"route", "all", "route to report: all, block, variational or limit"}}, detail::run_parsum},
      {"short", "shorted operator of B to K", {"b", "k"}, {}, detail::run_short},
      {"douglas", "Douglas factorization A = B C", {"a", "b"}, {}, detail::run_douglas},
      {"pxfamily", "projection family P(x) of a pair with disjoint ranges", {"a", "b"},
       {{"xs", "0.5,1,2,4", "parameters x"}, {"x0", "1", "reference parameter"}}, detail::run_pxfamily},
      {"chain", "compression chain A_k", {"a", "m"}, {{"k", "20", "number of steps"}}, detail::run_chain},
      {"liftcheck", "lifting range criterion of A along M", {"a", "m"}, {}, detail::run_liftcheck},
      {"liftsweep", "truncation sweep of the graded model", {},
       {{"a", "2", "diagonal exponent"}, {"b", "1", "coupling exponent"}, {"ns", "8..1024", "truncation sizes"}},
       detail::run_liftsweep},
      {"splitpair", "split of a relation along M", {"t", "m"}, {{"probes", "20", "form probes per domain"}},
       detail::run_splitpair},
      {"euler", "Euler approximation error sweep", {"t"},
       {{"z", "1", "complex time, Re z > 0 or z = 0"}, {"ns", "8..1024", "step counts"}}, detail::run_euler},
      {"trotter", "alternating semigroup product sweep", {"t1", "t2"},
       {{"t", "1", "time"}, {"ns", "2..256", "step counts"}}, detail::run_trotter},
      {"divext", "Friedrichs and Krein extensions with sampled extensions", {"l2", "d"},
       {{"samples", "100", "sampled extensions"}, {"shift", "1", "resolvent shift a > 0"}}, detail::run_divext},
      {"prodpair", "product restrictions of an invertible Hermitian B", {"b", "m"}, {}, detail::run_prodpair},
  };
  return specs;
}

inline const PipelineSpec& find_pipeline(const std::string& name) {
  for (const PipelineSpec& s : pipelines())
    if (s.name == name) return s;
  fail(ErrorKind::UnknownPipeline, "no pipeline named '" + name + "'");
}

inline PipelineResult run_pipeline(const Config& config, const RunOverrides& overrides = {}) {
  const auto it = config.values.find("pipeline");
  require(it != config.values.end(), ErrorKind::ConfigParse, "no pipeline key");
  const PipelineSpec& spec = find_pipeline(it->second);

  auto number = [&](const char* key) -> std::optional<double> {
    const auto v = config.values.find(key);
    if (v == config.values.end()) return std::nullopt;
    try {
      return parse_real(v->second);
    } catch (const Error&) {
      fail(ErrorKind::ConfigParse, std::string("key '") + key + "' is not a number");
    }
  };
  ToleranceContext ctx;
  if (auto v = overrides.tol_rank ? overrides.tol_rank : number("tol_rank")) ctx.rank_rel_tol = *v;
  if (auto v = overrides.tol_cmp ? overrides.tol_cmp : number("tol_cmp")) ctx.cmp_tol = *v;
  ctx.validate();
  std::uint64_t seed = 1;
  if (overrides.seed) {
    seed = *overrides.seed;
  } else if (const auto v = config.values.find("seed"); v != config.values.end()) {
    try {
      const long s = parse_integer(v->second);
      require(s >= 0, ErrorKind::InvalidArgument, "negative");
      seed = static_cast<std::uint64_t>(s);
    } catch (const Error&) {
      fail(ErrorKind::ConfigParse, "key 'seed' must be a nonnegative integer");
    }
  }

  Params params(config, ctx);
  for (const std::string& f : spec.files) params.get(f);
  for (const PipelineOption& o : spec.options) params.get(o.key);
  params.finish();
  PipelineResult out = spec.run(params, seed);
  out.summary = "pipeline: " + spec.name + "\n" + out.summary + "passed: " + cell(out.passed) + "\n";
  return out;
}

}  // namespace oprange

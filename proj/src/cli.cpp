#include "rskflow/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <random>
#include <sstream>

#include "rskflow/cmcells.hpp"
#include "rskflow/combinatorics.hpp"
#include "rskflow/crystals.hpp"
#include "rskflow/spectralflow.hpp"

namespace rskflow::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json tableau_json(const Tableau& t) { return Json(t.rows()); }
Json matrix_json(const NatMatrix& a) { return Json(a.to_rows()); }

// Report destination: a file written atomically, or the given stream.
void emit(const std::string& output, const Json& report, std::ostream& out) {
  const std::string text = report.dump() + "\n";
  if (output.empty())
    out << text;
  else
    write_atomic(output, text);
}

std::vector<std::vector<int>> parse_rows(const Json& j, const std::string& what) {
  if (!j.is_array()) throw UsageError(what + ": expected an array of rows");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw UsageError(what + ": row " + std::to_string(i + 1) + " is not an array");
    std::vector<int> row;
    for (std::size_t c = 0; c < j[i].size(); ++c) {
      const Json& x = j[i][c];
      if (!x.is_number_integer() || x.get<long long>() < 0)
        throw UsageError(what + ": row " + std::to_string(i + 1) + ", column " + std::to_string(c + 1) +
                         ": expected a nonnegative integer");
      row.push_back(x.get<int>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(what + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

NatMatrix parse_matrix(const std::string& text) {
  const auto rows = parse_rows(parse_json(text, "matrix"), "matrix");
  if (rows.empty() || rows.front().empty()) throw UsageError("matrix: empty");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].size() != rows.front().size())
      throw UsageError("matrix: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(rows.front().size()));
  return NatMatrix::from_rows(rows);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int max_entry(const std::vector<std::vector<int>>& rows) {
  int m = 0;
  for (const auto& row : rows)
    for (int x : row) m = std::max(m, x);
  return m;
}

// key=value lines fill options of the chosen subcommand that the command line left unset.
void apply_config(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError&) {
    throw UsageError("cannot read config " + path);
  }
  for (const auto& item : items) {
    if (item.name == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw UsageError("config " + path + ": unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

flow::ZPath parse_z_path(const std::string& s) {
  if (s == "ray") return flow::ZPath::Ray;
  if (s == "collision") return flow::ZPath::CollisionThrough;
  if (s == "collision-unit") return flow::ZPath::CollisionUnit;
  throw UsageError("unknown z path '" + s + "'");
}

Json diagnostics_json(const flow::Diagnostics& d) {
  return Json{{"steps", d.steps},
              {"refinements", d.refinements},
              {"low_overlap_accepts", d.low_overlap_accepts},
              {"min_overlap", d.min_overlap},
              {"min_gap", d.min_gap},
              {"endpoint_deviation", d.endpoint_deviation}};
}

// ---- rsk ----

struct RskArgs {
  std::string matrix;
  std::string file;
  bool inverse = false;
  bool check = false;
  int rows = 0;
  int cols = 0;
  int max_dim = 5;
  int max_entry = 4;
  int samples = 10000;
  std::uint64_t seed = 1;
  std::string output;
};

std::size_t rsk_check(const RskArgs& a, std::string& failure) {
  std::size_t cases = 0;
  auto test = [&](const NatMatrix& m) {
    ++cases;
    const RskPair pq = rsk(m);
    if (rsk_inverse(pq.P, pq.Q) != m) failure = "rsk_inverse(rsk(A)) != A for A = " + m.to_string();
    else if (!transpose_check(m)) failure = "rsk(A^t) != (Q, P) for A = " + m.to_string();
    return failure.empty();
  };
  const int ed = std::min(a.max_dim, 3), ee = std::min(a.max_entry, 2);
  for (int r = 1; r <= ed; ++r)
    for (int n = 1; n <= ed; ++n)
      for (const auto& m : matrices_with_entry_bound(r, n, ee))
        if (!test(m)) return cases;
  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<int> dim(1, a.max_dim), entry(0, a.max_entry);
  for (int s = 0; s < a.samples; ++s) {
    NatMatrix m(dim(rng), dim(rng));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = entry(rng);
    if (!test(m)) return cases;
  }
  return cases;
}

int cmd_rsk(const RskArgs& a, std::ostream& out) {
  if (a.check) {
    if (a.max_dim < 1 || a.max_entry < 0 || a.samples < 0) throw UsageError("rsk --check: bad bounds");
    std::string failure;
    const std::size_t cases = rsk_check(a, failure);
    if (!a.output.empty()) {
      Json report{{"config",
                   {{"command", "rsk"}, {"mode", "check"}, {"max_dim", a.max_dim}, {"max_entry", a.max_entry},
                    {"samples", a.samples}, {"seed", a.seed}}},
                  {"cases", cases},
                  {"ok", failure.empty()}};
      if (!failure.empty()) report["failure"] = failure;
      emit(a.output, report, out);
    }
    if (!failure.empty()) {
      out << "mismatch after " << cases << " cases: " << failure << "\n";
      return kMismatch;
    }
    out << "ok, " << cases << " cases\n";
    return kSuccess;
  }

  if (a.matrix.empty() == a.file.empty()) throw UsageError("rsk: give exactly one of MATRIX or --file");
  const std::string text = a.file.empty() ? a.matrix : read_file(a.file);

  if (a.inverse) {
    const Json j = parse_json(text, "input");
    if (!j.is_object() || !j.contains("P") || !j.contains("Q"))
      throw UsageError("rsk --inverse: expected an object with keys P and Q");
    const auto prows = parse_rows(j["P"], "P"), qrows = parse_rows(j["Q"], "Q");
    const int n = a.cols > 0 ? a.cols : j.value("n", max_entry(prows));
    const int r = a.rows > 0 ? a.rows : j.value("r", max_entry(qrows));
    NatMatrix m;
    try {
      m = rsk_inverse(Tableau(prows, n), Tableau(qrows, r));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("rsk --inverse: ") + e.what());
    }
    const Json report{{"config", {{"command", "rsk"}, {"mode", "inverse"}, {"P", j["P"]}, {"Q", j["Q"]}, {"r", r}, {"n", n}}},
                      {"matrix", matrix_json(m)}};
    emit(a.output, report, out);
    return kSuccess;
  }

  const NatMatrix m = parse_matrix(text);
  const RskPair pq = rsk(m);
  const Json report{{"config", {{"command", "rsk"}, {"mode", "forward"}, {"matrix", matrix_json(m)}}},
                    {"r", m.rows()},
                    {"n", m.cols()},
                    {"P", tableau_json(pq.P)},
                    {"Q", tableau_json(pq.Q)}};
  emit(a.output, report, out);
  return kSuccess;
}

// ---- crystal ----

struct CrystalArgs {
  std::vector<int> shape;
  int rank = 2;
  int cols = 0;  // > 0: matrices with this many columns
  int max_entry = 1;
  std::size_t max_elements = 5000;
  std::string output;
};

int cmd_crystal(const CrystalArgs& a, std::ostream& out) {
  if (a.rank < 1) throw UsageError("crystal: --rank must be positive");
  std::vector<crystal::Element> elements;
  Json config{{"command", "crystal"}, {"rank", a.rank}};
  if (a.cols > 0) {
    if (!a.shape.empty()) throw UsageError("crystal: --shape and --cols are exclusive");
    config["cols"] = a.cols;
    config["max_entry"] = a.max_entry;
    for (auto& m : matrices_with_entry_bound(a.rank, a.cols, a.max_entry)) {
      elements.emplace_back(std::move(m));
      if (elements.size() > a.max_elements) throw flow::BudgetError("crystal: more than --max-elements elements");
    }
  } else {
    if (a.shape.empty()) throw UsageError("crystal: give --shape or --cols");
    Partition lambda;
    try {
      lambda = Partition(a.shape);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("crystal: ") + e.what());
    }
    config["shape"] = a.shape;
    for (auto& t : semistandard_tableaux(lambda, a.rank)) {
      elements.emplace_back(std::move(t));
      if (elements.size() > a.max_elements) throw flow::BudgetError("crystal: more than --max-elements elements");
    }
  }
  config["max_elements"] = a.max_elements;

  Json els = Json::array();
  for (const auto& x : elements)
    els.push_back(std::holds_alternative<Tableau>(x) ? tableau_json(std::get<Tableau>(x))
                                                     : matrix_json(std::get<NatMatrix>(x)));
  Json edges = Json::array();
  for (const auto& e : crystal::crystal_graph(elements))
    edges.push_back(Json{{"source", e.source}, {"i", e.index}, {"target", e.target}});
  emit(a.output, Json{{"config", config}, {"elements", els}, {"edges", edges}}, out);
  return kSuccess;
}

// ---- flow ----

struct FlowArgs {
  int r = 2;
  int n = 2;
  int max_entry = 2;
  std::vector<int> k;
  std::vector<int> weight;
  std::vector<double> z;
  std::vector<double> q;
  std::uint64_t seed = 1;
  int steps_per_decade = 16;
  double t_infinity = 1e6;
  double t_zero = 1e-6;
  std::string z_path = "ray";
  double tol = 1e-6;
  double gap_ratio = 1e3;
  std::size_t max_dim = 300;
  std::string trace;
  std::string output;
};

int cmd_flow(const FlowArgs& a, std::ostream& out) {
  if (a.r < 1 || a.n < 1) throw UsageError("flow: r and n must be positive");
  flow::Corpus corpus;
  Json config{{"command", "flow"}, {"r", a.r}, {"n", a.n}};
  if (!a.weight.empty()) {
    corpus.kind = flow::Corpus::Kind::Weight;
    corpus.k = a.k;
    corpus.weight = a.weight;
    config["k"] = a.k;
    config["weight"] = a.weight;
  } else if (!a.k.empty()) {
    corpus.kind = flow::Corpus::Kind::ColumnDegrees;
    corpus.k = a.k;
    config["k"] = a.k;
  } else {
    corpus.max_entry = a.max_entry;
    config["max_entry"] = a.max_entry;
  }
  if ((!a.k.empty() && static_cast<int>(a.k.size()) != a.n) ||
      (!a.weight.empty() && static_cast<int>(a.weight.size()) != a.r))
    throw UsageError("flow: --k needs n entries and --weight needs r entries");

  flow::FlowConfig cfg;
  cfg.z = a.z.empty() ? flow::default_z(a.n) : a.z;
  cfg.q = a.q.empty() ? flow::default_q(a.r) : a.q;
  if (static_cast<int>(cfg.z.size()) != a.n || static_cast<int>(cfg.q.size()) != a.r)
    throw UsageError("flow: --z needs n entries and --q needs r entries");
  cfg.seed = a.seed;
  cfg.steps_per_decade = a.steps_per_decade;
  cfg.t_infinity = a.t_infinity;
  cfg.t_zero = a.t_zero;
  cfg.z_path = parse_z_path(a.z_path);
  cfg.cluster = {a.tol, a.gap_ratio};
  config.update(Json{{"z", cfg.z},
                     {"q", cfg.q},
                     {"seed", a.seed},
                     {"steps_per_decade", a.steps_per_decade},
                     {"t_infinity", a.t_infinity},
                     {"t_zero", a.t_zero},
                     {"z_path", a.z_path},
                     {"tol", a.tol},
                     {"gap_ratio", a.gap_ratio},
                     {"max_dim", a.max_dim}});

  std::ostringstream trace;
  flow::TraceSink sink;
  if (!a.trace.empty()) {
    trace << std::setprecision(17) << "run,stage,t,branch";
    for (int i = 1; i <= a.n + a.r; ++i) trace << ",value_" << i;
    trace << "\n";
  }
  std::size_t run_index = 0;
  std::string last_stage;
  if (!a.trace.empty())
    sink = [&](const flow::TraceRow& row) {
      // A new run (next block, or a retry) starts over at the z -> infinity stage.
      if (row.stage == "z_inf" && last_stage != "z_inf" && !last_stage.empty()) ++run_index;
      last_stage = row.stage;
      trace << run_index << ',' << row.stage << ',' << row.t << ',' << row.branch;
      for (double v : row.values) trace << ',' << v;
      trace << '\n';
    };

  const flow::MainTheoremReport rep =
      flow::verify_main_theorem(a.r, a.n, corpus, cfg, a.trace.empty() ? nullptr : &sink, a.max_dim);

  Json branches = Json::array(), classes = Json::array(), failures = Json(rep.failures), mismatches = Json::array();
  flow::Diagnostics diag;
  std::vector<double> q_used;
  int attempts = 1;
  for (const auto& b : rep.blocks) {
    const std::size_t offset = branches.size();
    for (const auto& br : b.result.branches)
      branches.push_back(Json{{"label_matrix", matrix_json(br.label)},
                              {"endpoint_eigenvalues", br.endpoint_eigenvalues},
                              {"S", tableau_json(br.S)},
                              {"T", tableau_json(br.T)}});
    for (const auto& c : b.result.classes) {
      Json cls = Json::array();
      for (auto idx : c) cls.push_back(offset + idx);
      classes.push_back(cls);
    }
    diag.merge(b.result.diagnostics);
    attempts = std::max(attempts, b.result.attempts);
  }
  for (const auto& m : rep.mismatches)
    mismatches.push_back(Json{{"matrix", matrix_json(m.a)},
                              {"S", tableau_json(m.S)},
                              {"T", tableau_json(m.T)},
                              {"P", tableau_json(m.P)},
                              {"Q", tableau_json(m.Q)}});

  Json diagnostics = diagnostics_json(diag);
  diagnostics["max_block_dim"] = rep.max_dim;
  diagnostics["max_attempts_used"] = attempts;
  const Json report{{"config", config},
                    {"params", {{"z", cfg.z}, {"q", cfg.q}, {"seed", a.seed}}},
                    {"grid",
                     {{"t_infinity", a.t_infinity}, {"t_zero", a.t_zero}, {"steps_per_decade", a.steps_per_decade},
                      {"z_path", a.z_path}}},
                    {"branches", branches},
                    {"classes", classes},
                    {"cases", rep.cases},
                    {"agreements", rep.agreements},
                    {"mismatches", mismatches},
                    {"failures", failures},
                    {"rsk_agreement", rep.passed()},
                    {"diagnostics", diagnostics}};
  if (!a.trace.empty()) write_atomic(a.trace, trace.str());
  emit(a.output, report, out);
  if (!rep.mismatches.empty()) return kMismatch;
  if (!rep.failures.empty()) return kInconclusive;
  return kSuccess;
}

// ---- cells ----

struct CellsArgs {
  int n = 3;
  std::string kind = "right";
  std::uint64_t seed = 1;
  double tol = 1e-6;
  double gap_ratio = 1e3;
  std::vector<double> z;
  std::vector<double> q;
  int steps_per_decade = 16;
  std::string z_path = "ray";
  std::size_t max_dim = 120;
  std::string output;
};

Json blocks_json(const cm::CellPartition& p) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks) {
    Json block = Json::array();
    for (const auto& w : b) block.push_back(w.one_line());
    blocks.push_back(block);
  }
  return blocks;
}

int cmd_cells(const CellsArgs& a, std::ostream& out) {
  if (a.n < 1 || a.n > 7) throw UsageError("cells: --n must be between 1 and 7");
  const cm::CellKind kind = cm::parse_cell_kind(a.kind);
  std::size_t dim = 1;
  for (int i = 2; i <= a.n; ++i) dim *= static_cast<std::size_t>(i);
  if (dim > a.max_dim)
    throw flow::BudgetError("cells: block dimension " + std::to_string(dim) + " exceeds --max-dim " +
                            std::to_string(a.max_dim));

  cm::CellOptions opts;
  opts.z = a.z.empty() ? flow::default_z(a.n) : a.z;
  opts.q = a.q.empty() ? flow::default_q(a.n) : a.q;
  if (static_cast<int>(opts.z.size()) != a.n || static_cast<int>(opts.q.size()) != a.n)
    throw UsageError("cells: --z and --q need n entries");
  opts.seed = a.seed;
  opts.steps_per_decade = a.steps_per_decade;
  opts.z_path = parse_z_path(a.z_path);
  opts.cluster = {a.tol, a.gap_ratio};

  const cm::CellResult res = cm::compute_cells(a.n, kind, opts);
  const cm::CellPartition reference = cm::kl_reference_cells(a.n, kind);
  const bool matches = res.partition.blocks == reference.blocks;

  // Which Robinson-Schensted statistic the observed partition follows, if any.
  std::string grouping = "none";
  if (res.partition.blocks == cm::kl_reference_cells(a.n, cm::CellKind::Right).blocks) grouping = "P";
  else if (res.partition.blocks == cm::kl_reference_cells(a.n, cm::CellKind::Left).blocks) grouping = "Q";
  else if (res.partition.blocks == cm::kl_reference_cells(a.n, cm::CellKind::TwoSided).blocks) grouping = "shape";

  Json diagnostics = diagnostics_json(res.diagnostics);
  diagnostics["class_count"] = res.partition.blocks.size();
  diagnostics["expected_classes"] = res.expected_classes;
  diagnostics["sizes"] = res.partition.sizes();
  diagnostics["grouped_by"] = grouping;
  const Json report{{"config",
                     {{"command", "cells"},
                      {"n", a.n},
                      {"kind", a.kind},
                      {"seed", a.seed},
                      {"tol", a.tol},
                      {"gap_ratio", a.gap_ratio},
                      {"z", opts.z},
                      {"q", opts.q},
                      {"steps_per_decade", a.steps_per_decade},
                      {"z_path", a.z_path},
                      {"max_dim", a.max_dim}}},
                    {"n", a.n},
                    {"kind", cm::to_string(kind)},
                    {"blocks", blocks_json(res.partition)},
                    {"matches_kl", matches},
                    {"diagnostics", diagnostics}};
  emit(a.output, report, out);
  return matches ? kSuccess : kMismatch;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) {
      std::filesystem::remove(tmp);
      throw UsageError("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RSK, crystals, Gaudin spectral flow and Calogero-Moser cells", "rskflow_cli"};
  app.require_subcommand(1);

  RskArgs rsk_args;
  std::string rsk_config;
  auto* rsk_cmd = app.add_subcommand("rsk", "RSK of a matrix, its inverse, or the bijection suite");
  rsk_cmd->add_option("matrix", rsk_args.matrix, "Matrix as JSON rows, e.g. [[0,2,1],[1,0,1]]");
  rsk_cmd->add_option("--file", rsk_args.file, "Read the input from a file");
  rsk_cmd->add_flag("--inverse", rsk_args.inverse, "Input is {\"P\": rows, \"Q\": rows}; print the matrix");
  rsk_cmd->add_flag("--check", rsk_args.check, "Run the bijection and transpose suite");
  rsk_cmd->add_option("--rows", rsk_args.rows, "Alphabet bound of Q for --inverse");
  rsk_cmd->add_option("--cols", rsk_args.cols, "Alphabet bound of P for --inverse");
  rsk_cmd->add_option("--max-dim", rsk_args.max_dim, "Largest r and n for --check")->capture_default_str();
  rsk_cmd->add_option("--max-entry", rsk_args.max_entry, "Largest entry for --check")->capture_default_str();
  rsk_cmd->add_option("--samples", rsk_args.samples, "Random cases for --check")->capture_default_str();
  rsk_cmd->add_option("--seed", rsk_args.seed)->capture_default_str();
  rsk_cmd->add_option("--output", rsk_args.output, "Write the JSON report here");
  rsk_cmd->add_option("--config", rsk_config, "key=value file; flags override it");

  CrystalArgs crystal_args;
  std::string crystal_config;
  auto* crystal_cmd = app.add_subcommand("crystal", "Crystal graph on tableaux or matrices as a JSON edge list");
  crystal_cmd->add_option("--shape", crystal_args.shape, "Tableau shape, e.g. 2,1")->delimiter(',');
  crystal_cmd->add_option("--rank", crystal_args.rank, "Alphabet bound r")->capture_default_str();
  crystal_cmd->add_option("--cols", crystal_args.cols, "Use r x cols matrices instead of tableaux");
  crystal_cmd->add_option("--max-entry", crystal_args.max_entry, "Matrix entry bound")->capture_default_str();
  crystal_cmd->add_option("--max-elements", crystal_args.max_elements)->capture_default_str();
  crystal_cmd->add_option("--output", crystal_args.output);
  crystal_cmd->add_option("--config", crystal_config);

  FlowArgs flow_args;
  std::string flow_config;
  auto* flow_cmd = app.add_subcommand("flow", "Spectral flow tableaux against RSK on a corpus of matrices");
  flow_cmd->add_option("--r", flow_args.r)->capture_default_str();
  flow_cmd->add_option("--n", flow_args.n)->capture_default_str();
  flow_cmd->add_option("--max-entry", flow_args.max_entry, "Corpus: all r x n matrices with entries <= this")
      ->capture_default_str();
  flow_cmd->add_option("--k", flow_args.k, "Corpus: fixed column sums")->delimiter(',');
  flow_cmd->add_option("--weight", flow_args.weight, "Corpus: fixed row sums, with --k")->delimiter(',');
  flow_cmd->add_option("--z", flow_args.z, "Positive increasing, n entries")->delimiter(',');
  flow_cmd->add_option("--q", flow_args.q, "Positive increasing, r entries")->delimiter(',');
  flow_cmd->add_option("--seed", flow_args.seed)->capture_default_str();
  flow_cmd->add_option("--steps-per-decade", flow_args.steps_per_decade)->capture_default_str();
  flow_cmd->add_option("--t-infinity", flow_args.t_infinity)->capture_default_str();
  flow_cmd->add_option("--t-zero", flow_args.t_zero)->capture_default_str();
  flow_cmd->add_option("--z-path", flow_args.z_path, "ray, collision or collision-unit")->capture_default_str();
  flow_cmd->add_option("--tol", flow_args.tol, "Coalescence radius")->capture_default_str();
  flow_cmd->add_option("--gap-ratio", flow_args.gap_ratio)->capture_default_str();
  flow_cmd->add_option("--max-dim", flow_args.max_dim, "Largest block dimension allowed")->capture_default_str();
  flow_cmd->add_option("--trace", flow_args.trace, "Write eigenvalue traces as CSV");
  flow_cmd->add_option("--output", flow_args.output);
  flow_cmd->add_option("--config", flow_config);

  CellsArgs cells_args;
  std::string cells_config;
  auto* cells_cmd = app.add_subcommand("cells", "Calogero-Moser cells of S_n from endpoint coalescence");
  cells_cmd->add_option("--n", cells_args.n)->capture_default_str();
  cells_cmd->add_option("--kind", cells_args.kind, "right, left or two-sided")->capture_default_str();
  cells_cmd->add_option("--seed", cells_args.seed)->capture_default_str();
  cells_cmd->add_option("--tol", cells_args.tol, "Coalescence radius")->capture_default_str();
  cells_cmd->add_option("--gap-ratio", cells_args.gap_ratio)->capture_default_str();
  cells_cmd->add_option("--z", cells_args.z)->delimiter(',');
  cells_cmd->add_option("--q", cells_args.q)->delimiter(',');
  cells_cmd->add_option("--steps-per-decade", cells_args.steps_per_decade)->capture_default_str();
  cells_cmd->add_option("--z-path", cells_args.z_path)->capture_default_str();
  cells_cmd->add_option("--max-dim", cells_args.max_dim, "Largest n! allowed")->capture_default_str();
  cells_cmd->add_option("--output", cells_args.output);
  cells_cmd->add_option("--config", cells_config);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (rsk_cmd->parsed()) {
      apply_config(*rsk_cmd, rsk_config);
      return cmd_rsk(rsk_args, out);
    }
    if (crystal_cmd->parsed()) {
      apply_config(*crystal_cmd, crystal_config);
      return cmd_crystal(crystal_args, out);
    }
    if (flow_cmd->parsed()) {
      apply_config(*flow_cmd, flow_config);
      return cmd_flow(flow_args, out);
    }
    apply_config(*cells_cmd, cells_config);
    return cmd_cells(cells_args, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const flow::BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    return kUsage;
  } catch (const flow::InconclusiveClustering& e) {
    err << "inconclusive: " << e.what() << "; try --tol " << e.suggested_tol() << "\n";
    return kInconclusive;
  } catch (const flow::DegenerateSpectrum& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const flow::ContinuationFailure& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const flow::DecoderAmbiguity& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace rskflow::cli

#include "commands.hpp"

#include "topola/diffusion.hpp"
#include "topola/error.hpp"
#include "topola/eval.hpp"
#include "topola/net_core.hpp"
#include "topola/spectral.hpp"
#include "topola/topola.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace topola::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string input;
  std::string output;
  std::string format = "auto";
  std::string method = "rwr";
  std::string enhance_method = "nr";
  std::string normalization = "column";
  std::string initial;
  std::string enhance = "none";
  std::string generator = "pa";
  double lambda = 0.0;
  double alpha = 0.5;
  double tol = 0.0;
  double band_width = 0.005;
  Index rank = 0;
  Index block = 16;
  int power = 1;
  int folds = 10;
  int terms = 60;
  Index nodes = 0;
  Index edges = 0;
  std::size_t negatives = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> pair;
  std::vector<int> hops{2, 4, 6};
  std::vector<double> bands{0.05, 0.10, 0.15};
  bool directed = false;
  bool weighted = false;
  bool sort_labels = false;
  bool mask_train = false;
  bool select = false;
};

struct Network {
  Matrix a;
  std::optional<NodeIndex> index;
};

Network load_network(const std::string& path, const Options& o) {
  std::string format = o.format;
  if (format == "auto") format = std::filesystem::path(path).extension() == ".csv" ? "csv" : "edges";
  if (format == "csv") return Network{load_dense_matrix(path).values(), std::nullopt};
  if (format != "edges") throw_config("unknown input format '" + format + "' (expected auto, csv or edges)");
  Graph g = load_edge_list(path, {.directed = o.directed, .weighted = o.weighted, .sort_labels = o.sort_labels});
  return Network{g.matrix.values(), std::move(g.index)};
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json top_values(const Vector& s, Index count) {
  Json out = Json::array();
  for (Index k = 0; k < std::min(count, s.size()); ++k) out.push_back(s(k));
  return out;
}

Vector singular_values_of(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) throw_numeric("SVD did not converge");
  return svd.singularValues();
}

void emit_text(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_atomically(o.output, [&](std::ostream& f) { f << text; });
  }
}

void emit_matrix(const Options& o, std::ostream& out, const Matrix& m) {
  std::ostringstream buf;
  write_dense_matrix(buf, m);
  emit_text(o, out, buf.str());
}

unsigned threads_from_env() {
  const char* raw = std::getenv("TOPOLA_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (*end != '\0' || value < 0) throw_config("TOPOLA_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(value);
}

RwrParams rwr_params(const Options& o) {
  RwrParams p{o.alpha, parse_normalization(o.normalization)};
  p.validate();
  return p;
}

QbOptions qb_options(const Options& o) { return QbOptions{o.block, o.power, o.seed}; }

// --- Commands -------------------------------------------------------------

int cmd_enhance(const Options& o, bool has_lambda, bool has_rank, bool has_tol, std::ostream& out,
                std::ostream& err) {
  const Matrix a = load_network(o.input, o).a;
  Matrix enhanced;
  if (o.enhance_method == "nr" || o.enhance_method == "fastnr") {
    if (!has_lambda) throw_config("--lambda is required for method " + o.enhance_method);
    if (o.enhance_method == "nr") {
      enhanced = nr_enhance(a, {o.lambda});
    } else {
      if (has_rank == has_tol) throw_config("fastnr needs exactly one of --rank or --tol");
      const QbTarget target = has_rank ? QbTarget{RankTarget{o.rank}} : QbTarget{ToleranceTarget{o.tol}};
      enhanced = fastnr_enhance(a, {o.lambda}, target, qb_options(o));
    }
  } else if (o.enhance_method == "cn") {
    enhanced = cn_matrix(a);
  } else {
    throw_config("unknown enhancement method '" + o.enhance_method + "' (expected nr, fastnr or cn)");
  }

  Json summary;
  summary["method"] = o.enhance_method;
  summary["lambda"] = o.enhance_method == "cn" ? Json(nullptr) : Json(o.lambda);
  summary["shape"] = {enhanced.rows(), enhanced.cols()};
  summary["singular_values_before"] = top_values(singular_values_of(a), 10);
  summary["singular_values_after"] = top_values(singular_values_of(enhanced), 10);

  emit_matrix(o, out, enhanced);
  (o.output.empty() ? err : out) << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_distance(const Options& o, std::ostream& out) {
  const Matrix a = load_network(o.input, o).a;
  emit_matrix(o, out, topola_distance(a, {o.lambda}).values);
  return kExitOk;
}

int cmd_predict(const Options& o, bool has_lambda, std::ostream& out) {
  const Matrix a = load_network(o.input, o).a;
  const RwrParams params = rwr_params(o);
  const DiffusionMethod method = parse_diffusion_method(o.method);
  if ((!o.initial.empty() || o.enhance != "none") && method != DiffusionMethod::kRwr)
    throw_config("--initial and --enhance combine only with --method rwr");

  Matrix scores;
  if (!o.initial.empty()) {
    scores = diffuse(a, load_dense_matrix(o.initial).values(), params, method).scores;
  } else if (o.enhance == "nr") {
    if (!has_lambda) throw_config("--lambda is required for --enhance nr");
    scores = diffuse(a, nr_enhance(a, {o.lambda}), params, method).scores;
  } else if (o.enhance == "cn") {
    scores = diffuse(a, cn_matrix(a) * a, params, method).scores;
  } else if (o.enhance != "none") {
    throw_config("unknown --enhance '" + o.enhance + "' (expected none, nr or cn)");
  } else if (method == DiffusionMethod::kTrwr) {
    if (!has_lambda) throw_config("--lambda is required for trwr");
    scores = trwr(a, params, {o.lambda}).scores;
  } else if (method == DiffusionMethod::kCnrwr) {
    scores = cnrwr(a, params).scores;
  } else {
    scores = rwr(a, params).scores;
  }
  if (o.mask_train) scores = (a.array() != 0.0).select(0.0, scores);
  emit_matrix(o, out, scores);
  return kExitOk;
}

int cmd_eval(const Options& o, bool has_lambda, std::ostream& out) {
  const Matrix a = load_network(o.input, o).a;
  LinkPredictionConfig config;
  config.method = parse_diffusion_method(o.method);
  config.rwr = rwr_params(o);
  config.folds = o.folds;
  config.seed = o.seed;
  config.mask_train = o.mask_train;
  config.select_params = o.select;
  config.negative_samples = o.negatives;
  config.threads = threads_from_env();
  if (has_lambda) config.topo.lambda = o.lambda;

  LinkPredictionReport report;
  if (o.enhance == "none") {
    if (config.method == DiffusionMethod::kTrwr && !has_lambda && !o.select)
      throw_config("--lambda (or --select) is required for trwr");
    report = run_link_prediction(a, config);
  } else {
    if (config.method != DiffusionMethod::kRwr) throw_config("--enhance combines only with --method rwr");
    if (o.select) throw_config("--select is not available with --enhance");
    const RwrParams params = config.rwr;
    Scorer scorer;
    if (o.enhance == "nr") {
      if (!has_lambda) throw_config("--lambda is required for --enhance nr");
      const TopoLaParams topo{o.lambda};
      scorer = [params, topo](const Matrix& train) {
        return diffuse(train, nr_enhance(train, topo), params, DiffusionMethod::kRwr).scores;
      };
    } else if (o.enhance == "cn") {
      scorer = [params](const Matrix& train) {
        return diffuse(train, cn_matrix(train) * train, params, DiffusionMethod::kRwr).scores;
      };
    } else {
      throw_config("unknown --enhance '" + o.enhance + "' (expected none, nr or cn)");
    }
    report = run_link_prediction_with(a, scorer, "rwr+" + o.enhance, config);
  }
  emit_text(o, out, report_to_json(report));
  return kExitOk;
}

int cmd_spectrum(const Options& o, bool has_lambda, std::ostream& out) {
  const Matrix a = load_network(o.input, o).a;
  const Vector s = singular_values_of(a);
  auto gaps = [](const Vector& v) {
    Json g = Json::array();
    for (Index k = 0; k + 1 < v.size(); ++k) g.push_back(v(k) - v(k + 1));
    return g;
  };
  Json report;
  report["shape"] = {a.rows(), a.cols()};
  report["singular_values"] = top_values(s, s.size());
  report["gaps"] = gaps(s);
  if (has_lambda) {
    TopoLaParams{o.lambda}.validate();
    Vector e(s.size());
    for (Index k = 0; k < s.size(); ++k) e(k) = singular_transform(s(k), o.lambda);
    report["lambda"] = o.lambda;
    report["enhanced_singular_values"] = top_values(e, e.size());
    report["enhanced_gaps"] = gaps(e);
  }
  const double cond = condition_number(s);
  report["condition_number"] = std::isfinite(cond) ? Json(cond) : Json("inf");
  emit_text(o, out, report.dump(2) + "\n");
  return kExitOk;
}

Index node_of(const Network& net, const std::string& label) {
  if (net.index) {
    const auto found = net.index->find(label);
    if (!found) throw_config("unknown node '" + label + "'");
    return static_cast<Index>(*found);
  }
  std::size_t used = 0;
  long value = -1;
  try {
    value = std::stol(label, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != label.size() || value < 0 || value >= net.a.rows())
    throw_config("node '" + label + "' is not a valid row index");
  return static_cast<Index>(value);
}

int cmd_oracle(const Options& o, bool has_lambda, std::ostream& out) {
  const Network net = load_network(o.input, o);
  if (o.pair.size() != 2) throw_config("--pair needs exactly two nodes");
  const Index i = node_of(net, o.pair[0]);
  const Index j = node_of(net, o.pair[1]);
  bool pass = true;

  out << "pair " << o.pair[0] << ' ' << o.pair[1];
  bool degrees_printed = false;
  for (const int n : o.hops) {
    const PathCensus c = path_census(net.a, n, i, j);
    if (!degrees_printed) {
      out << " degrees " << c.degree_i << ' ' << c.degree_j << '\n';
      degrees_printed = true;
    }
    const std::uint64_t loop_free = c.loop_free[static_cast<std::size_t>(n)];
    const bool identity = c.total == walk_count(net.a, n, i, j) && c.total == loop_free + c.endpoint_loops + c.remainder;
    pass = pass && identity;
    out << "hops " << n << " walks " << c.total << " a " << loop_free << " b " << c.endpoint_loops << " c "
        << c.remainder << ' ' << (identity ? "PASS" : "FAIL") << '\n';
  }
  if (!degrees_printed) out << '\n';

  // Closed form against the truncated series in its convergent regime.
  const double smax = spectral_norm(net.a);
  if (smax > 0.0) {
    const double lambda = has_lambda ? o.lambda : smax * smax / 0.7;
    const TopoLaParams params{lambda};
    const SeriesSum series = topola_series(net.a, params, o.terms);
    const double residual = (series.values - topola_distance(net.a, params).values).cwiseAbs().maxCoeff();
    const double tolerance = 1e-8 * (net.a * net.a.transpose()).cwiseAbs().maxCoeff() / lambda;
    const bool ok = series.convergent && residual <= tolerance;
    pass = pass && ok;
    out << "series terms " << o.terms << " lambda " << format_double(lambda) << " residual "
        << format_double(residual) << " tolerance " << format_double(tolerance) << ' '
        << (series.convergent ? (ok ? "PASS" : "FAIL") : "FAIL (divergent)") << '\n';
  }
  out << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_analyze(const Options& o, bool has_lambda, std::ostream& out, std::ostream& err) {
  Network net;
  if (!o.input.empty()) {
    net = load_network(o.input, o);
  } else {
    if (o.nodes < 2) throw_config("analyze needs --input or --nodes/--edges");
    if (o.generator == "pa") net.a = preferential_attachment_graph(o.nodes, o.edges, o.seed);
    else if (o.generator == "gnm") net.a = random_graph_gnm(o.nodes, o.edges, o.seed);
    else throw_config("unknown generator '" + o.generator + "' (expected pa or gnm)");
  }
  const double lambda = has_lambda ? o.lambda : lambda_grid(net.a)[3];
  const auto records = pair_analysis(net.a, lambda, {o.bands, o.band_width});

  std::ostringstream csv;
  write_pair_records(csv, records, net.index ? &net.index->labels() : nullptr);
  emit_text(o, out, csv.str());

  Json summary;
  summary["lambda"] = lambda;
  summary["nodes"] = net.a.rows();
  summary["edges"] = static_cast<std::int64_t>(std::llround(net.a.sum() / 2.0));
  summary["pairs"] = records.size();
  Json bands = Json::array();
  for (const auto& b : band_correlations(records, o.bands))
    bands.push_back({{"band", b.band}, {"pairs", b.pairs}, {"spearman_dtopo_union", number(b.spearman_dtopo_union)}});
  summary["bands"] = std::move(bands);
  (o.output.empty() ? err : out) << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_lambda_grid(const Options& o, std::ostream& out) {
  const Matrix a = load_network(o.input, o).a;
  const std::vector<double> grid = lambda_grid(a);
  Json report;
  report["exponents"] = {-3, -2, -1, 0, 1, 2, 3};
  report["grid"] = grid;
  emit_text(o, out, report.dump(2) + "\n");
  return kExitOk;
}

// --- Wiring ---------------------------------------------------------------

void add_input_flags(CLI::App* cmd, Options& o, bool required = true) {
  auto* input = cmd->add_option("-i,--input", o.input, "Network: dense CSV or edge list");
  if (required) input->required();
  cmd->add_option("--format", o.format, "Input format: auto, csv or edges")->capture_default_str();
  cmd->add_flag("--directed", o.directed, "Edge list is directed");
  cmd->add_flag("--weighted", o.weighted, "Edge list has a weight column");
  cmd->add_flag("--sort-labels", o.sort_labels, "Order edge-list nodes lexicographically");
}

void add_output_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("-o,--output", o.output, "Output path (default: stdout)");
}

void add_rwr_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--method", o.method, "rwr, trwr or cnrwr")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Walk continuation probability in (0, 1)")->capture_default_str();
  cmd->add_option("--normalization", o.normalization, "column, row or symmetric")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TopoLa network enhancement, diffusion and evaluation"};
  app.name("topola");
  app.require_subcommand(1);
  Options o;

  auto* enhance = app.add_subcommand("enhance", "Write an enhanced network (nr, fastnr or cn)");
  add_input_flags(enhance, o);
  add_output_flag(enhance, o);
  enhance->add_option("--method", o.enhance_method, "nr, fastnr or cn")->capture_default_str();
  auto* enhance_lambda = enhance->add_option("--lambda", o.lambda, "Damping parameter (> 0)");
  auto* enhance_rank = enhance->add_option("--rank", o.rank, "fastnr target rank");
  auto* enhance_tol = enhance->add_option("--tol", o.tol, "fastnr Frobenius tolerance");
  enhance->add_option("--block", o.block, "Sketch block size")->capture_default_str();
  enhance->add_option("--power", o.power, "Power iterations per block")->capture_default_str();
  enhance->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* distance = app.add_subcommand("distance", "Write the TopoLa distance matrix");
  add_input_flags(distance, o);
  add_output_flag(distance, o);
  distance->add_option("--lambda", o.lambda, "Damping parameter (> 0)")->required();

  auto* predict = app.add_subcommand("predict", "Write restart-diffusion scores");
  add_input_flags(predict, o);
  add_output_flag(predict, o);
  add_rwr_flags(predict, o);
  auto* predict_lambda = predict->add_option("--lambda", o.lambda, "Damping parameter for trwr");
  predict->add_option("--initial", o.initial, "Dense CSV initial state (rwr only)");
  predict->add_option("--enhance", o.enhance, "Initial-state enhancement for rwr: none, nr or cn")
      ->capture_default_str();
  predict->add_flag("--mask-train", o.mask_train, "Zero the scores of existing edges");

  auto* eval = app.add_subcommand("eval", "Cross-validated link prediction report (JSON)");
  add_input_flags(eval, o);
  add_output_flag(eval, o);
  add_rwr_flags(eval, o);
  auto* eval_lambda = eval->add_option("--lambda", o.lambda, "Damping parameter for trwr");
  eval->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
  eval->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  eval->add_option("--enhance", o.enhance, "Initial-state enhancement for rwr: none, nr or cn")
      ->capture_default_str();
  eval->add_option("--negatives", o.negatives, "Sample this many negatives per fold (0 = all)")
      ->capture_default_str();
  eval->add_flag("--select", o.select, "Grid-select alpha (and lambda) on an inner validation split");
  eval->add_flag("--mask-train", o.mask_train, "Record that training edges are masked");

  auto* spectrum = app.add_subcommand("spectrum", "Singular values, gaps and condition number");
  add_input_flags(spectrum, o);
  add_output_flag(spectrum, o);
  auto* spectrum_lambda = spectrum->add_option("--lambda", o.lambda, "Also report the enhanced spectrum");

  auto* oracle = app.add_subcommand("oracle", "Walk, path-census and series checks for one node pair");
  add_input_flags(oracle, o, false);
  oracle->add_option("--graph", o.input, "Graph file (alias of --input)");
  oracle->add_option("--pair", o.pair, "Two node labels")->expected(2)->required();
  oracle->add_option("--hops", o.hops, "Even hop counts")->capture_default_str();
  oracle->add_option("--terms", o.terms, "Series terms")->capture_default_str();
  auto* oracle_lambda = oracle->add_option("--lambda", o.lambda, "Series lambda (default sigma_max^2 / 0.7)");

  auto* analyze = app.add_subcommand("analyze", "Pair analysis CSV with band-wise correlations");
  add_input_flags(analyze, o, false);
  add_output_flag(analyze, o);
  analyze->add_option("--nodes", o.nodes, "Generated graph size");
  analyze->add_option("--edges", o.edges, "Generated edge count");
  analyze->add_option("--generator", o.generator, "pa (preferential attachment) or gnm")->capture_default_str();
  analyze->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  auto* analyze_lambda = analyze->add_option("--lambda", o.lambda, "Damping (default median sigma squared)");
  analyze->add_option("--bands", o.bands, "Jaccard band centers")->capture_default_str();
  analyze->add_option("--band-width", o.band_width, "Half width of each band")->capture_default_str();

  auto* grid = app.add_subcommand("lambda-grid", "Candidate lambdas scaled to the spectrum");
  add_input_flags(grid, o);
  add_output_flag(grid, o);

  std::vector<const char*> argv{"topola"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const CLI::RequiredError*>(&e) || dynamic_cast<const CLI::ExtrasError*>(&e))
      err << "run '" << sub->get_name() << " --help' for usage\n";
    return kExitConfig;
  }

  try {
    if (*enhance) return cmd_enhance(o, enhance_lambda->count() > 0, enhance_rank->count() > 0,
                                     enhance_tol->count() > 0, out, err);
    if (*distance) return cmd_distance(o, out);
    if (*predict) return cmd_predict(o, predict_lambda->count() > 0, out);
    if (*eval) return cmd_eval(o, eval_lambda->count() > 0, out);
    if (*spectrum) return cmd_spectrum(o, spectrum_lambda->count() > 0, out);
    if (*oracle) {
      if (o.input.empty()) throw_config("oracle needs --graph");
      return cmd_oracle(o, oracle_lambda->count() > 0, out);
    }
    if (*analyze) return cmd_analyze(o, analyze_lambda->count() > 0, out, err);
    if (*grid) return cmd_lambda_grid(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kNumeric ? kExitNumeric : kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace topola::cli

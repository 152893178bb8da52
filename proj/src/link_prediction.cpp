#include "topola/error.hpp"
#include "topola/eval.hpp"
#include "topola/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace topola {

namespace {

bool is_symmetric_square(const Matrix& a) { return a.rows() == a.cols() && is_symmetric(a); }

// Scores one training matrix under many (alpha, lambda) settings, caching
// the SVD, the transition matrix and one LU factorization per alpha.
class FoldScorer {
 public:
  FoldScorer(const Matrix& train, const RwrParams& base, DiffusionMethod method)
      : train_(train), method_(method), bipartite_(train.rows() != train.cols()) {
    base.validate();
    w_ = transition_matrix(bipartite_ ? bipartite_block(train) : train, base.normalization);
    if (method_ == DiffusionMethod::kTrwr) svd_ = full_svd(train);
    if (method_ == DiffusionMethod::kCnrwr) cn_initial_ = cn_matrix(train) * train;
  }

  std::vector<double> lambdas() const { return lambda_grid(svd_->s); }

  Matrix score(double alpha, std::optional<double> lambda) {
    auto& solver = solvers_[alpha];
    if (!solver) solver = std::make_unique<RwrSolver>(w_, alpha);
    Matrix initial;
    switch (method_) {
      case DiffusionMethod::kRwr: initial = train_; break;
      case DiffusionMethod::kTrwr: initial = nr_enhance(*svd_, TopoLaParams{*lambda}); break;
      case DiffusionMethod::kCnrwr: initial = cn_initial_; break;
    }
    if (!bipartite_) return solver->solve(initial);
    return solver->solve(bipartite_block(initial)).topRightCorner(train_.rows(), train_.cols());
  }

 private:
  const Matrix& train_;
  DiffusionMethod method_;
  bool bipartite_;
  Matrix w_;
  std::optional<SvdFactors> svd_;
  Matrix cn_initial_;
  std::map<double, std::unique_ptr<RwrSolver>> solvers_;
};

void assert_no_leak(const Matrix& train, const std::vector<Cell>& held_out, bool symmetric) {
  for (const auto& c : held_out)
    if (train(c.i, c.j) != 0.0 || (symmetric && train(c.j, c.i) != 0.0))
      throw Error(ErrorKind::kNumeric, "link prediction: held-out cell leaked into the training matrix");
}

FoldSplit make_split(const std::vector<Cell>& positives, const std::vector<Cell>& test, int id,
                     std::uint64_t seed) {
  FoldSplit f;
  f.fold_id = id;
  f.seed = seed;
  f.test = test;
  std::sort(f.test.begin(), f.test.end());
  std::set_difference(positives.begin(), positives.end(), f.test.begin(), f.test.end(),
                      std::back_inserter(f.train));
  return f;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

// Runs job(k) for k in [0, count) on `threads` workers; results are keyed by k
// so scheduling never changes the output.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

LinkPredictionReport aggregate(std::string name, const LinkPredictionConfig& config,
                               std::vector<FoldResult> folds) {
  LinkPredictionReport report;
  report.method = std::move(name);
  report.config = config;
  std::vector<double> aucs, auprs;
  for (const auto& f : folds) {
    aucs.push_back(f.auc);
    auprs.push_back(f.aupr);
  }
  report.folds = std::move(folds);
  report.auc_mean = mean_of(aucs);
  report.auc_std = sample_std(aucs);
  report.aupr_mean = mean_of(auprs);
  report.aupr_std = sample_std(auprs);
  return report;
}

struct Selected {
  double alpha;
  std::optional<double> lambda;
};

Selected select_parameters(const Matrix& train, const FoldSplit& fold, const LinkPredictionConfig& config,
                           bool symmetric) {
  if (fold.train.size() < 2) throw_config("link prediction: too few training edges for inner validation");
  std::vector<Cell> shuffled = fold.train;
  Rng rng(derive_seed(fold.seed, "inner-validation"));
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto wanted = static_cast<std::size_t>(
      std::ceil(config.validation_fraction * static_cast<double>(shuffled.size())));
  const std::size_t count = std::clamp<std::size_t>(wanted, 1, shuffled.size() - 1);

  FoldSplit inner;
  inner.test.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(count));
  const Matrix inner_train = training_matrix(train, inner);
  assert_no_leak(inner_train, inner.test, symmetric);

  FoldScorer scorer(inner_train, config.rwr, config.method);
  std::vector<std::optional<double>> lambdas{std::nullopt};
  if (config.method == DiffusionMethod::kTrwr) {
    lambdas.clear();
    for (const double l : scorer.lambdas()) lambdas.emplace_back(l);
  }

  Selected best{config.alpha_grid.front(), lambdas.front()};
  double best_aupr = -1.0;
  for (const double alpha : config.alpha_grid)
    for (const auto& lambda : lambdas) {
      const Matrix scores = scorer.score(alpha, lambda);
      const CandidateSet cand = collect_candidates(scores, inner_train, inner.test, symmetric);
      const double value = aupr(cand.scores, cand.labels);
      if (value > best_aupr) {
        best_aupr = value;
        best = Selected{alpha, lambda};
      }
    }
  return best;
}

LinkPredictionReport run_protocol(const Matrix& a, const LinkPredictionConfig& config, const std::string& name,
                                  const std::function<Matrix(const Matrix&, const FoldSplit&, FoldResult&)>& score) {
  if (!a.allFinite()) throw_config("link prediction: matrix has non-finite entries");
  const bool symmetric = is_symmetric_square(a);
  const std::vector<FoldSplit> splits = kfold_edge_split(a, config.folds, config.seed);
  std::vector<FoldResult> results(splits.size());

  parallel_for(splits.size(), resolve_threads(config.threads, splits.size()), [&](std::size_t k) {
    const FoldSplit& fold = splits[k];
    if (fold.test.empty()) throw_config("link prediction: fold without test edges");
    const Matrix train = training_matrix(a, fold);
    assert_no_leak(train, fold.test, symmetric);
    FoldResult r;
    r.fold = fold.fold_id;
    const Matrix scores = score(train, fold, r);
    const CandidateSet cand = collect_candidates(scores, train, fold.test, symmetric,
                                                 config.negative_samples, fold.seed);
    r.auc = auc(cand.scores, cand.labels);
    r.aupr = aupr(cand.scores, cand.labels);
    r.positives = fold.test.size();
    r.negatives = cand.labels.size() - fold.test.size();
    results[k] = r;
  });
  return aggregate(name, config, std::move(results));
}

}  // namespace

std::vector<Cell> positive_cells(const Matrix& a) {
  std::vector<Cell> cells;
  const bool square = a.rows() == a.cols();
  const bool symmetric = is_symmetric_square(a);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = symmetric ? i + 1 : 0; j < a.cols(); ++j) {
      if (square && i == j) continue;
      if (a(i, j) != 0.0) cells.push_back(Cell{i, j});
    }
  return cells;
}

std::vector<FoldSplit> kfold_edge_split(const Matrix& a, int k, std::uint64_t seed) {
  if (k < 2) throw_config("kfold_edge_split: need at least two folds");
  const std::vector<Cell> positives = positive_cells(a);
  if (positives.size() < static_cast<std::size_t>(k))
    throw_config("kfold_edge_split: fewer positive edges (" + std::to_string(positives.size()) +
                 ") than folds (" + std::to_string(k) + ")");
  std::vector<Cell> shuffled = positives;
  Rng rng(derive_seed(seed, "kfold"));
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  std::vector<std::vector<Cell>> tests(static_cast<std::size_t>(k));
  for (std::size_t p = 0; p < shuffled.size(); ++p) tests[p % static_cast<std::size_t>(k)].push_back(shuffled[p]);

  std::vector<FoldSplit> folds;
  for (int f = 0; f < k; ++f)
    folds.push_back(make_split(positives, tests[static_cast<std::size_t>(f)], f,
                               derive_seed(seed, "fold", static_cast<std::uint64_t>(f))));
  return folds;
}

Matrix training_matrix(const Matrix& a, const FoldSplit& fold) {
  Matrix train = a;
  const bool symmetric = is_symmetric_square(a);
  for (const auto& c : fold.test) {
    train(c.i, c.j) = 0.0;
    if (symmetric) train(c.j, c.i) = 0.0;
  }
  return train;
}

CandidateSet collect_candidates(const Matrix& scores, const Matrix& train, const std::vector<Cell>& held_out,
                                bool symmetric, std::size_t negative_samples, std::uint64_t seed) {
  if (scores.rows() != train.rows() || scores.cols() != train.cols())
    throw_config("collect_candidates: score matrix shape mismatch");
  const bool square = train.rows() == train.cols();
  const std::set<Cell> positives(held_out.begin(), held_out.end());

  auto cell_score = [&](Index i, Index j) {
    return symmetric ? 0.5 * (scores(i, j) + scores(j, i)) : scores(i, j);
  };

  CandidateSet out;
  std::vector<double> negatives;
  for (const auto& c : held_out) {
    out.scores.push_back(cell_score(c.i, c.j));
    out.labels.push_back(1);
  }
  for (Index i = 0; i < train.rows(); ++i)
    for (Index j = symmetric ? i + 1 : 0; j < train.cols(); ++j) {
      if (square && i == j) continue;
      if (train(i, j) != 0.0) continue;
      if (positives.count(Cell{i, j})) continue;
      negatives.push_back(cell_score(i, j));
    }
  if (negative_samples > 0 && negatives.size() > negative_samples) {
    Rng rng(derive_seed(seed, "negatives"));
    std::shuffle(negatives.begin(), negatives.end(), rng);
    negatives.resize(negative_samples);
  }
  for (const double s : negatives) {
    out.scores.push_back(s);
    out.labels.push_back(0);
  }
  return out;
}

LinkPredictionReport run_link_prediction(const Matrix& a, const LinkPredictionConfig& config) {
  config.rwr.validate();
  if (config.method == DiffusionMethod::kTrwr && !config.select_params) config.topo.validate();
  if (config.select_params && config.alpha_grid.empty()) throw_config("link prediction: empty alpha grid");
  const bool symmetric = is_symmetric_square(a);

  return run_protocol(a, config, std::string(to_string(config.method)),
                      [&](const Matrix& train, const FoldSplit& fold, FoldResult& r) {
                        Selected chosen{config.rwr.alpha, std::nullopt};
                        if (config.method == DiffusionMethod::kTrwr) chosen.lambda = config.topo.lambda;
                        if (config.select_params) chosen = select_parameters(train, fold, config, symmetric);
                        r.alpha = chosen.alpha;
                        r.lambda = chosen.lambda;
                        FoldScorer scorer(train, config.rwr, config.method);
                        return scorer.score(chosen.alpha, chosen.lambda);
                      });
}

LinkPredictionReport run_link_prediction_with(const Matrix& a, const Scorer& scorer, const std::string& name,
                                              const LinkPredictionConfig& config) {
  return run_protocol(a, config, name, [&](const Matrix& train, const FoldSplit&, FoldResult& r) {
    r.alpha = config.rwr.alpha;
    return scorer(train);
  });
}

std::string report_to_json(const LinkPredictionReport& report) {
  using nlohmann::ordered_json;
  const auto& c = report.config;
  ordered_json params;
  params["alpha"] = c.select_params ? ordered_json(nullptr) : ordered_json(c.rwr.alpha);
  params["lambda"] = (c.method == DiffusionMethod::kTrwr && !c.select_params) ? ordered_json(c.topo.lambda)
                                                                                : ordered_json(nullptr);
  params["normalization"] = std::string(to_string(c.rwr.normalization));
  params["seed"] = c.seed;
  params["folds"] = c.folds;
  params["mask_train"] = c.mask_train;
  params["selection"] = c.select_params ? "inner-validation" : "fixed";
  params["negatives"] = c.negative_samples == 0 ? ordered_json("all") : ordered_json(c.negative_samples);

  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds) {
    ordered_json j;
    j["fold"] = f.fold;
    j["auc"] = f.auc;
    j["aupr"] = f.aupr;
    j["alpha"] = f.alpha;
    j["lambda"] = f.lambda ? ordered_json(*f.lambda) : ordered_json(nullptr);
    j["positives"] = f.positives;
    j["negatives"] = f.negatives;
    folds.push_back(std::move(j));
  }

  ordered_json out;
  out["method"] = report.method;
  out["params"] = std::move(params);
  out["folds"] = std::move(folds);
  out["auc_mean"] = report.auc_mean;
  out["auc_std"] = report.auc_std;
  out["aupr_mean"] = report.aupr_mean;
  out["aupr_std"] = report.aupr_std;
  return out.dump(2) + "\n";
}

}  // namespace topola

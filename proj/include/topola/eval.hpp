#pragma once

#include "topola/diffusion.hpp"
#include "topola/net_core.hpp"
#include "topola/topola.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace topola {

// --- Ranking and clustering metrics ---------------------------------------

/// Mann-Whitney AUC with tie-averaged ranks.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Average precision; ties are ordered by (score desc, index asc).
double aupr(std::span<const double> scores, std::span<const int> labels);

double ari(std::span<const int> a, std::span<const int> b);

/// I(U,V) / max{H(U), H(V)}. Both partitions constant -> 1, exactly one
/// constant -> 0.
double nmi(std::span<const int> a, std::span<const int> b);

/// Spearman rank correlation with average ranks for ties. Returns NaN when
/// either input has zero rank variance.
double spearman(std::span<const double> x, std::span<const double> y);

struct RetrievalAccuracy {
  std::vector<double> per_query;
  double average = 0.0;
};

/// Rank all other items by similarity (descending, index ascending on ties),
/// count same-class hits H_q in the top k and report H_q / min(k, N_q), where
/// N_q is the number of other members of q's class. With k unset each query
/// uses k = N_q. Queries with N_q == 0 are skipped in the average.
RetrievalAccuracy retrieval_accuracy(const Matrix& similarity, std::span<const int> classes,
                                     std::optional<Index> k = std::nullopt);

// --- Feature similarity ---------------------------------------------------

struct KernelResult {
  AdjacencyMatrix matrix;
  /// Rows whose local scale was zero and got clamped to kMinLocalScale.
  std::vector<Index> clamped_rows;
};

inline constexpr double kMinLocalScale = 1e-12;

/// Locally scaled Gaussian kernel: eps_i is the mean Euclidean distance from
/// x_i to its k nearest other points and
///   G[i,j] = exp(-||x_i - x_j||^2 / (sigma^2 (eps_i + eps_j)^2)).
KernelResult local_scaling_kernel(const Matrix& features, Index k = 20, double sigma = 0.5);

// --- Synthetic graphs -----------------------------------------------------

/// Uniform random simple graph with exactly `edges` edges.
Matrix random_graph_gnm(Index n, Index edges, std::uint64_t seed);

/// Preferential attachment with roughly edges/n links per new node, topped up
/// with degree-proportional edges to exactly `edges` edges.
Matrix preferential_attachment_graph(Index n, Index edges, std::uint64_t seed);

/// Equal-size blocks with within-block probability p_in, across p_out.
/// Node v belongs to block v * blocks / n.
Matrix planted_partition(Index n, Index blocks, double p_in, double p_out, std::uint64_t seed);

// --- Pair analysis --------------------------------------------------------

struct PairRecord {
  Index i = 0;
  Index j = 0;
  std::int64_t cn = 0;
  std::int64_t union_size = 0;
  double jaccard = 0.0;
  double dtopo = 0.0;
  std::optional<double> band;
};

struct PairAnalysisOptions {
  std::vector<double> bands{0.05, 0.10, 0.15};
  double band_width = 0.005;
};

/// One record per pair i < j with a nonempty neighborhood union.
std::vector<PairRecord> pair_analysis(const Matrix& a, double lambda,
                                      const PairAnalysisOptions& options = {});

struct BandCorrelation {
  double band = 0.0;
  std::size_t pairs = 0;
  double spearman_dtopo_union = 0.0;
};

std::vector<BandCorrelation> band_correlations(const std::vector<PairRecord>& records,
                                               const std::vector<double>& bands);

/// CSV with header i,j,cn,union,jaccard,dtopo,band (band empty when unset).
void write_pair_records(std::ostream& out, const std::vector<PairRecord>& records,
                        const std::vector<std::string>* labels = nullptr);

// --- Cross-validated link prediction --------------------------------------

struct Cell {
  Index i = 0;
  Index j = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct FoldSplit {
  int fold_id = 0;
  std::vector<Cell> train;
  std::vector<Cell> test;
  std::uint64_t seed = 0;
};

/// Positive cells are the upper triangle of a symmetric square matrix, or
/// every nonzero cell otherwise. Diagonal cells of square matrices are never
/// positives.
std::vector<Cell> positive_cells(const Matrix& a);

/// Uniform random partition of the positive cells into k folds whose sizes
/// differ by at most one.
std::vector<FoldSplit> kfold_edge_split(const Matrix& a, int k, std::uint64_t seed);

/// Scores a training matrix; the result has the training matrix's shape.
using Scorer = std::function<Matrix(const Matrix& train)>;

struct LinkPredictionConfig {
  DiffusionMethod method = DiffusionMethod::kRwr;
  RwrParams rwr;
  TopoLaParams topo;
  int folds = 10;
  std::uint64_t seed = 0;
  /// Recorded in the report. Training positives never enter the candidate
  /// pool, so metrics do not depend on it.
  bool mask_train = false;
  /// Grid-search alpha (and lambda for trwr) per fold on an inner split of
  /// the training positives instead of using the fixed values above.
  bool select_params = false;
  std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double validation_fraction = 0.1;
  /// 0 = every absent cell is a negative; otherwise sample this many.
  std::size_t negative_samples = 0;
  /// Worker threads for folds (0 = hardware concurrency).
  unsigned threads = 1;
};

struct FoldResult {
  int fold = 0;
  double auc = 0.0;
  double aupr = 0.0;
  double alpha = 0.0;
  std::optional<double> lambda;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct LinkPredictionReport {
  std::string method;
  LinkPredictionConfig config;
  std::vector<FoldResult> folds;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  double aupr_mean = 0.0;
  double aupr_std = 0.0;
};

LinkPredictionReport run_link_prediction(const Matrix& a, const LinkPredictionConfig& config);

/// Same protocol with a caller-supplied scorer (no parameter selection).
LinkPredictionReport run_link_prediction_with(const Matrix& a, const Scorer& scorer,
                                              const std::string& name,
                                              const LinkPredictionConfig& config);

/// Builds the training matrix for one fold: `a` with every test cell (and its
/// mirror, for symmetric inputs) set to zero.
Matrix training_matrix(const Matrix& a, const FoldSplit& fold);

/// Scores of held-out cells (label 1) and absent candidate cells (label 0).
/// Training positives and diagonal cells are excluded.
struct CandidateSet {
  std::vector<double> scores;
  std::vector<int> labels;
};
CandidateSet collect_candidates(const Matrix& scores, const Matrix& train,
                                const std::vector<Cell>& held_out, bool symmetric,
                                std::size_t negative_samples = 0, std::uint64_t seed = 0);

/// JSON text: {method, params:{alpha,lambda,normalization,seed,...},
/// folds:[{fold,auc,aupr,...}], auc_mean, auc_std, aupr_mean, aupr_std}.
std::string report_to_json(const LinkPredictionReport& report);

}  // namespace topola

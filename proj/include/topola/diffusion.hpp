#pragma once

#include "topola/net_core.hpp"
#include "topola/topola.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace topola {

enum class Normalization { kColumnStochastic, kRowStochastic, kSymmetric };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

struct RwrParams {
  /// Probability of continuing the walk; 1 - alpha is the restart weight.
  double alpha = 0.5;
  Normalization normalization = Normalization::kColumnStochastic;

  void validate() const;
};

enum class DiffusionMethod { kRwr, kTrwr, kCnrwr };

std::string_view to_string(DiffusionMethod m);
DiffusionMethod parse_diffusion_method(std::string_view s);

struct DiffusionResult {
  Matrix scores;
  DiffusionMethod method = DiffusionMethod::kRwr;
  RwrParams params;
  std::optional<double> lambda;
};

/// Normalizes a square nonnegative matrix into a transition matrix. Columns
/// (rows, for row-stochastic) with zero mass become uniform 1/n.
Matrix transition_matrix(const Matrix& a, Normalization normalization);

/// Factorization of (I - alpha W), reusable across initial states.
class RwrSolver {
 public:
  RwrSolver(const Matrix& w, double alpha);

  /// (1 - alpha) (I - alpha W)^{-1} p0 by LU solve; checks the residual.
  Matrix solve(const Matrix& p0) const;

  double alpha() const { return alpha_; }
  Index size() const { return n_; }

 private:
  Index n_;
  double alpha_;
  Matrix system_;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// (1 - alpha) (I - alpha W)^{-1} P0.
DiffusionResult rwr_closed_form(const Matrix& w, const Matrix& p0, const RwrParams& params);

/// [[0, A], [A^T, 0]], the square form of a bipartite n x m matrix.
Matrix bipartite_block(const Matrix& a);

/// Plain RWR with the network itself as initial state.
DiffusionResult rwr(const Matrix& a, const RwrParams& params);

/// RWR whose initial state is the NR-enhanced network D_topo A; W is built
/// from the raw network. Rectangular inputs diffuse over bipartite_block(A)
/// and the n x m block of the scores is returned.
DiffusionResult trwr(const Matrix& a, const RwrParams& params, const TopoLaParams& topo);

/// As trwr with the common-neighbor enhancement (A A^T) A.
DiffusionResult cnrwr(const Matrix& a, const RwrParams& params);

/// Diffusion of an arbitrary initial state over the raw network `a`, with
/// the same square/bipartite handling as the named methods.
DiffusionResult diffuse(const Matrix& a, const Matrix& initial, const RwrParams& params,
                        DiffusionMethod tag);

}  // namespace topola

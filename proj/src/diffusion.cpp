#include "topola/diffusion.hpp"

#include "topola/error.hpp"

#include <cmath>

namespace topola {

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::kColumnStochastic: return "column";
    case Normalization::kRowStochastic: return "row";
    case Normalization::kSymmetric: return "symmetric";
  }
  return "column";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "column" || s == "column-stochastic") return Normalization::kColumnStochastic;
  if (s == "row" || s == "row-stochastic") return Normalization::kRowStochastic;
  if (s == "symmetric") return Normalization::kSymmetric;
  throw_config("unknown normalization '" + std::string(s) + "'");
}

std::string_view to_string(DiffusionMethod m) {
  switch (m) {
    case DiffusionMethod::kRwr: return "rwr";
    case DiffusionMethod::kTrwr: return "trwr";
    case DiffusionMethod::kCnrwr: return "cnrwr";
  }
  return "rwr";
}

DiffusionMethod parse_diffusion_method(std::string_view s) {
  if (s == "rwr") return DiffusionMethod::kRwr;
  if (s == "trwr") return DiffusionMethod::kTrwr;
  if (s == "cnrwr") return DiffusionMethod::kCnrwr;
  throw_config("unknown diffusion method '" + std::string(s) + "'");
}

void RwrParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_config("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

Matrix transition_matrix(const Matrix& a, Normalization normalization) {
  if (a.rows() != a.cols()) throw_config("transition_matrix: matrix must be square");
  if ((a.array() < 0.0).any()) throw_config("transition_matrix: negative entries");
  const Index n = a.rows();
  const double uniform = 1.0 / static_cast<double>(n);
  Matrix w = a;

  switch (normalization) {
    case Normalization::kColumnStochastic:
      for (Index j = 0; j < n; ++j) {
        const double mass = a.col(j).sum();
        if (mass > 0.0) w.col(j) /= mass;
        else w.col(j).setConstant(uniform);
      }
      break;
    case Normalization::kRowStochastic:
      for (Index i = 0; i < n; ++i) {
        const double mass = a.row(i).sum();
        if (mass > 0.0) w.row(i) /= mass;
        else w.row(i).setConstant(uniform);
      }
      break;
    case Normalization::kSymmetric: {
      const Vector degree = a.rowwise().sum();
      Vector inv_sqrt(n);
      for (Index i = 0; i < n; ++i) inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
      w = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
      for (Index j = 0; j < n; ++j)
        if (degree(j) <= 0.0 && a.col(j).sum() <= 0.0) w.col(j).setConstant(uniform);
      break;
    }
  }
  return w;
}

RwrSolver::RwrSolver(const Matrix& w, double alpha) : n_(w.rows()), alpha_(alpha) {
  if (w.rows() != w.cols()) throw_config("rwr: transition matrix must be square");
  if (!(alpha > 0.0 && alpha < 1.0)) throw_config("alpha must lie in (0, 1)");
  system_ = Matrix::Identity(n_, n_) - alpha * w;
  lu_.compute(system_);
}

Matrix RwrSolver::solve(const Matrix& p0) const {
  if (p0.rows() != n_) throw_config("rwr: initial state has wrong row count");
  Matrix x = lu_.solve(p0);
  if (!x.allFinite()) throw_numeric("rwr: linear system is singular");
  const double residual = (system_ * x - p0).norm();
  const double scale = std::max(p0.norm(), std::numeric_limits<double>::min());
  if (residual > 1e-10 * scale) throw_numeric("rwr: solve residual too large; system is ill-conditioned");
  return (1.0 - alpha_) * x;
}

DiffusionResult rwr_closed_form(const Matrix& w, const Matrix& p0, const RwrParams& params) {
  params.validate();
  RwrSolver solver(w, params.alpha);
  return DiffusionResult{solver.solve(p0), DiffusionMethod::kRwr, params, std::nullopt};
}

Matrix bipartite_block(const Matrix& a) {
  const Index n = a.rows();
  const Index m = a.cols();
  Matrix out = Matrix::Zero(n + m, n + m);
  out.topRightCorner(n, m) = a;
  out.bottomLeftCorner(m, n) = a.transpose();
  return out;
}

DiffusionResult diffuse(const Matrix& a, const Matrix& initial, const RwrParams& params,
                        DiffusionMethod tag) {
  params.validate();
  if (initial.rows() != a.rows() || initial.cols() != a.cols())
    throw_config("diffuse: initial state must have the network's shape");
  DiffusionResult out;
  if (a.rows() == a.cols()) {
    out = rwr_closed_form(transition_matrix(a, params.normalization), initial, params);
  } else {
    const Matrix w = transition_matrix(bipartite_block(a), params.normalization);
    const Matrix full = rwr_closed_form(w, bipartite_block(initial), params).scores;
    out.scores = full.topRightCorner(a.rows(), a.cols());
    out.params = params;
  }
  out.method = tag;
  return out;
}

DiffusionResult rwr(const Matrix& a, const RwrParams& params) {
  return diffuse(a, a, params, DiffusionMethod::kRwr);
}

DiffusionResult trwr(const Matrix& a, const RwrParams& params, const TopoLaParams& topo) {
  DiffusionResult out = diffuse(a, nr_enhance(a, topo), params, DiffusionMethod::kTrwr);
  out.lambda = topo.lambda;
  return out;
}

DiffusionResult cnrwr(const Matrix& a, const RwrParams& params) {
  return diffuse(a, cn_matrix(a) * a, params, DiffusionMethod::kCnrwr);
}

}  // namespace topola
